#include "cows/ast.hpp"

#include <algorithm>
#include <cassert>

namespace cows {

std::string valueText(const Value& v) {
  if (v.isInt()) return std::to_string(v.asInt());
  if (v.isBool()) return v.asBool() ? "true" : "false";
  return v.asName().text;
}

ExprPtr mkLit(Value v) { return std::make_shared<Expr>(Expr{Lit{std::move(v)}}); }
ExprPtr mkVar(Name n) { return std::make_shared<Expr>(Expr{VarRef{std::move(n)}}); }
ExprPtr mkGt(ExprPtr l, ExprPtr r) {
  return std::make_shared<Expr>(Expr{GtExpr{std::move(l), std::move(r)}});
}

TermPtr mkNil() {
  static const TermPtr nil = std::make_shared<Term>(Term{Nil{}});
  return nil;
}
TermPtr mkInvoke(Name p, Name o, std::vector<ExprPtr> args) {
  return std::make_shared<Term>(Term{Invoke{std::move(p), std::move(o), std::move(args)}});
}
TermPtr mkReceive(Name p, Name o, std::vector<Pattern> params, TermPtr cont) {
  if (!cont) cont = mkNil();
  return std::make_shared<Term>(
      Term{Receive{std::move(p), std::move(o), std::move(params), std::move(cont)}});
}
TermPtr mkParallel(std::vector<TermPtr> children) {
  return std::make_shared<Term>(Term{Parallel{std::move(children)}});
}
TermPtr mkChoice(std::vector<TermPtr> branches) {
  return std::make_shared<Term>(Term{Choice{std::move(branches)}});
}
TermPtr mkDelim(Name bound, DelimKind kind, TermPtr body, bool freshMarker) {
  return std::make_shared<Term>(Term{Delim{std::move(bound), kind, freshMarker, std::move(body)}});
}
TermPtr mkKill(Name label) { return std::make_shared<Term>(Term{Kill{std::move(label)}}); }
TermPtr mkProtect(TermPtr body) { return std::make_shared<Term>(Term{Protect{std::move(body)}}); }
TermPtr mkReplicate(TermPtr body) {
  return std::make_shared<Term>(Term{Replicate{std::move(body)}});
}
TermPtr mkCall(Name def, std::vector<ExprPtr> args) {
  return std::make_shared<Term>(Term{Call{std::move(def), std::move(args)}});
}

const Definition* Model::find(const Name& n) const {
  for (const auto& d : definitions)
    if (d.name == n) return &d;
  return nullptr;
}

// --- alpha-equivalence ------------------------------------------------------

namespace {

struct AlphaEnv {
  // parallel binder stacks; nth entry of each side corresponds
  std::vector<Name> left, right;

  // Returns the de-Bruijn distance of n on the given side, or -1 if free.
  static int resolve(const std::vector<Name>& stack, const Name& n) {
    for (int i = static_cast<int>(stack.size()) - 1; i >= 0; --i)
      if (stack[static_cast<std::size_t>(i)] == n)
        return static_cast<int>(stack.size()) - 1 - i;
    return -1;
  }

  bool sameName(const Name& a, const Name& b) const {
    int ia = resolve(left, a), ib = resolve(right, b);
    if (ia != ib) return false;
    return ia >= 0 || a == b;  // both bound at same depth, or both free and equal
  }
};

bool valueEq(const Value& a, const Value& b, const AlphaEnv& env) {
  if (a.v.index() != b.v.index()) return false;
  if (a.isName()) return env.sameName(a.asName(), b.asName());
  return a == b;
}

bool exprEq(const ExprPtr& a, const ExprPtr& b, const AlphaEnv& env) {
  if (a->node.index() != b->node.index()) return false;
  if (const auto* la = std::get_if<Lit>(&a->node))
    return valueEq(la->value, std::get<Lit>(b->node).value, env);
  if (const auto* va = std::get_if<VarRef>(&a->node))
    return env.sameName(va->name, std::get<VarRef>(b->node).name);
  const auto& ga = std::get<GtExpr>(a->node);
  const auto& gb = std::get<GtExpr>(b->node);
  return exprEq(ga.lhs, gb.lhs, env) && exprEq(ga.rhs, gb.rhs, env);
}

bool exprsEq(const std::vector<ExprPtr>& a, const std::vector<ExprPtr>& b,
             const AlphaEnv& env) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!exprEq(a[i], b[i], env)) return false;
  return true;
}

bool patternEq(const Pattern& a, const Pattern& b, const AlphaEnv& env) {
  if (a.index() != b.index()) return false;
  if (const auto* ba = std::get_if<BindVar>(&a))
    return env.sameName(ba->name, std::get<BindVar>(b).name);
  return valueEq(std::get<MatchVal>(a).value, std::get<MatchVal>(b).value, env);
}

bool termEq(const TermPtr& a, const TermPtr& b, AlphaEnv& env) {
  if (a->node.index() != b->node.index()) return false;
  if (std::holds_alternative<Nil>(a->node)) return true;
  if (const auto* ia = std::get_if<Invoke>(&a->node)) {
    const auto& ib = std::get<Invoke>(b->node);
    return env.sameName(ia->partner, ib.partner) &&
           env.sameName(ia->operation, ib.operation) && exprsEq(ia->args, ib.args, env);
  }
  if (const auto* ra = std::get_if<Receive>(&a->node)) {
    const auto& rb = std::get<Receive>(b->node);
    if (!env.sameName(ra->partner, rb.partner) ||
        !env.sameName(ra->operation, rb.operation))
      return false;
    if (ra->params.size() != rb.params.size()) return false;
    for (std::size_t i = 0; i < ra->params.size(); ++i)
      if (!patternEq(ra->params[i], rb.params[i], env)) return false;
    return termEq(ra->continuation, rb.continuation, env);
  }
  if (const auto* pa = std::get_if<Parallel>(&a->node)) {
    const auto& pb = std::get<Parallel>(b->node);
    if (pa->children.size() != pb.children.size()) return false;
    for (std::size_t i = 0; i < pa->children.size(); ++i)
      if (!termEq(pa->children[i], pb.children[i], env)) return false;
    return true;
  }
  if (const auto* ca = std::get_if<Choice>(&a->node)) {
    const auto& cb = std::get<Choice>(b->node);
    if (ca->branches.size() != cb.branches.size()) return false;
    for (std::size_t i = 0; i < ca->branches.size(); ++i)
      if (!termEq(ca->branches[i], cb.branches[i], env)) return false;
    return true;
  }
  if (const auto* da = std::get_if<Delim>(&a->node)) {
    const auto& db = std::get<Delim>(b->node);
    if (da->kind != db.kind || da->freshMarker != db.freshMarker) return false;
    env.left.push_back(da->bound);
    env.right.push_back(db.bound);
    bool ok = termEq(da->body, db.body, env);
    env.left.pop_back();
    env.right.pop_back();
    return ok;
  }
  if (const auto* ka = std::get_if<Kill>(&a->node))
    return env.sameName(ka->label, std::get<Kill>(b->node).label);
  if (const auto* pra = std::get_if<Protect>(&a->node))
    return termEq(pra->body, std::get<Protect>(b->node).body, env);
  if (const auto* rpa = std::get_if<Replicate>(&a->node))
    return termEq(rpa->body, std::get<Replicate>(b->node).body, env);
  const auto& la = std::get<Call>(a->node);
  const auto& lb = std::get<Call>(b->node);
  return la.definition == lb.definition && exprsEq(la.args, lb.args, env);
}

}  // namespace

bool alphaEqual(const TermPtr& a, const TermPtr& b) {
  AlphaEnv env;
  return termEq(a, b, env);
}

bool exprEqual(const ExprPtr& a, const ExprPtr& b) {
  AlphaEnv env;
  return exprEq(a, b, env);
}

bool alphaEqual(const Model& a, const Model& b) {
  if (a.definitions.size() != b.definitions.size()) return false;
  for (const auto& da : a.definitions) {
    const Definition* db = b.find(da.name);
    if (!db || da.params.size() != db->params.size()) return false;
    AlphaEnv env;
    env.left = da.params;
    env.right = db->params;
    if (!termEq(da.body, db->body, env)) return false;
  }
  return alphaEqual(a.main, b.main);
}

// --- simplify ----------------------------------------------------------------

TermPtr simplify(const TermPtr& t) {
  if (std::holds_alternative<Nil>(t->node) || std::holds_alternative<Invoke>(t->node) ||
      std::holds_alternative<Kill>(t->node) || std::holds_alternative<Call>(t->node))
    return t;
  if (const auto* r = std::get_if<Receive>(&t->node)) {
    TermPtr cont = simplify(r->continuation);
    if (cont == r->continuation) return t;
    return mkReceive(r->partner, r->operation, r->params, cont);
  }
  if (const auto* p = std::get_if<Parallel>(&t->node)) {
    std::vector<TermPtr> kids;
    for (const auto& c : p->children) {
      TermPtr s = simplify(c);
      if (std::holds_alternative<Nil>(s->node)) continue;
      if (const auto* nested = std::get_if<Parallel>(&s->node))
        kids.insert(kids.end(), nested->children.begin(), nested->children.end());
      else
        kids.push_back(s);
    }
    if (kids.empty()) return mkNil();
    if (kids.size() == 1) return kids.front();
    return mkParallel(std::move(kids));
  }
  if (const auto* c = std::get_if<Choice>(&t->node)) {
    std::vector<TermPtr> branches;
    branches.reserve(c->branches.size());
    for (const auto& b : c->branches) branches.push_back(simplify(b));
    if (branches.empty()) return mkNil();
    if (branches.size() == 1) return branches.front();
    return mkChoice(std::move(branches));
  }
  if (const auto* d = std::get_if<Delim>(&t->node)) {
    TermPtr body = simplify(d->body);
    if (std::holds_alternative<Nil>(body->node)) return mkNil();
    if (body == d->body) return t;
    return mkDelim(d->bound, d->kind, body, d->freshMarker);
  }
  if (const auto* pr = std::get_if<Protect>(&t->node)) {
    TermPtr body = simplify(pr->body);
    if (std::holds_alternative<Nil>(body->node)) return mkNil();
    if (body == pr->body) return t;
    return mkProtect(body);
  }
  const auto& rp = std::get<Replicate>(t->node);
  TermPtr body = simplify(rp.body);
  if (std::holds_alternative<Nil>(body->node)) return mkNil();
  if (body == rp.body) return t;
  return mkReplicate(body);
}

// --- sort resolution ---------------------------------------------------------

namespace {

// Does `x` occur as a kill label in t, outside any shadowing [x]?
bool killOccurs(const Name& x, const TermPtr& t) {
  if (const auto* k = std::get_if<Kill>(&t->node)) return k->label == x;
  if (const auto* r = std::get_if<Receive>(&t->node)) return killOccurs(x, r->continuation);
  if (const auto* p = std::get_if<Parallel>(&t->node)) {
    for (const auto& c : p->children)
      if (killOccurs(x, c)) return true;
    return false;
  }
  if (const auto* c = std::get_if<Choice>(&t->node)) {
    for (const auto& b : c->branches)
      if (killOccurs(x, b)) return true;
    return false;
  }
  if (const auto* d = std::get_if<Delim>(&t->node))
    return d->bound == x ? false : killOccurs(x, d->body);
  if (const auto* pr = std::get_if<Protect>(&t->node)) return killOccurs(x, pr->body);
  if (const auto* rp = std::get_if<Replicate>(&t->node)) return killOccurs(x, rp->body);
  return false;
}

// Does `x` occur in a receive-pattern position in t, outside any shadowing [x]?
bool patternOccurs(const Name& x, const TermPtr& t) {
  if (const auto* r = std::get_if<Receive>(&t->node)) {
    for (const auto& p : r->params) {
      if (const auto* bv = std::get_if<BindVar>(&p)) {
        if (bv->name == x) return true;
      } else {
        const auto& mv = std::get<MatchVal>(p);
        if (mv.value.isName() && mv.value.asName() == x) return true;
      }
    }
    return patternOccurs(x, r->continuation);
  }
  if (const auto* p = std::get_if<Parallel>(&t->node)) {
    for (const auto& c : p->children)
      if (patternOccurs(x, c)) return true;
    return false;
  }
  if (const auto* c = std::get_if<Choice>(&t->node)) {
    for (const auto& b : c->branches)
      if (patternOccurs(x, b)) return true;
    return false;
  }
  if (const auto* d = std::get_if<Delim>(&t->node))
    return d->bound == x ? false : patternOccurs(x, d->body);
  if (const auto* pr = std::get_if<Protect>(&t->node)) return patternOccurs(x, pr->body);
  if (const auto* rp = std::get_if<Replicate>(&t->node)) return patternOccurs(x, rp->body);
  return false;
}

enum class Sort { Variable, PrivateName, KillLabel };

struct SortScope {
  std::vector<std::pair<Name, Sort>> entries;

  const Sort* lookup(const Name& n) const {
    for (auto it = entries.rbegin(); it != entries.rend(); ++it)
      if (it->first == n) return &it->second;
    return nullptr;
  }
};

bool isVariable(const SortScope& scope, const Name& n) {
  const Sort* s = scope.lookup(n);
  return s && *s == Sort::Variable;
}

ExprPtr resortExpr(const ExprPtr& e, const SortScope& scope) {
  if (const auto* l = std::get_if<Lit>(&e->node)) {
    if (l->value.isName() && isVariable(scope, l->value.asName()))
      return mkVar(l->value.asName());
    return e;
  }
  if (const auto* v = std::get_if<VarRef>(&e->node)) {
    if (!isVariable(scope, v->name)) return mkLit(Value{v->name});
    return e;
  }
  const auto& g = std::get<GtExpr>(e->node);
  return mkGt(resortExpr(g.lhs, scope), resortExpr(g.rhs, scope));
}

Pattern resortPattern(const Pattern& p, const SortScope& scope) {
  if (const auto* bv = std::get_if<BindVar>(&p)) {
    if (!isVariable(scope, bv->name)) return MatchVal{Value{bv->name}};
    return p;
  }
  const auto& mv = std::get<MatchVal>(p);
  if (mv.value.isName() && isVariable(scope, mv.value.asName()))
    return BindVar{mv.value.asName()};
  return p;
}

TermPtr resortTerm(const TermPtr& t, SortScope& scope) {
  if (std::holds_alternative<Nil>(t->node) || std::holds_alternative<Kill>(t->node))
    return t;
  if (const auto* i = std::get_if<Invoke>(&t->node)) {
    std::vector<ExprPtr> args;
    args.reserve(i->args.size());
    for (const auto& a : i->args) args.push_back(resortExpr(a, scope));
    return mkInvoke(i->partner, i->operation, std::move(args));
  }
  if (const auto* r = std::get_if<Receive>(&t->node)) {
    std::vector<Pattern> params;
    params.reserve(r->params.size());
    for (const auto& p : r->params) params.push_back(resortPattern(p, scope));
    return mkReceive(r->partner, r->operation, std::move(params),
                     resortTerm(r->continuation, scope));
  }
  if (const auto* p = std::get_if<Parallel>(&t->node)) {
    std::vector<TermPtr> kids;
    kids.reserve(p->children.size());
    for (const auto& c : p->children) kids.push_back(resortTerm(c, scope));
    return mkParallel(std::move(kids));
  }
  if (const auto* c = std::get_if<Choice>(&t->node)) {
    std::vector<TermPtr> branches;
    branches.reserve(c->branches.size());
    for (const auto& b : c->branches) branches.push_back(resortTerm(b, scope));
    return mkChoice(std::move(branches));
  }
  if (const auto* d = std::get_if<Delim>(&t->node)) {
    DelimKind kind;
    if (d->freshMarker)
      kind = DelimKind::Name;
    else if (killOccurs(d->bound, d->body))
      kind = DelimKind::Kill;
    else if (patternOccurs(d->bound, d->body))
      kind = DelimKind::Var;
    else
      kind = DelimKind::Name;
    Sort s = kind == DelimKind::Var    ? Sort::Variable
             : kind == DelimKind::Kill ? Sort::KillLabel
                                       : Sort::PrivateName;
    scope.entries.emplace_back(d->bound, s);
    TermPtr body = resortTerm(d->body, scope);
    scope.entries.pop_back();
    return mkDelim(d->bound, kind, body, d->freshMarker);
  }
  if (const auto* pr = std::get_if<Protect>(&t->node))
    return mkProtect(resortTerm(pr->body, scope));
  if (const auto* rp = std::get_if<Replicate>(&t->node))
    return mkReplicate(resortTerm(rp->body, scope));
  const auto& call = std::get<Call>(t->node);
  std::vector<ExprPtr> args;
  args.reserve(call.args.size());
  for (const auto& a : call.args) args.push_back(resortExpr(a, scope));
  return mkCall(call.definition, std::move(args));
}

}  // namespace

TermPtr resolveSorts(const TermPtr& t, const std::vector<Name>& params) {
  SortScope scope;
  for (const auto& p : params) scope.entries.emplace_back(p, Sort::Variable);
  return resortTerm(t, scope);
}

void resolveSorts(Model& m) {
  for (auto& d : m.definitions) d.body = resolveSorts(d.body, d.params);
  m.main = resolveSorts(m.main, {});
}

}  // namespace cows
