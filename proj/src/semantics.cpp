#include "cows/semantics.hpp"

#include <algorithm>
#include <cassert>
#include <functional>
#include <set>
#include <sstream>
#include <tuple>

namespace cows {

// --- labels -------------------------------------------------------------------

std::string labelText(const Label& l) {
  if (const auto* c = std::get_if<CommLabel>(&l)) {
    std::string s = "comm:" + c->partner.text + "." + c->operation.text + "<";
    for (std::size_t i = 0; i < c->values.size(); ++i) {
      if (i) s += ",";
      s += valueText(c->values[i]);
    }
    return s + ">";
  }
  if (const auto* k = std::get_if<KillEvtLabel>(&l)) return "kill:" + k->label.text;
  return "tau";
}

bool labelEqual(const Label& a, const Label& b) { return labelText(a) == labelText(b); }

// --- expression evaluation -----------------------------------------------------

Value evalExpr(const ExprPtr& e, const std::map<Name, Value>& env) {
  if (const auto* l = std::get_if<Lit>(&e->node)) return l->value;
  if (const auto* v = std::get_if<VarRef>(&e->node)) {
    auto it = env.find(v->name);
    if (it == env.end())
      throw EvalError(EvalError::Kind::UnboundVariable,
                      "unbound variable '" + v->name.text + "'");
    return it->second;
  }
  const auto& g = std::get<GtExpr>(e->node);
  Value lhs = evalExpr(g.lhs, env);
  Value rhs = evalExpr(g.rhs, env);
  if (!lhs.isInt() || !rhs.isInt())
    throw EvalError(EvalError::Kind::TypeError, "'gt' requires integer operands");
  return Value{lhs.asInt() > rhs.asInt()};
}

// --- pattern matching -----------------------------------------------------------

std::optional<MatchResult> matchPatterns(const std::vector<Pattern>& patterns,
                                         const std::vector<Value>& values) {
  if (patterns.size() != values.size()) return std::nullopt;
  MatchResult res;
  for (std::size_t i = 0; i < patterns.size(); ++i) {
    if (const auto* bv = std::get_if<BindVar>(&patterns[i])) {
      bool rebound = false;
      for (const auto& [n, v] : res.bindings) {
        if (n == bv->name) {
          if (!(v == values[i])) return std::nullopt;
          rebound = true;
          break;
        }
      }
      if (!rebound) res.bindings.emplace_back(bv->name, values[i]);
    } else {
      if (!(std::get<MatchVal>(patterns[i]).value == values[i])) return std::nullopt;
      ++res.literalMatches;
    }
  }
  return res;
}

// --- substitution -----------------------------------------------------------------

namespace {

struct SubstSortError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Renames occurrences of `from` bound by the enclosing delim to `to`,
// stopping at shadowing delims.
TermPtr renameBound(const TermPtr& t, const Name& from, const Name& to) {
  auto rnName = [&](const Name& n) { return n == from ? to : n; };
  std::function<ExprPtr(const ExprPtr&)> rnExpr = [&](const ExprPtr& e) -> ExprPtr {
    if (const auto* l = std::get_if<Lit>(&e->node)) {
      if (l->value.isName() && l->value.asName() == from) return mkLit(Value{to});
      return e;
    }
    if (const auto* v = std::get_if<VarRef>(&e->node)) {
      if (v->name == from) return mkVar(to);
      return e;
    }
    const auto& g = std::get<GtExpr>(e->node);
    return mkGt(rnExpr(g.lhs), rnExpr(g.rhs));
  };
  std::function<TermPtr(const TermPtr&)> rn = [&](const TermPtr& u) -> TermPtr {
    if (std::holds_alternative<Nil>(u->node)) return u;
    if (const auto* i = std::get_if<Invoke>(&u->node)) {
      std::vector<ExprPtr> args;
      for (const auto& a : i->args) args.push_back(rnExpr(a));
      return mkInvoke(rnName(i->partner), rnName(i->operation), std::move(args));
    }
    if (const auto* r = std::get_if<Receive>(&u->node)) {
      std::vector<Pattern> pats;
      for (const auto& p : r->params) {
        if (const auto* bv = std::get_if<BindVar>(&p)) {
          pats.push_back(BindVar{rnName(bv->name)});
        } else {
          const auto& mv = std::get<MatchVal>(p);
          if (mv.value.isName() && mv.value.asName() == from)
            pats.push_back(MatchVal{Value{to}});
          else
            pats.push_back(p);
        }
      }
      return mkReceive(rnName(r->partner), rnName(r->operation), std::move(pats),
                       rn(r->continuation));
    }
    if (const auto* p = std::get_if<Parallel>(&u->node)) {
      std::vector<TermPtr> kids;
      for (const auto& c : p->children) kids.push_back(rn(c));
      return mkParallel(std::move(kids));
    }
    if (const auto* c = std::get_if<Choice>(&u->node)) {
      std::vector<TermPtr> branches;
      for (const auto& b : c->branches) branches.push_back(rn(b));
      return mkChoice(std::move(branches));
    }
    if (const auto* d = std::get_if<Delim>(&u->node)) {
      if (d->bound == from) return u;  // shadowed
      return mkDelim(d->bound, d->kind, rn(d->body), d->freshMarker);
    }
    if (const auto* k = std::get_if<Kill>(&u->node))
      return k->label == from ? mkKill(to) : u;
    if (const auto* pr = std::get_if<Protect>(&u->node)) return mkProtect(rn(pr->body));
    if (const auto* rp = std::get_if<Replicate>(&u->node))
      return mkReplicate(rn(rp->body));
    const auto& call = std::get<Call>(u->node);
    std::vector<ExprPtr> args;
    for (const auto& a : call.args) args.push_back(rnExpr(a));
    return mkCall(call.definition, std::move(args));
  };
  return rn(t);
}

Name substEndpointName(const Name& n, const std::map<Name, Value>& b) {
  auto it = b.find(n);
  if (it == b.end()) return n;
  if (!it->second.isName())
    throw SubstSortError("cannot substitute value '" + valueText(it->second) +
                         "' into endpoint position '" + n.text + "'");
  return it->second.asName();
}

ExprPtr substExpr(const ExprPtr& e, const std::map<Name, Value>& b) {
  if (std::holds_alternative<Lit>(e->node)) return e;
  if (const auto* v = std::get_if<VarRef>(&e->node)) {
    auto it = b.find(v->name);
    if (it != b.end()) return mkLit(it->second);
    return e;
  }
  const auto& g = std::get<GtExpr>(e->node);
  return mkGt(substExpr(g.lhs, b), substExpr(g.rhs, b));
}

TermPtr substCore(const TermPtr& t, const std::map<Name, Value>& b,
                  std::int64_t& fresh) {
  if (b.empty()) return t;
  if (std::holds_alternative<Nil>(t->node) || std::holds_alternative<Kill>(t->node))
    return t;
  if (const auto* i = std::get_if<Invoke>(&t->node)) {
    std::vector<ExprPtr> args;
    for (const auto& a : i->args) args.push_back(substExpr(a, b));
    return mkInvoke(substEndpointName(i->partner, b), substEndpointName(i->operation, b),
                    std::move(args));
  }
  if (const auto* r = std::get_if<Receive>(&t->node)) {
    std::vector<Pattern> pats;
    for (const auto& p : r->params) {
      if (const auto* bv = std::get_if<BindVar>(&p)) {
        auto it = b.find(bv->name);
        if (it != b.end()) {
          pats.push_back(MatchVal{it->second});  // instantiated binder
          continue;
        }
      }
      pats.push_back(p);
    }
    return mkReceive(substEndpointName(r->partner, b),
                     substEndpointName(r->operation, b), std::move(pats),
                     substCore(r->continuation, b, fresh));
  }
  if (const auto* p = std::get_if<Parallel>(&t->node)) {
    std::vector<TermPtr> kids;
    for (const auto& c : p->children) kids.push_back(substCore(c, b, fresh));
    return mkParallel(std::move(kids));
  }
  if (const auto* c = std::get_if<Choice>(&t->node)) {
    std::vector<TermPtr> branches;
    for (const auto& br : c->branches) branches.push_back(substCore(br, b, fresh));
    return mkChoice(std::move(branches));
  }
  if (const auto* d = std::get_if<Delim>(&t->node)) {
    std::map<Name, Value> inner = b;
    inner.erase(d->bound);  // shadowing
    if (inner.empty()) return t;
    bool captures = false;
    for (const auto& [x, v] : inner)
      if (v.isName() && v.asName() == d->bound) captures = true;
    if (!captures) return mkDelim(d->bound, d->kind, substCore(d->body, inner, fresh),
                                  d->freshMarker);
    Name renamed{d->bound.text + "~" + std::to_string(fresh++)};
    TermPtr body = renameBound(d->body, d->bound, renamed);
    return mkDelim(renamed, d->kind, substCore(body, inner, fresh), d->freshMarker);
  }
  if (const auto* pr = std::get_if<Protect>(&t->node))
    return mkProtect(substCore(pr->body, b, fresh));
  if (const auto* rp = std::get_if<Replicate>(&t->node))
    return mkReplicate(substCore(rp->body, b, fresh));
  const auto& call = std::get<Call>(t->node);
  std::vector<ExprPtr> args;
  for (const auto& a : call.args) args.push_back(substExpr(a, b));
  return mkCall(call.definition, std::move(args));
}

std::int64_t scanMaxFresh(const TermPtr& t);

std::int64_t freshIndexOf(const Name& n) {
  auto pos = n.text.rfind('~');
  if (pos == std::string::npos) return -1;
  try {
    return std::stoll(n.text.substr(pos + 1));
  } catch (...) {
    return -1;
  }
}

std::int64_t scanMaxFresh(const TermPtr& t) {
  std::int64_t best = -1;
  auto consider = [&](const Name& n) { best = std::max(best, freshIndexOf(n)); };
  std::function<void(const TermPtr&)> walk = [&](const TermPtr& u) {
    if (const auto* i = std::get_if<Invoke>(&u->node)) {
      consider(i->partner);
      consider(i->operation);
    } else if (const auto* r = std::get_if<Receive>(&u->node)) {
      consider(r->partner);
      consider(r->operation);
      walk(r->continuation);
    } else if (const auto* p = std::get_if<Parallel>(&u->node)) {
      for (const auto& c : p->children) walk(c);
    } else if (const auto* c = std::get_if<Choice>(&u->node)) {
      for (const auto& b : c->branches) walk(b);
    } else if (const auto* d = std::get_if<Delim>(&u->node)) {
      consider(d->bound);
      walk(d->body);
    } else if (const auto* k = std::get_if<Kill>(&u->node)) {
      consider(k->label);
    } else if (const auto* pr = std::get_if<Protect>(&u->node)) {
      walk(pr->body);
    } else if (const auto* rp = std::get_if<Replicate>(&u->node)) {
      walk(rp->body);
    }
  };
  walk(t);
  return best;
}

}  // namespace

TermPtr applySubstitution(const TermPtr& t, const std::map<Name, Value>& bindings) {
  std::int64_t fresh = scanMaxFresh(t) + 1;
  try {
    return substCore(t, bindings, fresh);
  } catch (const SubstSortError& e) {
    throw std::invalid_argument(e.what());
  }
}

// --- paths ----------------------------------------------------------------------

namespace {

using Path = std::vector<int>;

std::string pathKey(const Path& p) {
  std::string s;
  for (int i : p) {
    s += std::to_string(i);
    s += '.';
  }
  return s;
}

TermPtr getChild(const TermPtr& t, int i) {
  if (const auto* r = std::get_if<Receive>(&t->node)) return r->continuation;
  if (const auto* p = std::get_if<Parallel>(&t->node))
    return p->children[static_cast<std::size_t>(i)];
  if (const auto* c = std::get_if<Choice>(&t->node))
    return c->branches[static_cast<std::size_t>(i)];
  if (const auto* d = std::get_if<Delim>(&t->node)) return d->body;
  if (const auto* pr = std::get_if<Protect>(&t->node)) return pr->body;
  if (const auto* rp = std::get_if<Replicate>(&t->node)) return rp->body;
  assert(false && "node has no children");
  return mkNil();
}

TermPtr withChild(const TermPtr& t, int i, TermPtr sub) {
  if (const auto* r = std::get_if<Receive>(&t->node))
    return mkReceive(r->partner, r->operation, r->params, std::move(sub));
  if (const auto* p = std::get_if<Parallel>(&t->node)) {
    std::vector<TermPtr> kids = p->children;
    kids[static_cast<std::size_t>(i)] = std::move(sub);
    return mkParallel(std::move(kids));
  }
  if (const auto* c = std::get_if<Choice>(&t->node)) {
    std::vector<TermPtr> branches = c->branches;
    branches[static_cast<std::size_t>(i)] = std::move(sub);
    return mkChoice(std::move(branches));
  }
  if (const auto* d = std::get_if<Delim>(&t->node))
    return mkDelim(d->bound, d->kind, std::move(sub), d->freshMarker);
  if (std::holds_alternative<Protect>(t->node)) return mkProtect(std::move(sub));
  if (std::holds_alternative<Replicate>(t->node)) return mkReplicate(std::move(sub));
  assert(false && "node has no children");
  return mkNil();
}

TermPtr subtreeAt(const TermPtr& root, const Path& p, std::size_t from = 0) {
  if (from == p.size()) return root;
  return subtreeAt(getChild(root, p[from]), p, from + 1);
}

TermPtr replaceAt(const TermPtr& root, const Path& p, const TermPtr& sub,
                  std::size_t from = 0) {
  if (from == p.size()) return sub;
  return withChild(root, p[from], replaceAt(getChild(root, p[from]), p, sub, from + 1));
}

// --- endpoint collection ------------------------------------------------------

struct Binder {
  Name name;
  DelimKind kind;
  Path path;
  std::string key;
};

struct EnvStack {
  std::vector<Binder> binders;

  const Binder* lookup(const Name& n) const {
    for (auto it = binders.rbegin(); it != binders.rend(); ++it)
      if (it->name == n) return &*it;
    return nullptr;
  }
};

// Identity of a name for endpoint pairing: bound names pair by binder,
// free names by spelling.
std::string nameId(const EnvStack& env, const Name& n) {
  if (const Binder* b = env.lookup(n)) return "B:" + b->key;
  return "F:" + n.text;
}

std::string valueId(const EnvStack& env, const Value& v) {
  if (v.isInt()) return "i:" + std::to_string(v.asInt());
  if (v.isBool()) return v.asBool() ? "b:1" : "b:0";
  return "n:" + nameId(env, v.asName());
}

enum class ArgStatus { Ready, Pending, Fault };

struct EvaluatedArgs {
  ArgStatus status = ArgStatus::Ready;
  std::vector<Value> values;
  std::vector<std::string> ids;
  std::string fault;
};

struct RtValue {
  ArgStatus status = ArgStatus::Ready;
  Value value;
  std::string id;
  std::string fault;
};

RtValue evalRt(const EnvStack& env, const ExprPtr& e) {
  RtValue out;
  if (const auto* l = std::get_if<Lit>(&e->node)) {
    out.value = l->value;
    out.id = valueId(env, l->value);
    return out;
  }
  if (const auto* v = std::get_if<VarRef>(&e->node)) {
    const Binder* b = env.lookup(v->name);
    if (b && b->kind == DelimKind::Var) {
      out.status = ArgStatus::Pending;
      return out;
    }
    if (!b) {
      out.status = ArgStatus::Fault;
      out.fault = "unbound variable '" + v->name.text + "'";
      return out;
    }
    out.value = Value{v->name};  // private name used as a value
    out.id = valueId(env, out.value);
    return out;
  }
  const auto& g = std::get<GtExpr>(e->node);
  RtValue lhs = evalRt(env, g.lhs);
  RtValue rhs = evalRt(env, g.rhs);
  if (lhs.status == ArgStatus::Fault) return lhs;
  if (rhs.status == ArgStatus::Fault) return rhs;
  if (lhs.status == ArgStatus::Pending || rhs.status == ArgStatus::Pending) {
    out.status = ArgStatus::Pending;
    return out;
  }
  if (!lhs.value.isInt() || !rhs.value.isInt()) {
    out.status = ArgStatus::Fault;
    out.fault = "'gt' requires integer operands";
    return out;
  }
  out.value = Value{lhs.value.asInt() > rhs.value.asInt()};
  out.id = valueId(env, out.value);
  return out;
}

EvaluatedArgs evalArgs(const EnvStack& env, const std::vector<ExprPtr>& args) {
  EvaluatedArgs out;
  for (const auto& a : args) {
    RtValue v = evalRt(env, a);
    if (v.status == ArgStatus::Fault) {
      out.status = ArgStatus::Fault;
      out.fault = v.fault;
      return out;
    }
    if (v.status == ArgStatus::Pending) out.status = ArgStatus::Pending;
    out.values.push_back(v.value);
    out.ids.push_back(v.id);
  }
  return out;
}

struct Mat {
  Path at;
  TermPtr closedBody;
};

struct RtPattern {
  bool isBind = false;
  Name var;
  Path binderPath;
  Value matchValue;
  std::string matchId;
};

struct InvokeEp {
  Path path;
  std::vector<Mat> mats;
  Name partner, operation;
  std::string partnerId, opId;
  EvaluatedArgs args;
};

struct ReceiveEp {
  Path path;
  std::optional<Path> choicePath;
  std::vector<Mat> mats;
  Name partner, operation;
  std::string partnerId, opId;
  bool freeEndpoint = false;
  std::vector<RtPattern> pats;
  TermPtr continuation;
};

struct KillEp {
  Path delimPath;
  std::vector<Mat> mats;
  Name label;
};

struct CallEp {
  Path path;
  std::vector<Mat> mats;
  Name definition;
  EvaluatedArgs args;
};

struct Collected {
  std::vector<InvokeEp> invokes;
  std::vector<ReceiveEp> receives;
  std::vector<KillEp> kills;
  std::vector<CallEp> calls;
  std::set<std::string> diags;
  std::int64_t fresh = 0;
};

constexpr int kClosureBudget = 4096;
constexpr int kMaxReplicationDepth = 32;

TermPtr tauClosureTerm(TermPtr t, const Model& model, std::int64_t& fresh,
                       std::set<std::string>& diags, int& budget);

class Collector {
 public:
  Collector(const Model& model, std::int64_t fresh, int budget)
      : model_(model), budget_(budget) {
    out_.fresh = fresh;
  }

  Collected run(const TermPtr& t) {
    EnvStack env;
    walk(t, {}, env, {}, 0);
    return std::move(out_);
  }

 private:
  const Model& model_;
  Collected out_;
  int budget_;

  void walk(const TermPtr& t, Path path, EnvStack& env, std::vector<Mat> mats,
            int replDepth) {
    if (std::holds_alternative<Nil>(t->node)) return;
    if (const auto* i = std::get_if<Invoke>(&t->node)) {
      std::string pid = nameId(env, i->partner);
      std::string oid = nameId(env, i->operation);
      const Binder* pb = env.lookup(i->partner);
      const Binder* ob = env.lookup(i->operation);
      if ((pb && pb->kind == DelimKind::Var) || (ob && ob->kind == DelimKind::Var))
        return;  // endpoint awaits substitution
      EvaluatedArgs args = evalArgs(env, i->args);
      if (args.status == ArgStatus::Fault) {
        out_.diags.insert("stuck expression in invoke " + i->partner.text + "." +
                          i->operation.text + ": " + args.fault);
        return;
      }
      if (args.status == ArgStatus::Pending) return;
      out_.invokes.push_back(
          {std::move(path), std::move(mats), i->partner, i->operation, pid, oid, args});
      return;
    }
    if (std::holds_alternative<Receive>(t->node)) {
      addReceive(t, path, std::nullopt, env, mats);
      return;
    }
    if (const auto* p = std::get_if<Parallel>(&t->node)) {
      for (std::size_t k = 0; k < p->children.size(); ++k) {
        Path cp = path;
        cp.push_back(static_cast<int>(k));
        walk(p->children[k], std::move(cp), env, mats, replDepth);
      }
      return;
    }
    if (const auto* c = std::get_if<Choice>(&t->node)) {
      for (std::size_t k = 0; k < c->branches.size(); ++k) {
        if (!std::holds_alternative<Receive>(c->branches[k]->node)) continue;
        Path bp = path;
        bp.push_back(static_cast<int>(k));
        addReceive(c->branches[k], bp, path, env, mats);
      }
      return;
    }
    if (const auto* d = std::get_if<Delim>(&t->node)) {
      env.binders.push_back({d->bound, d->kind, path, pathKey(path)});
      Path bp = path;
      bp.push_back(0);
      walk(d->body, std::move(bp), env, mats, replDepth);
      env.binders.pop_back();
      return;
    }
    if (const auto* k = std::get_if<Kill>(&t->node)) {
      const Binder* b = env.lookup(k->label);
      if (!b) {
        out_.diags.insert("kill label '" + k->label.text + "' has no delimitation");
        return;
      }
      out_.kills.push_back({b->path, std::move(mats), k->label});
      return;
    }
    if (const auto* pr = std::get_if<Protect>(&t->node)) {
      Path bp = path;
      bp.push_back(0);
      walk(pr->body, std::move(bp), env, mats, replDepth);
      return;
    }
    if (const auto* rp = std::get_if<Replicate>(&t->node)) {
      if (replDepth >= kMaxReplicationDepth) {
        out_.diags.insert("replication unfolding exceeds depth bound");
        return;
      }
      TermPtr closed =
          tauClosureTerm(rp->body, model_, out_.fresh, out_.diags, budget_);
      std::vector<Mat> deeper = mats;
      deeper.push_back({path, closed});
      Path cp = path;
      cp.push_back(0);
      walk(closed, std::move(cp), env, std::move(deeper), replDepth + 1);
      return;
    }
    const auto& call = std::get<Call>(t->node);
    EvaluatedArgs args = evalArgs(env, call.args);
    if (args.status == ArgStatus::Fault) {
      out_.diags.insert("stuck expression in call " + call.definition.text + ": " +
                        args.fault);
      return;
    }
    if (args.status == ArgStatus::Pending) return;
    if (!model_.find(call.definition)) {
      out_.diags.insert("call to undefined '" + call.definition.text + "'");
      return;
    }
    out_.calls.push_back({std::move(path), std::move(mats), call.definition, args});
  }

  void addReceive(const TermPtr& t, Path path, std::optional<Path> choicePath,
                  EnvStack& env, std::vector<Mat> mats) {
    const auto& r = std::get<Receive>(t->node);
    const Binder* pb = env.lookup(r.partner);
    const Binder* ob = env.lookup(r.operation);
    if ((pb && pb->kind == DelimKind::Var) || (ob && ob->kind == DelimKind::Var))
      return;  // endpoint awaits substitution
    ReceiveEp ep;
    ep.path = std::move(path);
    ep.choicePath = std::move(choicePath);
    ep.mats = std::move(mats);
    ep.partner = r.partner;
    ep.operation = r.operation;
    ep.partnerId = nameId(env, r.partner);
    ep.opId = nameId(env, r.operation);
    ep.freeEndpoint = !pb && !ob;
    ep.continuation = r.continuation;
    for (const auto& p : r.params) {
      RtPattern rp;
      if (const auto* bv = std::get_if<BindVar>(&p)) {
        const Binder* b = env.lookup(bv->name);
        if (b && b->kind == DelimKind::Var) {
          rp.isBind = true;
          rp.var = bv->name;
          rp.binderPath = b->path;
        } else {
          // binder already resolved elsewhere; degrade to a literal match
          rp.matchValue = Value{bv->name};
          rp.matchId = valueId(env, rp.matchValue);
        }
      } else {
        rp.matchValue = std::get<MatchVal>(p).value;
        rp.matchId = valueId(env, rp.matchValue);
      }
      ep.pats.push_back(std::move(rp));
    }
    out_.receives.push_back(std::move(ep));
  }
};

// Finds active definition calls (outside replication) with ground arguments.
struct ActiveCall {
  Path path;
  Name definition;
  std::vector<Value> argValues;
};

void findActiveCalls(const TermPtr& t, Path path, EnvStack& env,
                     std::vector<ActiveCall>& out, std::set<std::string>& diags) {
  if (const auto* p = std::get_if<Parallel>(&t->node)) {
    for (std::size_t k = 0; k < p->children.size(); ++k) {
      Path cp = path;
      cp.push_back(static_cast<int>(k));
      findActiveCalls(p->children[k], std::move(cp), env, out, diags);
    }
    return;
  }
  if (const auto* d = std::get_if<Delim>(&t->node)) {
    env.binders.push_back({d->bound, d->kind, path, pathKey(path)});
    Path bp = path;
    bp.push_back(0);
    findActiveCalls(d->body, std::move(bp), env, out, diags);
    env.binders.pop_back();
    return;
  }
  if (const auto* pr = std::get_if<Protect>(&t->node)) {
    Path bp = path;
    bp.push_back(0);
    findActiveCalls(pr->body, std::move(bp), env, out, diags);
    return;
  }
  if (const auto* call = std::get_if<Call>(&t->node)) {
    EvaluatedArgs args = evalArgs(env, call->args);
    if (args.status == ArgStatus::Fault)
      diags.insert("stuck expression in call " + call->definition.text + ": " +
                   args.fault);
    if (args.status != ArgStatus::Ready) return;
    out.push_back({std::move(path), call->definition, std::move(args.values)});
    return;
  }
  // Receive continuations, choice branches and replicate bodies are dormant.
}

TermPtr unfoldCall(const Model& model, const Name& def,
                   const std::vector<Value>& argValues, std::int64_t& fresh,
                   std::set<std::string>& diags) {
  const Definition* d = model.find(def);
  if (!d) {
    diags.insert("call to undefined '" + def.text + "'");
    return nullptr;
  }
  if (d->params.size() != argValues.size()) {
    diags.insert("arity mismatch calling '" + def.text + "'");
    return nullptr;
  }
  std::map<Name, Value> bindings;
  for (std::size_t i = 0; i < d->params.size(); ++i)
    bindings.emplace(d->params[i], argValues[i]);
  try {
    return substCore(d->body, bindings, fresh);
  } catch (const SubstSortError& e) {
    diags.insert(std::string("stuck call '") + def.text + "': " + e.what());
    return nullptr;
  }
}

TermPtr tauClosureTerm(TermPtr t, const Model& model, std::int64_t& fresh,
                       std::set<std::string>& diags, int& budget) {
  for (;;) {
    std::vector<ActiveCall> calls;
    EnvStack env;
    findActiveCalls(t, {}, env, calls, diags);
    if (calls.empty()) break;
    bool progressed = false;
    for (const auto& c : calls) {
      if (budget <= 0) {
        diags.insert("definition unfolding exceeded bound (divergent recursion?)");
        return simplify(t);
      }
      TermPtr body = unfoldCall(model, c.definition, c.argValues, fresh, diags);
      if (!body) continue;
      t = replaceAt(t, c.path, body);
      --budget;
      progressed = true;
    }
    if (!progressed) break;
  }
  return simplify(t);
}

// --- transition construction ----------------------------------------------------

TermPtr applyMats(TermPtr t, const std::vector<Mat>& mats) {
  for (const auto& m : mats) {
    TermPtr repl = subtreeAt(t, m.at);
    assert(std::holds_alternative<Replicate>(repl->node));
    t = replaceAt(t, m.at, mkParallel({m.closedBody, repl}));
  }
  return t;
}

std::vector<Mat> mergeMats(const std::vector<Mat>& a, const std::vector<Mat>& b) {
  std::vector<Mat> merged = a;
  for (const auto& m : b) {
    bool dup = false;
    for (const auto& e : merged)
      if (e.at == m.at) dup = true;
    if (!dup) merged.push_back(m);
  }
  std::sort(merged.begin(), merged.end(),
            [](const Mat& x, const Mat& y) { return x.at.size() < y.at.size(); });
  return merged;
}

// halt: erase every unprotected activity in a killed scope; protected bodies
// survive with one protection layer removed; delimitations are kept as shells.
TermPtr halt(const TermPtr& t) {
  if (std::holds_alternative<Nil>(t->node)) return t;
  if (const auto* p = std::get_if<Parallel>(&t->node)) {
    std::vector<TermPtr> kids;
    for (const auto& c : p->children) kids.push_back(halt(c));
    return mkParallel(std::move(kids));
  }
  if (const auto* d = std::get_if<Delim>(&t->node))
    return mkDelim(d->bound, d->kind, halt(d->body), d->freshMarker);
  if (const auto* pr = std::get_if<Protect>(&t->node)) return pr->body;
  return mkNil();
}

struct RtMatchOutcome {
  std::vector<std::tuple<Name, Value, Path>> bindings;  // var, value, binder delim path
  int literalMatches = 0;
};

std::optional<RtMatchOutcome> tryMatch(const ReceiveEp& r, const InvokeEp& inv) {
  if (r.pats.size() != inv.args.values.size()) return std::nullopt;
  RtMatchOutcome out;
  for (std::size_t i = 0; i < r.pats.size(); ++i) {
    const RtPattern& p = r.pats[i];
    if (p.isBind) {
      bool seen = false;
      for (const auto& [n, v, bp] : out.bindings) {
        if (n == p.var) {
          if (valueText(v) != valueText(inv.args.values[i])) return std::nullopt;
          seen = true;
          break;
        }
      }
      if (!seen) out.bindings.emplace_back(p.var, inv.args.values[i], p.binderPath);
    } else {
      if (p.matchId != inv.args.ids[i]) return std::nullopt;
      ++out.literalMatches;
    }
  }
  return out;
}

}  // namespace

Config tauClosure(const Config& c, std::vector<std::string>& diagnostics) {
  std::set<std::string> diags;
  std::int64_t fresh = c.freshCounter;
  int budget = kClosureBudget;
  TermPtr t = tauClosureTerm(simplify(c.term), *c.model, fresh, diags, budget);
  diagnostics.insert(diagnostics.end(), diags.begin(), diags.end());
  return Config{c.model, t, fresh};
}

StepResult enabledTransitions(const Config& c) {
  StepResult result;
  Collector collector(*c.model, c.freshCounter, kClosureBudget);
  Collected col = collector.run(c.term);

  // Communications, best matches only per invoke occurrence.
  for (const auto& inv : col.invokes) {
    struct Candidate {
      const ReceiveEp* recv;
      RtMatchOutcome match;
    };
    std::vector<Candidate> candidates;
    int best = -1;
    for (const auto& recv : col.receives) {
      if (recv.partnerId != inv.partnerId || recv.opId != inv.opId) continue;
      if (auto m = tryMatch(recv, inv)) {
        best = std::max(best, m->literalMatches);
        candidates.push_back({&recv, std::move(*m)});
      }
    }
    for (const auto& cand : candidates) {
      if (cand.match.literalMatches != best) continue;
      std::int64_t fresh = col.fresh;
      TermPtr succ = applyMats(c.term, mergeMats(inv.mats, cand.recv->mats));
      succ = replaceAt(succ, inv.path, mkNil());
      succ = replaceAt(succ, cand.recv->choicePath ? *cand.recv->choicePath
                                                   : cand.recv->path,
                       cand.recv->continuation);
      // Instantiate binders innermost-first so ancestor paths stay valid.
      auto bindings = cand.match.bindings;
      std::sort(bindings.begin(), bindings.end(), [](const auto& a, const auto& b) {
        return std::get<2>(a).size() > std::get<2>(b).size();
      });
      bool ok = true;
      for (const auto& [var, value, delimPath] : bindings) {
        TermPtr sub = subtreeAt(succ, delimPath);
        const auto* d = std::get_if<Delim>(&sub->node);
        if (!d || !(d->bound == var)) {
          result.diagnostics.push_back("internal: binder mismatch for '" + var.text +
                                       "'");
          ok = false;
          break;
        }
        try {
          std::map<Name, Value> one{{var, value}};
          succ = replaceAt(succ, delimPath, substCore(d->body, one, fresh));
        } catch (const SubstSortError& e) {
          result.diagnostics.push_back(std::string("stuck substitution: ") + e.what());
          ok = false;
          break;
        }
      }
      if (!ok) continue;
      Label label = CommLabel{inv.partner, inv.operation, inv.args.values};
      result.transitions.push_back(
          {std::move(label), Config{c.model, simplify(succ), fresh}});
    }
  }

  // Kill events.
  for (const auto& k : col.kills) {
    TermPtr succ = applyMats(c.term, k.mats);
    TermPtr sub = subtreeAt(succ, k.delimPath);
    const auto* d = std::get_if<Delim>(&sub->node);
    if (!d) continue;
    succ = replaceAt(succ, k.delimPath,
                     mkDelim(d->bound, d->kind, halt(d->body), d->freshMarker));
    result.transitions.push_back(
        {KillEvtLabel{k.label}, Config{c.model, simplify(succ), col.fresh}});
  }

  // Definition-call unfolding.
  for (const auto& call : col.calls) {
    std::int64_t fresh = col.fresh;
    std::set<std::string> diags;
    TermPtr body = unfoldCall(*c.model, call.definition, call.args.values, fresh, diags);
    for (const auto& d : diags) result.diagnostics.push_back(d);
    if (!body) continue;
    TermPtr succ = applyMats(c.term, call.mats);
    succ = replaceAt(succ, call.path, body);
    result.transitions.push_back(
        {TauLabel{}, Config{c.model, simplify(succ), fresh}});
  }

  for (const auto& d : col.diags) result.diagnostics.push_back(d);
  return result;
}

bool receiveExposed(const Config& c, const Name& partner, const Name& operation) {
  Collector collector(*c.model, c.freshCounter, kClosureBudget);
  Collected col = collector.run(c.term);
  for (const auto& r : col.receives)
    if (r.freeEndpoint && r.partner == partner && r.operation == operation) return true;
  return false;
}

}  // namespace cows
