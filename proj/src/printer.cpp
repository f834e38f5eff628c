#include "cows/printer.hpp"

#include <sstream>

namespace cows {

namespace {

void writeExpr(std::ostream& os, const ExprPtr& e, bool parenGt) {
  if (const auto* l = std::get_if<Lit>(&e->node)) {
    os << valueText(l->value);
  } else if (const auto* v = std::get_if<VarRef>(&e->node)) {
    os << v->name.text;
  } else {
    const auto& g = std::get<GtExpr>(e->node);
    if (parenGt) os << '(';
    writeExpr(os, g.lhs, true);
    os << " gt ";
    writeExpr(os, g.rhs, true);
    if (parenGt) os << ')';
  }
}

void writePattern(std::ostream& os, const Pattern& p) {
  if (const auto* bv = std::get_if<BindVar>(&p))
    os << bv->name.text;
  else
    os << valueText(std::get<MatchVal>(p).value);
}

// Precedence levels: parallel < choice < prefix. Children are wrapped in
// parentheses whenever they sit in a tighter context than their own level.
enum class Ctx { Parallel, Choice, Prefix };

void writeTerm(std::ostream& os, const TermPtr& t, Ctx ctx) {
  if (std::holds_alternative<Nil>(t->node)) {
    os << "nil";
    return;
  }
  if (const auto* i = std::get_if<Invoke>(&t->node)) {
    os << i->partner.text << '.' << i->operation.text << "!<";
    for (std::size_t k = 0; k < i->args.size(); ++k) {
      if (k) os << ',';
      writeExpr(os, i->args[k], false);
    }
    os << '>';
    return;
  }
  if (const auto* r = std::get_if<Receive>(&t->node)) {
    os << r->partner.text << '.' << r->operation.text << "?<";
    for (std::size_t k = 0; k < r->params.size(); ++k) {
      if (k) os << ',';
      writePattern(os, r->params[k]);
    }
    os << ">.";
    writeTerm(os, r->continuation, Ctx::Prefix);
    return;
  }
  if (const auto* p = std::get_if<Parallel>(&t->node)) {
    bool paren = ctx != Ctx::Parallel;
    if (paren) os << '(';
    for (std::size_t k = 0; k < p->children.size(); ++k) {
      if (k) os << " | ";
      writeTerm(os, p->children[k], Ctx::Choice);
    }
    if (paren) os << ')';
    return;
  }
  if (const auto* c = std::get_if<Choice>(&t->node)) {
    // always parenthesized, as the listings do
    os << '(';
    for (std::size_t k = 0; k < c->branches.size(); ++k) {
      if (k) os << " + ";
      writeTerm(os, c->branches[k], Ctx::Prefix);
    }
    os << ')';
    return;
  }
  if (const auto* d = std::get_if<Delim>(&t->node)) {
    os << '[' << d->bound.text << (d->freshMarker ? "#] " : "] ");
    writeTerm(os, d->body, Ctx::Prefix);
    return;
  }
  if (const auto* k = std::get_if<Kill>(&t->node)) {
    os << "kill(" << k->label.text << ')';
    return;
  }
  if (const auto* pr = std::get_if<Protect>(&t->node)) {
    os << "{| ";
    writeTerm(os, pr->body, Ctx::Parallel);
    os << " |}";
    return;
  }
  if (const auto* rp = std::get_if<Replicate>(&t->node)) {
    os << "* ";
    writeTerm(os, rp->body, Ctx::Prefix);
    return;
  }
  const auto& call = std::get<Call>(t->node);
  os << call.definition.text << '(';
  for (std::size_t k = 0; k < call.args.size(); ++k) {
    if (k) os << ',';
    writeExpr(os, call.args[k], false);
  }
  os << ')';
}

}  // namespace

std::string printTerm(const TermPtr& t) {
  std::ostringstream os;
  writeTerm(os, t, Ctx::Parallel);
  return os.str();
}

std::string printExpr(const ExprPtr& e) {
  std::ostringstream os;
  writeExpr(os, e, false);
  return os.str();
}

std::string prettyPrint(const Model& m) {
  std::ostringstream os;
  os << "let\n";
  for (const auto& d : m.definitions) {
    os << '\n' << d.name.text << '(';
    for (std::size_t i = 0; i < d.params.size(); ++i) {
      if (i) os << ',';
      os << d.params[i].text;
    }
    os << ") =\n  " << printTerm(d.body) << '\n';
  }
  os << "\nin\n\n" << printTerm(m.main) << "\n\nend\n";
  return os.str();
}

// --- AST dump --------------------------------------------------------------

namespace {

void dumpExpr(std::ostream& os, const ExprPtr& e, int depth) {
  std::string pad(static_cast<std::size_t>(depth) * 2, ' ');
  if (const auto* l = std::get_if<Lit>(&e->node)) {
    os << pad << "lit " << valueText(l->value) << '\n';
  } else if (const auto* v = std::get_if<VarRef>(&e->node)) {
    os << pad << "var " << v->name.text << '\n';
  } else {
    const auto& g = std::get<GtExpr>(e->node);
    os << pad << "gt\n";
    dumpExpr(os, g.lhs, depth + 1);
    dumpExpr(os, g.rhs, depth + 1);
  }
}

void dumpTerm(std::ostream& os, const TermPtr& t, int depth) {
  std::string pad(static_cast<std::size_t>(depth) * 2, ' ');
  if (std::holds_alternative<Nil>(t->node)) {
    os << pad << "nil\n";
  } else if (const auto* i = std::get_if<Invoke>(&t->node)) {
    os << pad << "invoke " << i->partner.text << '.' << i->operation.text << '\n';
    for (const auto& a : i->args) dumpExpr(os, a, depth + 1);
  } else if (const auto* r = std::get_if<Receive>(&t->node)) {
    os << pad << "receive " << r->partner.text << '.' << r->operation.text << '\n';
    for (const auto& p : r->params) {
      if (const auto* bv = std::get_if<BindVar>(&p))
        os << pad << "  bind " << bv->name.text << '\n';
      else
        os << pad << "  match " << valueText(std::get<MatchVal>(p).value) << '\n';
    }
    os << pad << "  cont\n";
    dumpTerm(os, r->continuation, depth + 2);
  } else if (const auto* p = std::get_if<Parallel>(&t->node)) {
    os << pad << "parallel\n";
    for (const auto& c : p->children) dumpTerm(os, c, depth + 1);
  } else if (const auto* c = std::get_if<Choice>(&t->node)) {
    os << pad << "choice\n";
    for (const auto& b : c->branches) dumpTerm(os, b, depth + 1);
  } else if (const auto* d = std::get_if<Delim>(&t->node)) {
    os << pad << "delim " << d->bound.text << ' '
       << (d->kind == DelimKind::Var    ? "var"
           : d->kind == DelimKind::Kill ? "kill"
                                        : "name")
       << (d->freshMarker ? " fresh" : "") << '\n';
    dumpTerm(os, d->body, depth + 1);
  } else if (const auto* k = std::get_if<Kill>(&t->node)) {
    os << pad << "kill " << k->label.text << '\n';
  } else if (const auto* pr = std::get_if<Protect>(&t->node)) {
    os << pad << "protect\n";
    dumpTerm(os, pr->body, depth + 1);
  } else if (const auto* rp = std::get_if<Replicate>(&t->node)) {
    os << pad << "replicate\n";
    dumpTerm(os, rp->body, depth + 1);
  } else {
    const auto& call = std::get<Call>(t->node);
    os << pad << "call " << call.definition.text << '\n';
    for (const auto& a : call.args) dumpExpr(os, a, depth + 1);
  }
}

}  // namespace

std::string dumpAst(const Model& m) {
  std::ostringstream os;
  os << "model\n";
  for (const auto& d : m.definitions) {
    os << "  definition " << d.name.text << '\n';
    for (const auto& p : d.params) os << "    param " << p.text << '\n';
    os << "    body\n";
    dumpTerm(os, d.body, 3);
  }
  os << "  main\n";
  dumpTerm(os, m.main, 2);
  return os.str();
}

}  // namespace cows
