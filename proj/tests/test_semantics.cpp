#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <map>

#include "cows/parser.hpp"
#include "cows/printer.hpp"
#include "cows/scenario.hpp"
#include "cows/semantics.hpp"
#include "doctest.h"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace cows;

namespace {

std::shared_ptr<const Model> emptyModel() {
  static auto m = std::make_shared<Model>();
  return m;
}

Config termConfig(const std::string& source) {
  return Config{emptyModel(), parseTerm(source), 0};
}

std::vector<std::string> labelsOf(const StepResult& r) {
  std::vector<std::string> out;
  for (const auto& t : r.transitions) out.push_back(labelText(t.label));
  std::sort(out.begin(), out.end());
  return out;
}

// multiset of (label, successor canonical key)
std::vector<std::pair<std::string, std::string>> signatureOf(const StepResult& r) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& t : r.transitions)
    out.emplace_back(labelText(t.label), canonicalKey(t.target.term));
  std::sort(out.begin(), out.end());
  return out;
}

// an invoke on `partner` in active position (guarded continuations ignored)
bool containsInvokeOn(const TermPtr& t, const std::string& partner) {
  if (const auto* i = std::get_if<Invoke>(&t->node)) return i->partner.text == partner;
  if (const auto* p = std::get_if<Parallel>(&t->node)) {
    for (const auto& c : p->children)
      if (containsInvokeOn(c, partner)) return true;
    return false;
  }
  if (const auto* d = std::get_if<Delim>(&t->node)) return containsInvokeOn(d->body, partner);
  if (const auto* pr = std::get_if<Protect>(&t->node))
    return containsInvokeOn(pr->body, partner);
  if (const auto* rp = std::get_if<Replicate>(&t->node))
    return containsInvokeOn(rp->body, partner);
  return false;
}

}  // namespace

TEST_CASE("evalExpr") {
  std::map<Name, Value> env;
  CHECK(evalExpr(mkGt(mkLit(Value{0}), mkLit(Value{4})), env) == Value{false});
  CHECK(evalExpr(mkGt(mkLit(Value{5}), mkLit(Value{5})), env) == Value{false});
  CHECK(evalExpr(mkGt(mkLit(Value{70}), mkLit(Value{60})), env) == Value{true});
  env.emplace(Name{"X"}, Value{7});
  CHECK(evalExpr(mkVar(Name{"X"}), env) == Value{std::int64_t{7}});
  CHECK_THROWS_AS(evalExpr(mkVar(Name{"Y"}), env), EvalError);
  CHECK_THROWS_AS(evalExpr(mkGt(mkLit(Value{Name{"m"}}), mkLit(Value{1})), env),
                  EvalError);
  try {
    evalExpr(mkVar(Name{"Y"}), env);
  } catch (const EvalError& e) {
    CHECK(e.kind() == EvalError::Kind::UnboundVariable);
  }
}

TEST_CASE("matchPatterns") {
  std::vector<Pattern> pats{BindVar{Name{"X"}}, BindVar{Name{"Y"}}, BindVar{Name{"Z"}},
                            BindVar{Name{"XX"}}};
  std::vector<Value> vals{Value{0}, Value{4}, Value{10}, Value{60}};
  auto m = matchPatterns(pats, vals);
  REQUIRE(m.has_value());
  CHECK(m->literalMatches == 0);
  REQUIRE(m->bindings.size() == 4);
  CHECK(m->bindings[0].first.text == "X");
  CHECK(m->bindings[0].second == Value{std::int64_t{0}});
  CHECK(m->bindings[3].second == Value{std::int64_t{60}});

  auto m2 = matchPatterns({MatchVal{Value{true}}}, {Value{true}});
  REQUIRE(m2.has_value());
  CHECK(m2->bindings.empty());
  CHECK(m2->literalMatches == 1);

  CHECK_FALSE(matchPatterns({MatchVal{Value{true}}}, {Value{false}}).has_value());
  CHECK_FALSE(matchPatterns(pats, {Value{0}, Value{4}}).has_value());  // arity

  // a repeated binder unifies
  std::vector<Pattern> dup{BindVar{Name{"X"}}, BindVar{Name{"X"}}};
  CHECK(matchPatterns(dup, {Value{1}, Value{1}}).has_value());
  CHECK_FALSE(matchPatterns(dup, {Value{1}, Value{2}}).has_value());
}

TEST_CASE("applySubstitution basics") {
  // {X -> 0} into p.adaptime!<X,Y,Z,XX>
  std::vector<ExprPtr> args{mkVar(Name{"X"}), mkVar(Name{"Y"}), mkVar(Name{"Z"}),
                            mkVar(Name{"XX"})};
  TermPtr inv = mkInvoke(Name{"p"}, Name{"adaptime"}, args);
  TermPtr out = applySubstitution(inv, {{Name{"X"}, Value{0}}});
  const auto* i = std::get_if<Invoke>(&out->node);
  REQUIRE(i != nullptr);
  const auto* a0 = std::get_if<Lit>(&i->args[0]->node);
  REQUIRE(a0 != nullptr);
  CHECK(a0->value == Value{std::int64_t{0}});
  CHECK(std::holds_alternative<VarRef>(i->args[1]->node));

  // empty bindings: identity
  CHECK(alphaEqual(applySubstitution(inv, {}), inv));

  // shadowed binder left untouched
  TermPtr shadowed = mkDelim(Name{"X"}, DelimKind::Var,
                             mkInvoke(Name{"a"}, Name{"b"}, {mkVar(Name{"X"})}));
  TermPtr sub = applySubstitution(shadowed, {{Name{"X"}, Value{1}}});
  CHECK(alphaEqual(sub, shadowed));
}

TEST_CASE("applySubstitution avoids capture by renaming") {
  // substitute {X -> name n} into [n](a.b!<X> | n.q!<>)
  TermPtr t = mkDelim(Name{"n"}, DelimKind::Name,
                      mkParallel({mkInvoke(Name{"a"}, Name{"b"}, {mkVar(Name{"X"})}),
                                  mkInvoke(Name{"n"}, Name{"q"}, {})}));
  TermPtr out = applySubstitution(t, {{Name{"X"}, Value{Name{"n"}}}});
  const auto* d = std::get_if<Delim>(&out->node);
  REQUIRE(d != nullptr);
  CHECK(d->bound.text != "n");  // renamed
  const auto* par = std::get_if<Parallel>(&d->body->node);
  REQUIRE(par != nullptr);
  const auto* substituted = std::get_if<Invoke>(&par->children[0]->node);
  REQUIRE(substituted != nullptr);
  const auto* lit = std::get_if<Lit>(&substituted->args[0]->node);
  REQUIRE(lit != nullptr);
  CHECK(lit->value == Value{Name{"n"}});  // the free n we substituted in
  const auto* renamed = std::get_if<Invoke>(&par->children[1]->node);
  REQUIRE(renamed != nullptr);
  CHECK(renamed->partner == d->bound);  // bound occurrence follows the rename
}

TEST_CASE("initial tollbooth offers exactly the create communication") {
  Model m = buildTollbooth();
  auto model = std::make_shared<Model>(m);
  std::vector<std::string> diags;
  Config c0 = tauClosure(Config{model, m.main, 0}, diags);
  CHECK(diags.empty());
  StepResult r = enabledTransitions(c0);
  REQUIRE(r.transitions.size() == 1);
  CHECK(labelText(r.transitions[0].label) == "comm:serv.create<0,4,10,60>");
}

TEST_CASE("priority: literal match beats variable binding") {
  Config c = termConfig("[X] a.b?<X>.c.c!<> | a.b?<1>.d.d!<> | a.b!<1>");
  StepResult r = enabledTransitions(c);
  REQUIRE(r.transitions.size() == 1);
  CHECK(labelText(r.transitions[0].label) == "comm:a.b<1>");
  CHECK(containsInvokeOn(r.transitions[0].target.term, "d"));
  CHECK_FALSE(containsInvokeOn(r.transitions[0].target.term, "c"));
}

TEST_CASE("priority: equal scores both fire") {
  Config c = termConfig("a.b?<1>.c.c!<> | a.b?<1>.d.d!<> | a.b!<1>");
  StepResult r = enabledTransitions(c);
  CHECK(r.transitions.size() == 2);
}

TEST_CASE("priority is scoped per invoke occurrence") {
  Config c = termConfig("[X] a.b?<X>.c.c!<> | a.b?<1>.d.d!<> | a.b!<1> | a.b!<2>");
  StepResult r = enabledTransitions(c);
  // invoke <1>: literal receive wins; invoke <2>: only the binder matches
  auto labels = labelsOf(r);
  REQUIRE(labels.size() == 2);
  CHECK(labels[0] == "comm:a.b<1>");
  CHECK(labels[1] == "comm:a.b<2>");
  for (const auto& t : r.transitions) {
    if (labelText(t.label) == "comm:a.b<1>")
      CHECK(containsInvokeOn(t.target.term, "d"));
    else
      CHECK(containsInvokeOn(t.target.term, "c"));
  }
}

TEST_CASE("priority with mixed literal counts") {
  Config c = termConfig(
      "[X][Y][Z] a.b?<X,Y,Z>.c.c!<> | [X][Z] a.b?<X,1,Z>.d.d!<> | a.b!<5,1,7>");
  StepResult r = enabledTransitions(c);
  REQUIRE(r.transitions.size() == 1);
  CHECK(containsInvokeOn(r.transitions[0].target.term, "d"));
}

TEST_CASE("kill: unprotected activity erased, protection unwrapped once") {
  Config c = termConfig("[k] (kill(k) | a.b!<> | {| c.d!<> |})");
  StepResult r = enabledTransitions(c);
  REQUIRE(r.transitions.size() == 1);
  CHECK(labelText(r.transitions[0].label) == "kill:k");
  const TermPtr& succ = r.transitions[0].target.term;
  CHECK(containsInvokeOn(succ, "c"));
  CHECK_FALSE(containsInvokeOn(succ, "a"));
  // only the protected invoke remains after the kill
  StepResult r2 = enabledTransitions(r.transitions[0].target);
  CHECK(r2.transitions.empty());  // closed system: a lone invoke cannot move
}

TEST_CASE("kill: nested scopes erase only their own scope") {
  Config c = termConfig("[k1] ([k2] (kill(k2) | a.b!<>) | c.d!<>)");
  StepResult r = enabledTransitions(c);
  REQUIRE(r.transitions.size() == 1);
  CHECK(labelText(r.transitions[0].label) == "kill:k2");
  const TermPtr& succ = r.transitions[0].target.term;
  CHECK(containsInvokeOn(succ, "c"));
  CHECK_FALSE(containsInvokeOn(succ, "a"));
}

TEST_CASE("kill: protected-within-killed-within-protected") {
  Config c = termConfig("[k] (kill(k) | {| a.b!<> | {| c.d!<> |} |})");
  StepResult r = enabledTransitions(c);
  REQUIRE(r.transitions.size() == 1);
  TermPtr succ = r.transitions[0].target.term;
  // one protection layer is removed; the inner one survives intact
  CHECK(printTerm(succ).find("{| c.d!<> |}") != std::string::npos);
  CHECK(containsInvokeOn(succ, "a"));
  CHECK(containsInvokeOn(succ, "c"));
}

TEST_CASE("kill erases replication in scope") {
  Config c = termConfig("[k] (kill(k) | * a.b?<>.c.c!<>)");
  StepResult r = enabledTransitions(c);
  REQUIRE(r.transitions.size() == 1);
  CHECK_FALSE(receiveExposed(r.transitions[0].target, Name{"a"}, Name{"b"}));
}

TEST_CASE("kill leaves siblings outside the scope") {
  Config c = termConfig("[k] (kill(k) | a.b!<>) | c.d!<>");
  StepResult r = enabledTransitions(c);
  REQUIRE(r.transitions.size() == 1);
  const TermPtr& succ = r.transitions[0].target.term;
  CHECK(containsInvokeOn(succ, "c"));
  CHECK_FALSE(containsInvokeOn(succ, "a"));
}

TEST_CASE("kill does not suppress concurrent communication") {
  Config c = termConfig("[k] (kill(k) | {| a.b?<>.x.y!<> |} | a.b!<>)");
  StepResult r = enabledTransitions(c);
  auto labels = labelsOf(r);
  REQUIRE(labels.size() == 2);
  CHECK(labels[0] == "comm:a.b<>");
  CHECK(labels[1] == "kill:k");
}

TEST_CASE("replication: acting copy is materialized, replicate retained") {
  Config c = termConfig("* a.b?<>.c.d!<> | a.b!<>");
  StepResult r = enabledTransitions(c);
  REQUIRE(r.transitions.size() == 1);
  CHECK(labelText(r.transitions[0].label) == "comm:a.b<>");
  const TermPtr& succ = r.transitions[0].target.term;
  const auto* par = std::get_if<Parallel>(&succ->node);
  REQUIRE(par != nullptr);
  bool replicateKept = false;
  for (const auto& child : par->children)
    if (std::holds_alternative<Replicate>(child->node)) replicateKept = true;
  CHECK(replicateKept);
  CHECK(containsInvokeOn(succ, "c"));
  // the same receive is still exposed afterwards
  CHECK(receiveExposed(r.transitions[0].target, Name{"a"}, Name{"b"}));
}

TEST_CASE("replication: internal communication within one copy") {
  Config c = termConfig("* (a.b!<> | a.b?<>.c.d!<>)");
  StepResult r = enabledTransitions(c);
  REQUIRE(r.transitions.size() == 1);
  CHECK(labelText(r.transitions[0].label) == "comm:a.b<>");
  CHECK(containsInvokeOn(r.transitions[0].target.term, "c"));
}

TEST_CASE("replication: calls under replicate unfold lazily through actions") {
  Model m = parseModel("let f() = a.b?<>.c.d!<> in * f() | a.b!<> end");
  auto model = std::make_shared<Model>(m);
  std::vector<std::string> diags;
  Config c0 = tauClosure(Config{model, m.main, 0}, diags);
  // closure must not unfold the replicated call
  CHECK(canonicalKey(c0.term).find("L('f'") != std::string::npos);
  StepResult r = enabledTransitions(c0);
  REQUIRE(r.transitions.size() == 1);
  CHECK(labelText(r.transitions[0].label) == "comm:a.b<>");
  CHECK(containsInvokeOn(r.transitions[0].target.term, "c"));
}

TEST_CASE("stuck expression yields a diagnostic, not a transition") {
  Config c = termConfig("a.b!<1 gt m> | a.b?<true>.nil");
  StepResult r = enabledTransitions(c);
  CHECK(r.transitions.empty());
  REQUIRE(!r.diagnostics.empty());
  CHECK(r.diagnostics[0].find("gt") != std::string::npos);
}

TEST_CASE("pending variables silently disable an invoke") {
  // q.r!<X> waits for X; only the a.b communication is enabled
  Config c = termConfig("[X] (a.b?<X>.nil | q.r!<X>) | a.b!<5>");
  StepResult r = enabledTransitions(c);
  CHECK(r.diagnostics.empty());
  REQUIRE(r.transitions.size() == 1);
  CHECK(labelText(r.transitions[0].label) == "comm:a.b<5>");
  // after the binding, q.r!<5> becomes visible in the term
  CHECK(printTerm(r.transitions[0].target.term).find("q.r!<5>") != std::string::npos);
}

TEST_CASE("substitution reaches sibling receives in the same scope") {
  // after the first receive binds X to 1, the second receive matches only 1
  Config c = termConfig("[X] (a.b?<X>.nil | c.d?<X>.x.y!<>) | a.b!<1>");
  StepResult r = enabledTransitions(c);
  REQUIRE(r.transitions.size() == 1);
  std::string succ = printTerm(r.transitions[0].target.term);
  CHECK(succ.find("c.d?<1>") != std::string::npos);
}

TEST_CASE("determinism: equal configs give label-multiset-equal results") {
  const char* src = "[X] a.b?<X>.c.c!<> | a.b!<1> | a.b!<2> | [k](kill(k) | z.z!<>)";
  auto s1 = signatureOf(enabledTransitions(termConfig(src)));
  auto s2 = signatureOf(enabledTransitions(termConfig(src)));
  CHECK(s1 == s2);
}

TEST_CASE("transition oracle agreement (unit-sized sample)") {
  testgen::Rng rng(42);
  for (int i = 0; i < 300; ++i) {
    TermPtr t = testgen::randomOracleTerm(rng);
    CAPTURE(printTerm(t));
    Config c{emptyModel(), t, 0};
    auto got = signatureOf(enabledTransitions(c));
    auto want = oracle::oracleTransitions(t);
    std::vector<std::pair<std::string, std::string>> wantSig;
    for (const auto& w : want) wantSig.emplace_back(w.label, w.succKey);
    std::sort(wantSig.begin(), wantSig.end());
    CHECK(got == wantSig);
    if (got != wantSig) break;
  }
}

TEST_CASE("replication conservation under random contexts") {
  // any transition derived from a replicate keeps the replicate alongside
  testgen::Rng rng(99);
  for (int i = 0; i < 100; ++i) {
    testgen::TermGenCtx ctx;
    TermPtr body = testgen::genOracleTerm(rng, ctx, 2);
    TermPtr repl = simplify(mkReplicate(resolveSorts(body, {})));
    if (!std::holds_alternative<Replicate>(repl->node)) continue;  // inert body
    TermPtr t = resolveSorts(
        mkParallel({mkReplicate(body), testgen::genOracleTerm(rng, ctx, 2)}), {});
    Config c{emptyModel(), t, 0};
    StepResult r = enabledTransitions(c);
    std::string replKey = canonicalKey(repl);
    for (const auto& tr : r.transitions)
      CHECK(canonicalKey(tr.target.term).find(replKey) != std::string::npos);
  }
}
