#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <map>
#include <set>

#include "cows/aut.hpp"
#include "cows/parser.hpp"
#include "cows/scenario.hpp"
#include "doctest.h"

using namespace cows;

namespace {

std::vector<std::string> sortedLabels(const Lts& l) {
  std::vector<std::string> out;
  for (const auto& t : l.transitions) out.push_back(labelText(t.label));
  std::sort(out.begin(), out.end());
  return out;
}

bool hasCommOn(const Lts& l, const std::string& partner, const std::string& op) {
  for (const auto& t : l.transitions)
    if (const auto* c = std::get_if<CommLabel>(&t.label))
      if (c->partner.text == partner && c->operation.text == op) return true;
  return false;
}

std::set<std::string> stateKeys(const Lts& l) {
  std::set<std::string> keys;
  for (const auto& s : l.states) keys.insert(s.key);
  return keys;
}

}  // namespace

TEST_CASE("tollbooth defaults: a ten-state success chain") {
  Lts l = explore(buildTollbooth());
  CHECK(l.truncated == Truncation::None);
  CHECK(l.diagnostics.empty());
  CHECK(l.states.size() == 10);
  CHECK(l.transitions.size() == 9);

  // exactly one state offers the success signal and none the failure one
  int signalOkSources = 0;
  for (const auto& t : l.transitions)
    if (const auto* c = std::get_if<CommLabel>(&t.label)) {
      if (c->partner.text == "s" && c->operation.text == "signalOK") ++signalOkSources;
      CHECK_FALSE(c->operation.text == "signalFail");
    }
  CHECK(signalOkSources == 1);

  // single deadlock at the end of the chain
  std::vector<int> outdeg(l.states.size(), 0);
  for (const auto& t : l.transitions) ++outdeg[t.src];
  CHECK(std::count(outdeg.begin(), outdeg.end(), 0) == 1);
}

TEST_CASE("call-only model collapses under tau compression") {
  Model m = parseModel("let f() = nil in f() end");
  Lts compressed = explore(m);
  CHECK(compressed.states.size() == 1);
  CHECK(compressed.transitions.empty());

  ExploreOptions keep;
  keep.keepTau = true;
  Lts kept = explore(m, keep);
  CHECK(kept.states.size() == 2);
  REQUIRE(kept.transitions.size() == 1);
  CHECK(labelText(kept.transitions[0].label) == "tau");
}

TEST_CASE("failing adaptation-time parameters reach the failure signals") {
  Lts l = explore(buildTollbooth({5, 4, 10, 60}));
  CHECK(hasCommOn(l, "ser", "checkFail"));
  CHECK(hasCommOn(l, "s", "signalFail"));
  CHECK_FALSE(hasCommOn(l, "s", "signalOK"));
}

TEST_CASE("canonical invariance: permuted main gives the identical LTS") {
  Model m = buildTollbooth();
  Lts base = explore(m);

  Model permuted = m;
  const auto* par = std::get_if<Parallel>(&m.main->node);
  REQUIRE(par != nullptr);
  std::vector<TermPtr> reversed(par->children.rbegin(), par->children.rend());
  permuted.main = mkParallel(std::move(reversed));
  Lts other = explore(permuted);

  CHECK(other.states.size() == base.states.size());
  CHECK(sortedLabels(other) == sortedLabels(base));
  CHECK(stateKeys(other) == stateKeys(base));
  CHECK(exportAut(other) == exportAut(base));
}

TEST_CASE("canonical invariance: consistent binder renaming") {
  const char* a =
      "let in [i#](i.go!<1> | i.go?<1>.a.b!<>) | [X] a.b?<X>.nil end";
  const char* b =
      "let in [w#](w.go!<1> | w.go?<1>.a.b!<>) | [V] a.b?<V>.nil end";
  Lts la = explore(parseModel(a));
  Lts lb = explore(parseModel(b));
  CHECK(la.states.size() == lb.states.size());
  CHECK(la.transitions.size() == lb.transitions.size());
  // operation names are unchanged by the renaming; compare their multiset
  std::multiset<std::string> opsA, opsB;
  for (const auto& t : la.transitions)
    if (const auto* c = std::get_if<CommLabel>(&t.label)) opsA.insert(c->operation.text);
  for (const auto& t : lb.transitions)
    if (const auto* c = std::get_if<CommLabel>(&t.label)) opsB.insert(c->operation.text);
  CHECK(opsA == opsB);
}

TEST_CASE("reproducibility: byte-identical exports across runs and workers") {
  Model m = buildTollbooth();
  std::string a = exportAut(explore(m));
  std::string b = exportAut(explore(m));
  CHECK(a == b);

  ExploreOptions four;
  four.workers = 4;
  std::string c = exportAut(explore(m, four));
  CHECK(a == c);
}

TEST_CASE("truncation by state bound") {
  ExploreOptions o;
  o.maxStates = 3;
  Lts l = explore(buildTollbooth(), o);
  CHECK(l.truncated == Truncation::MaxStates);
  CHECK(l.states.size() == 3);
}

TEST_CASE("truncation by depth bound") {
  ExploreOptions o;
  o.maxDepth = 2;
  Lts l = explore(buildTollbooth(), o);
  CHECK(l.truncated == Truncation::MaxDepth);
  CHECK(l.states.size() == 3);  // chain depths 0,1,2
  CHECK(l.transitions.size() == 2);
}

TEST_CASE("monotone truncation: growing bounds grow the state set") {
  Model m = parseModel("let in a.b!<> | a.b?<>.nil | c.d!<> | c.d?<>.nil end");
  std::set<std::string> prev;
  for (std::size_t k = 1; k <= 5; ++k) {
    ExploreOptions o;
    o.maxStates = k;
    Lts l = explore(m, o);
    std::set<std::string> keys = stateKeys(l);
    CHECK(std::includes(keys.begin(), keys.end(), prev.begin(), prev.end()));
    prev = std::move(keys);
  }
  Lts full = explore(m);
  CHECK(full.states.size() == 4);  // independent pairs: a diamond
  CHECK(full.truncated == Truncation::None);
}

TEST_CASE("keep-tau exposes call unfolding without changing communications") {
  Model m = buildTollbooth();
  Lts compressed = explore(m);
  ExploreOptions keep;
  keep.keepTau = true;
  Lts kept = explore(m, keep);

  CHECK(kept.states.size() > compressed.states.size());
  bool hasTau = false;
  std::multiset<std::string> commKept, commCompressed;
  for (const auto& t : kept.transitions) {
    if (std::holds_alternative<TauLabel>(t.label))
      hasTau = true;
    else
      commKept.insert(labelText(t.label));
  }
  for (const auto& t : compressed.transitions) commCompressed.insert(labelText(t.label));
  CHECK(hasTau);
  CHECK(commKept == commCompressed);
}

TEST_CASE("exportAut format basics") {
  Lts empty;
  empty.states.resize(1);
  CHECK(exportAut(empty) == "des (0,0,1)\n");

  Lts two;
  two.states.resize(2);
  two.transitions.push_back({0, CommLabel{Name{"a"}, Name{"b"}, {Value{1}}}, 1});
  CHECK(exportAut(two) == "des (0,1,2)\n(0,\"comm:a.b<1>\",1)\n");
}

TEST_CASE("aut round-trip") {
  Lts l = explore(buildTollbooth());
  std::string text = exportAut(l);
  Lts back = parseAut(text);
  CHECK(back.states.size() == l.states.size());
  CHECK(back.transitions.size() == l.transitions.size());
  CHECK(exportAut(back) == text);
  CHECK_FALSE(back.hasTerms());
}

TEST_CASE("aut parse errors") {
  CHECK_THROWS_AS(parseAut(""), ParseError);
  CHECK_THROWS_AS(parseAut("des (0,1,1)\n"), ParseError);  // missing transition
  CHECK_THROWS_AS(parseAut("des (0,0,0)\n"), ParseError);  // no states
  CHECK_THROWS_AS(parseAut("des (0,1,2)\n(0,\"comm:a.b<1>\",5)\n"), ParseError);
  CHECK_THROWS_AS(parseAut("des (0,1,2)\n(0,\"weird\",1)\n"), ParseError);
  CHECK_NOTHROW(parseAut("des (0,1,2)\r\n(0,\"tau\",1)\r\n"));
  CHECK_NOTHROW(parseAut("des (0,2,2)\n(0,\"kill:k\",1)\n(1,\"comm:a.b<-3,true,m>\",0)\n"));
}

TEST_CASE("replicated create keeps the tollbooth receive exposed forever") {
  Lts l = explore(buildTollbooth());
  REQUIRE(l.hasTerms());
  for (const auto& s : l.states) {
    Config c{l.model, s.term, s.freshCounter};
    CHECK(receiveExposed(c, Name{"serv"}, Name{"create"}));
  }
}
