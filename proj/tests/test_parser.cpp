#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <fstream>
#include <random>
#include <sstream>

#include "cows/parser.hpp"
#include "cows/printer.hpp"
#include "doctest.h"
#include "support/generators.hpp"

using namespace cows;

namespace {

std::string readFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::string corpusPath(const char* name) {
  return std::string(COWS_CORPUS_DIR) + "/" + name;
}

const Definition& def(const Model& m, const char* name) {
  const Definition* d = m.find(Name{name});
  REQUIRE(d != nullptr);
  return *d;
}

}  // namespace

TEST_CASE("minimal model") {
  Model m = parseModel("let main() = nil in main() end");
  REQUIRE(m.definitions.size() == 1);
  CHECK(m.definitions[0].name.text == "main");
  CHECK(std::holds_alternative<Nil>(m.definitions[0].body->node));
  const auto* call = std::get_if<Call>(&m.main->node);
  REQUIRE(call != nullptr);
  CHECK(call->definition.text == "main");
  CHECK(call->args.empty());
}

TEST_CASE("gt in invoke argument") {
  Model m = parseModel("let f() = a.b!<1 gt 2> in f() end");
  const auto* inv = std::get_if<Invoke>(&def(m, "f").body->node);
  REQUIRE(inv != nullptr);
  REQUIRE(inv->args.size() == 1);
  const auto* g = std::get_if<GtExpr>(&inv->args[0]->node);
  REQUIRE(g != nullptr);
  const auto* l = std::get_if<Lit>(&g->lhs->node);
  const auto* r = std::get_if<Lit>(&g->rhs->node);
  REQUIRE(l != nullptr);
  REQUIRE(r != nullptr);
  CHECK(l->value == Value{std::int64_t{1}});
  CHECK(r->value == Value{std::int64_t{2}});
}

TEST_CASE("corpus parses with all definitions and a six-way main") {
  Model m = parseModel(readFile(corpusPath("tollbooth.cows")));
  for (const char* name :
       {"adaptManager", "requestor", "amcheck", "amcheck2", "Amcheck_gt_deadline",
        "Amcheck_le_deadline", "Amcheck_gt_deadline2", "Amcheck_le_deadline2"})
    CHECK(m.find(Name{name}) != nullptr);
  CHECK(m.definitions.size() == 8);
  const auto* par = std::get_if<Parallel>(&m.main->node);
  REQUIRE(par != nullptr);
  CHECK(par->children.size() == 6);
}

TEST_CASE("delimitation kinds are inferred from usage") {
  Model m = parseModel(readFile(corpusPath("tollbooth.cows")));

  // adaptManager: [X][Y][Z][XX] are variables, [YY] is a vacuous name
  const auto* am = std::get_if<Parallel>(&def(m, "adaptManager").body->node);
  REQUIRE(am != nullptr);
  const auto* repl = std::get_if<Replicate>(&am->children[0]->node);
  REQUIRE(repl != nullptr);
  const Term* walk = repl->body.get();
  std::vector<std::pair<std::string, DelimKind>> seen;
  while (const auto* d = std::get_if<Delim>(&walk->node)) {
    seen.emplace_back(d->bound.text, d->kind);
    walk = d->body.get();
  }
  REQUIRE(seen.size() == 5);
  CHECK(seen[0] == std::pair<std::string, DelimKind>{"X", DelimKind::Var});
  CHECK(seen[3] == std::pair<std::string, DelimKind>{"XX", DelimKind::Var});
  CHECK(seen[4] == std::pair<std::string, DelimKind>{"YY", DelimKind::Name});

  // amcheck2: [i#] is a fresh private name, [K] a vacuous name delim
  const auto* outer = std::get_if<Delim>(&def(m, "amcheck2").body->node);
  REQUIRE(outer != nullptr);
  const auto* inner = std::get_if<Delim>(&outer->body->node);
  REQUIRE(inner != nullptr);
  const auto* recv = std::get_if<Receive>(&inner->body->node);
  REQUIRE(recv != nullptr);
  const auto* di = std::get_if<Delim>(&recv->continuation->node);
  REQUIRE(di != nullptr);
  CHECK(di->bound.text == "i");
  CHECK(di->kind == DelimKind::Name);
  CHECK(di->freshMarker);
  const auto* dk = std::get_if<Delim>(&di->body->node);
  REQUIRE(dk != nullptr);
  CHECK(dk->bound.text == "K");
  CHECK(dk->kind == DelimKind::Name);
  CHECK_FALSE(dk->freshMarker);
}

TEST_CASE("kill delimitation inferred") {
  TermPtr t = parseTerm("[k] (kill(k) | a.b!<>)");
  const auto* d = std::get_if<Delim>(&t->node);
  REQUIRE(d != nullptr);
  CHECK(d->kind == DelimKind::Kill);
}

TEST_CASE("pattern sorts: literals, free names, bound variables, parameters") {
  Model m = parseModel(readFile(corpusPath("tollbooth.cows")));

  // requestor's launchFail branch matches the literal name repsvc
  const auto* rq = std::get_if<Parallel>(&def(m, "requestor").body->node);
  REQUIRE(rq != nullptr);
  const auto* choice = std::get_if<Choice>(&rq->children[2]->node);
  REQUIRE(choice != nullptr);
  const auto* branch = std::get_if<Receive>(&choice->branches[1]->node);
  REQUIRE(branch != nullptr);
  REQUIRE(branch->params.size() == 1);
  const auto* mv = std::get_if<MatchVal>(&branch->params[0]);
  REQUIRE(mv != nullptr);
  CHECK(mv->value == Value{Name{"repsvc"}});

  // boolean literals match literally
  Model m2 = parseModel("let in [i#] (i.go?<true>.nil + i.go?<false>.nil) end");
  const auto* d2 = std::get_if<Delim>(&m2.main->node);
  REQUIRE(d2 != nullptr);
  const auto* c2 = std::get_if<Choice>(&d2->body->node);
  REQUIRE(c2 != nullptr);
  const auto* b0 = std::get_if<Receive>(&c2->branches[0]->node);
  REQUIRE(b0 != nullptr);
  const auto* v0 = std::get_if<MatchVal>(&b0->params[0]);
  REQUIRE(v0 != nullptr);
  CHECK(v0->value == Value{true});

  // definition parameters bind in patterns
  Model m3 = parseModel("let g(X) = memory.assert?<X>.nil in g(1) end");
  const auto* r3 = std::get_if<Receive>(&def(m3, "g").body->node);
  REQUIRE(r3 != nullptr);
  CHECK(std::holds_alternative<BindVar>(r3->params[0]));
}

TEST_CASE("choice guardedness is a parse error") {
  CHECK_THROWS_AS(parseModel("let in nil + nil end"), ParseError);
  CHECK_THROWS_AS(parseModel("let in a.b!<> + c.d?<>.nil end"), ParseError);
  CHECK_NOTHROW(parseModel("let in a.b?<>.nil + c.d?<>.nil end"));
}

TEST_CASE("validation errors carry positions") {
  try {
    parseModel("let in\nf() end");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
    CHECK(std::string(e.what()).find("undefined") != std::string::npos);
  }
  try {
    parseModel("let f(X) = nil in f() end");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("arity") != std::string::npos);
  }
  CHECK_THROWS_AS(parseModel("let f() = nil f() = nil in f() end"), ParseError);
  CHECK_THROWS_AS(parseModel("let in kill(k) end"), ParseError);   // undelimited
  CHECK_THROWS_AS(parseModel("let in a.b!<1,> end"), ParseError);  // dangling comma
  try {
    parseModel("let in a.b!<> @ end");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 1);
    CHECK(e.column() > 1);
  }
}

TEST_CASE("expected-token sets are reported") {
  try {
    parseModel("let in a.b end");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    REQUIRE(!e.expected().empty());
    std::string joined;
    for (const auto& s : e.expected()) joined += s + " ";
    CHECK(joined.find("'!'") != std::string::npos);
    CHECK(joined.find("'?'") != std::string::npos);
  }
}

TEST_CASE("comments and CRLF line endings") {
  Model m = parseModel("let // a definition\r\nf() = nil // body\r\nin f() end\r\n");
  CHECK(m.definitions.size() == 1);
}

TEST_CASE("protection and kill syntax round-trip") {
  TermPtr t = parseTerm("[k] ({| a.b!<1> |} | kill(k))");
  const auto* d = std::get_if<Delim>(&t->node);
  REQUIRE(d != nullptr);
  TermPtr t2 = parseTerm(printTerm(t));
  CHECK(alphaEqual(t, t2));
}

TEST_CASE("pretty-print of nil model mentions nil") {
  Model m = parseModel("let in nil end");
  CHECK(prettyPrint(m).find("nil") != std::string::npos);
}

TEST_CASE("corpus round-trips through the pretty-printer") {
  Model m = parseModel(readFile(corpusPath("tollbooth.cows")));
  Model m2 = parseModel(prettyPrint(m));
  CHECK(alphaEqual(m, m2));
  // printing is a fixed point after one round
  CHECK(prettyPrint(m2) == prettyPrint(parseModel(prettyPrint(m2))));
}

TEST_CASE("500 generated models round-trip structurally") {
  testgen::Rng rng(20240817);
  for (int i = 0; i < 500; ++i) {
    Model m = testgen::randomModel(rng);
    std::string text = prettyPrint(m);
    CAPTURE(text);
    Model m2 = parseModel(text);
    CHECK(alphaEqual(m, m2));
  }
}

TEST_CASE("fuzz: parser is total over arbitrary bytes") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> lenDist(0, 160);
  std::uniform_int_distribution<int> byteDist(0, 255);
  // printable-biased pool makes deeper parses likely
  const std::string pool = "letinendnilgt()[]<>{}|+*!?.,#=abcXY01 \t\n";
  std::uniform_int_distribution<std::size_t> poolDist(0, pool.size() - 1);

  for (int i = 0; i < 10000; ++i) {
    std::string input;
    int len = lenDist(rng);
    bool biased = i % 2 == 0;
    for (int j = 0; j < len; ++j)
      input.push_back(biased ? pool[poolDist(rng)] : static_cast<char>(byteDist(rng)));
    try {
      parseModel(input);
    } catch (const ParseError&) {
      // fine: positioned rejection
    }
  }
  CHECK(true);  // reaching here means no crash and no foreign exception
}

TEST_CASE("deep nesting is rejected, not crashed on") {
  std::string deep = "let in ";
  for (int i = 0; i < 5000; ++i) deep += "(";
  deep += "nil";
  for (int i = 0; i < 5000; ++i) deep += ")";
  deep += " end";
  CHECK_THROWS_AS(parseModel(deep), ParseError);
}

TEST_CASE("dump-ast is deterministic and structured") {
  Model m = parseModel(readFile(corpusPath("tollbooth.cows")));
  std::string d1 = dumpAst(m);
  std::string d2 = dumpAst(parseModel(readFile(corpusPath("tollbooth.cows"))));
  CHECK(d1 == d2);
  CHECK(d1.rfind("model\n", 0) == 0);
  CHECK(d1.find("definition adaptManager") != std::string::npos);
  CHECK(d1.find("delim i name fresh") != std::string::npos);
}
