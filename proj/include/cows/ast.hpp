#ifndef COWS_AST_HPP
#define COWS_AST_HPP

#include <cstdint>
#include <memory>
#include <string>
#include <variant>
#include <vector>

namespace cows {

/// Identifier used for partners, operations, variables, kill labels and
/// definition names. Valid spellings match [A-Za-z][A-Za-z0-9_]*; names
/// minted at runtime by alpha-renaming additionally carry a `~N` suffix,
/// which keeps them disjoint from anything the parser can produce.
struct Name {
  std::string text;

  Name() = default;
  Name(std::string t) : text(std::move(t)) {}
  Name(const char* t) : text(t) {}

  friend bool operator==(const Name& a, const Name& b) { return a.text == b.text; }
  friend bool operator!=(const Name& a, const Name& b) { return !(a == b); }
  friend bool operator<(const Name& a, const Name& b) { return a.text < b.text; }
};

/// Ground communicable value: integer, name or boolean.
struct Value {
  std::variant<std::int64_t, Name, bool> v;

  Value() : v(std::int64_t{0}) {}
  Value(std::int64_t i) : v(i) {}
  Value(int i) : v(std::int64_t{i}) {}
  Value(Name n) : v(std::move(n)) {}
  Value(bool b) : v(b) {}

  bool isInt() const { return std::holds_alternative<std::int64_t>(v); }
  bool isName() const { return std::holds_alternative<Name>(v); }
  bool isBool() const { return std::holds_alternative<bool>(v); }
  std::int64_t asInt() const { return std::get<std::int64_t>(v); }
  const Name& asName() const { return std::get<Name>(v); }
  bool asBool() const { return std::get<bool>(v); }

  friend bool operator==(const Value& a, const Value& b) { return a.v == b.v; }
  friend bool operator!=(const Value& a, const Value& b) { return !(a == b); }
};

std::string valueText(const Value& v);

// --- expressions --------------------------------------------------------

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Lit { Value value; };
struct VarRef { Name name; };
struct GtExpr { ExprPtr lhs, rhs; };

struct Expr {
  std::variant<Lit, VarRef, GtExpr> node;
};

ExprPtr mkLit(Value v);
ExprPtr mkVar(Name n);
ExprPtr mkGt(ExprPtr l, ExprPtr r);

// --- patterns -------------------------------------------------------------

struct BindVar { Name name; };
struct MatchVal { Value value; };

using Pattern = std::variant<BindVar, MatchVal>;

// --- terms ----------------------------------------------------------------

enum class DelimKind { Var, Name, Kill };

struct Term;
using TermPtr = std::shared_ptr<const Term>;

struct Nil {};
struct Invoke {
  Name partner, operation;
  std::vector<ExprPtr> args;
};
struct Receive {
  Name partner, operation;
  std::vector<Pattern> params;
  TermPtr continuation;  // never null; Nil when the source omits it
};
struct Parallel { std::vector<TermPtr> children; };
struct Choice { std::vector<TermPtr> branches; };  // each branch is a Receive
struct Delim {
  Name bound;
  DelimKind kind;
  bool freshMarker = false;  // source spelled [x#]
  TermPtr body;
};
struct Kill { Name label; };
struct Protect { TermPtr body; };
struct Replicate { TermPtr body; };
struct Call {
  Name definition;
  std::vector<ExprPtr> args;
};

struct Term {
  std::variant<Nil, Invoke, Receive, Parallel, Choice, Delim, Kill, Protect,
               Replicate, Call>
      node;
};

TermPtr mkNil();
TermPtr mkInvoke(Name p, Name o, std::vector<ExprPtr> args);
TermPtr mkReceive(Name p, Name o, std::vector<Pattern> params, TermPtr cont);
TermPtr mkParallel(std::vector<TermPtr> children);
TermPtr mkChoice(std::vector<TermPtr> branches);
TermPtr mkDelim(Name bound, DelimKind kind, TermPtr body, bool freshMarker = false);
TermPtr mkKill(Name label);
TermPtr mkProtect(TermPtr body);
TermPtr mkReplicate(TermPtr body);
TermPtr mkCall(Name def, std::vector<ExprPtr> args);

template <class T>
const T* as(const TermPtr& t) {
  return t ? std::get_if<T>(&t->node) : nullptr;
}

// --- model ------------------------------------------------------------------

struct Definition {
  Name name;
  std::vector<Name> params;
  TermPtr body;
};

struct Model {
  std::vector<Definition> definitions;  // source order
  TermPtr main;

  const Definition* find(const Name& n) const;
};

// --- structural utilities ---------------------------------------------------

/// Alpha-equivalence: structural equality up to consistent renaming of
/// Delim binders and definition parameters. Parallel/Choice child order is
/// significant here (this is syntactic identity, not congruence).
bool alphaEqual(const TermPtr& a, const TermPtr& b);
bool alphaEqual(const Model& a, const Model& b);

bool exprEqual(const ExprPtr& a, const ExprPtr& b);

/// Removes inert structure: flattens nested Parallel, drops Nil parallel
/// components, collapses empty/singleton Parallel and Choice, and prunes
/// Delim/Protect/Replicate whose body reduced to Nil. Semantics-preserving.
TermPtr simplify(const TermPtr& t);

/// Recomputes every Delim kind from usage, in source-rule order: a kill
/// occurrence wins, then a pattern-binder occurrence, otherwise the name is
/// a private name. Delims spelled [x#] are pinned to NameDelim. Then
/// re-sorts identifier occurrences (Var vs name literal, BindVar vs literal
/// match) against the final binder kinds and the given parameter scope.
TermPtr resolveSorts(const TermPtr& t, const std::vector<Name>& params);
void resolveSorts(Model& m);

}  // namespace cows

#endif
