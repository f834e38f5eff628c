#ifndef COWS_SEMANTICS_HPP
#define COWS_SEMANTICS_HPP

#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "cows/ast.hpp"

namespace cows {

/// Runtime configuration: immutable definitions plus the current state of
/// the main term. freshCounter feeds alpha-renaming; minted names carry a
/// `~N` suffix and therefore cannot collide with parsed names.
struct Config {
  std::shared_ptr<const Model> model;
  TermPtr term;
  std::int64_t freshCounter = 0;
};

// --- transition labels -------------------------------------------------------

struct CommLabel {
  Name partner, operation;
  std::vector<Value> values;
};
struct KillEvtLabel { Name label; };
struct TauLabel {};

using Label = std::variant<CommLabel, KillEvtLabel, TauLabel>;

/// Stable rendering: `comm:partner.operation<v1,...,vn>`, `kill:k`, `tau`.
std::string labelText(const Label& l);
bool labelEqual(const Label& a, const Label& b);

// --- expression evaluation --------------------------------------------------

class EvalError : public std::runtime_error {
 public:
  enum class Kind { UnboundVariable, TypeError };
  EvalError(Kind k, std::string msg) : std::runtime_error(std::move(msg)), kind_(k) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

/// Evaluates an expression under an environment. Throws EvalError on an
/// unbound variable or a `gt` applied to non-integer operands.
Value evalExpr(const ExprPtr& e, const std::map<Name, Value>& env);

// --- pattern matching ---------------------------------------------------------

struct MatchResult {
  std::vector<std::pair<Name, Value>> bindings;  // in pattern order
  int literalMatches = 0;
};

/// COWS-style matching: NoMatch (nullopt) when arities differ or a literal
/// position disagrees; otherwise bindings for the variables plus the count
/// of matched literal positions (the priority measure).
std::optional<MatchResult> matchPatterns(const std::vector<Pattern>& patterns,
                                         const std::vector<Value>& values);

// --- substitution --------------------------------------------------------------

/// Replaces free variable occurrences by literal values; binders shadow and
/// captures are avoided by renaming the offending binder. A pattern binder
/// being instantiated turns into a literal match. Substituting a non-name
/// value into a partner/operation position throws std::invalid_argument.
TermPtr applySubstitution(const TermPtr& t, const std::map<Name, Value>& bindings);

// --- transitions -----------------------------------------------------------------

struct Transition {
  Label label;
  Config target;
};

struct StepResult {
  std::vector<Transition> transitions;
  std::vector<std::string> diagnostics;  // StuckExpr and closure warnings
};

/// Unfolds active definition calls (outside replication) until none remain,
/// bounded against divergent definitions. Applies simplify() to the result.
Config tauClosure(const Config& c, std::vector<std::string>& diagnostics);

/// All one-step successors of a configuration:
///   - a Comm per matched invoke/receive pair on the same endpoint, best
///     matches only (per invoke occurrence, by literal-match count);
///   - a KillEvt per active kill, erasing its delimitation scope except
///     protected bodies, which are unwrapped one level;
///   - a Tau per active definition call outside replication;
///   - replicated subterms act through a lazily materialized copy and are
///     retained unchanged alongside the residue.
/// Expression faults yield diagnostics instead of transitions.
StepResult enabledTransitions(const Config& c);

/// True when some receive prefix on the (free) endpoint partner.operation is
/// exposed in the configuration, counting receives under replication.
bool receiveExposed(const Config& c, const Name& partner, const Name& operation);

}  // namespace cows

#endif
