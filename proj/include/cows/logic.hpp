#ifndef COWS_LOGIC_HPP
#define COWS_LOGIC_HPP

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cows/explorer.hpp"

namespace cows {

/// Transition-label filter for the next-step modalities. A wildcard
/// component matches anything; valuePatterns may be an arity wildcard `<*>`
/// or a positional list where each slot is a value or `*`. Only Comm labels
/// ever match.
struct ActionPattern {
  std::optional<Name> partner;    // nullopt = `*`
  std::optional<Name> operation;  // nullopt = `*`
  bool anyValues = false;         // `<*>`
  std::vector<std::optional<Value>> valuePatterns;

  bool matches(const Label& l) const;
};

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

struct FTrue {};
struct FNot { FormulaPtr sub; };
struct FAnd { FormulaPtr lhs, rhs; };
struct FOr { FormulaPtr lhs, rhs; };
struct FImplies { FormulaPtr lhs, rhs; };
struct FDiamond { ActionPattern pattern; FormulaPtr sub; };
struct FBox { ActionPattern pattern; FormulaPtr sub; };
struct FEF { FormulaPtr sub; };
struct FAF { FormulaPtr sub; };
struct FEG { FormulaPtr sub; };
struct FAG { FormulaPtr sub; };
struct FEU { FormulaPtr lhs, rhs; };
struct FAU { FormulaPtr lhs, rhs; };
struct FEnabled { Name partner, operation; };

struct Formula {
  std::variant<FTrue, FNot, FAnd, FOr, FImplies, FDiamond, FBox, FEF, FAF, FEG,
               FAG, FEU, FAU, FEnabled>
      node;
};

FormulaPtr fTrue();
FormulaPtr fNot(FormulaPtr f);
FormulaPtr fAnd(FormulaPtr a, FormulaPtr b);
FormulaPtr fOr(FormulaPtr a, FormulaPtr b);
FormulaPtr fImplies(FormulaPtr a, FormulaPtr b);
FormulaPtr fDiamond(ActionPattern p, FormulaPtr f);
FormulaPtr fBox(ActionPattern p, FormulaPtr f);
FormulaPtr fEF(FormulaPtr f);
FormulaPtr fAF(FormulaPtr f);
FormulaPtr fEG(FormulaPtr f);
FormulaPtr fAG(FormulaPtr f);
FormulaPtr fEU(FormulaPtr a, FormulaPtr b);
FormulaPtr fAU(FormulaPtr a, FormulaPtr b);
FormulaPtr fEnabled(Name partner, Name operation);

bool formulaEqual(const FormulaPtr& a, const FormulaPtr& b);

/// Grammar: `AG f`, `AF f`, `EF f`, `EG f`, `E[f U g]`, `A[f U g]`,
/// `<pat> f`, `[pat] f`, `enabled(p.o)`, `->`, `&`, `|`, `!`, `true`;
/// patterns `p.o<*>`, `p.o<v1,...>`, `*.*<*>`, positional `*` wildcards.
/// Throws ParseError with position on bad input.
FormulaPtr parseFormula(std::string_view source);

std::string printFormula(const FormulaPtr& f);

// --- checking -------------------------------------------------------------------

struct TraceStep {
  std::size_t src;
  Label label;
  std::size_t dst;
};

struct CheckResult {
  bool holds = false;
  /// Path from the initial state: a witness when the verdict is holds, a
  /// counterexample when it fails (best effort beyond the top operator).
  std::vector<TraceStep> evidence;
  /// States satisfying the top formula.
  std::vector<bool> satisfyingStates;
  bool unsoundTruncation = false;
  std::vector<std::string> warnings;
  std::size_t maxFixpointRounds = 0;
};

/// Global fixpoint model checking over the finite LTS. enabled() predicates
/// need term-backed states and throw std::invalid_argument otherwise.
CheckResult check(const Lts& l, const FormulaPtr& f);

/// Convenience: parse Aldebaran text and check. enabled() is unsupported
/// here (imported states carry no terms).
CheckResult checkFromAut(const std::string& autText, const FormulaPtr& f);

// --- property files ---------------------------------------------------------------

/// `.prop` stanza format: `prop <name>: <formula>` separated by blank
/// lines; `#` starts a comment. A formula may continue onto following
/// non-blank lines.
struct PropEntry {
  std::string name;
  FormulaPtr formula;
};

std::vector<PropEntry> parsePropFile(std::string_view source);

std::string traceText(const std::vector<TraceStep>& steps, std::size_t initial);

}  // namespace cows

#endif
