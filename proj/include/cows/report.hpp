#ifndef COWS_REPORT_HPP
#define COWS_REPORT_HPP

#include <optional>
#include <string>
#include <vector>

#include "cows/logic.hpp"

namespace cows {

/// Outcome of one batch verification run, serializable as human-readable
/// text and as a line-oriented `key: value` document (see reportStructured).
struct PropVerdict {
  std::string name;
  bool holds = false;
  std::vector<TraceStep> trace;
};

struct RunReport {
  std::string modelRef;  // file path, "-" (stdin) or "scenario:<name>"
  std::size_t maxStates = 0;
  std::optional<std::size_t> maxDepth;
  bool keepTau = false;
  unsigned workers = 1;
  std::size_t numStates = 0;
  std::size_t numTransitions = 0;
  Truncation truncated = Truncation::None;
  double durationMs = 0.0;
  std::vector<PropVerdict> verdicts;
};

std::string truncationText(Truncation t);

/// Human-readable block, the CLI's default `check` output plus counts.
std::string reportText(const RunReport& r, bool withTraces);

/// Stable machine schema: one `key: value` per line. Keys:
///   model, max-states, max-depth, keep-tau, workers, states, transitions,
///   truncated, duration-ms, prop (repeated, `<name> HOLDS|FAILS`),
///   trace (repeated, one step per line, belongs to the preceding prop).
std::string reportStructured(const RunReport& r);

}  // namespace cows

#endif
