#include "cows/report.hpp"

#include <sstream>

namespace cows {

std::string truncationText(Truncation t) {
  switch (t) {
    case Truncation::None: return "none";
    case Truncation::MaxStates: return "max-states";
    case Truncation::MaxDepth: return "max-depth";
  }
  return "none";
}

std::string reportText(const RunReport& r, bool withTraces) {
  std::ostringstream os;
  os << "model: " << r.modelRef << "\n"
     << "states: " << r.numStates << "\n"
     << "transitions: " << r.numTransitions << "\n"
     << "truncated: " << truncationText(r.truncated) << "\n";
  for (const auto& v : r.verdicts) {
    os << v.name << ": " << (v.holds ? "HOLDS" : "FAILS") << "\n";
    if (withTraces && !v.trace.empty()) os << traceText(v.trace, 0);
  }
  return os.str();
}

std::string reportStructured(const RunReport& r) {
  std::ostringstream os;
  os << "model: " << r.modelRef << "\n";
  os << "max-states: " << r.maxStates << "\n";
  os << "max-depth: ";
  if (r.maxDepth)
    os << *r.maxDepth << "\n";
  else
    os << "unbounded\n";
  os << "keep-tau: " << (r.keepTau ? "true" : "false") << "\n";
  os << "workers: " << r.workers << "\n";
  os << "states: " << r.numStates << "\n";
  os << "transitions: " << r.numTransitions << "\n";
  os << "truncated: " << truncationText(r.truncated) << "\n";
  os << "duration-ms: " << r.durationMs << "\n";
  for (const auto& v : r.verdicts) {
    os << "prop: " << v.name << " " << (v.holds ? "HOLDS" : "FAILS") << "\n";
    for (const auto& s : v.trace)
      os << "trace: (" << s.src << ") " << labelText(s.label) << " (" << s.dst << ")\n";
  }
  return os.str();
}

}  // namespace cows
