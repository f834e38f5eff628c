#ifndef COWS_SCENARIO_HPP
#define COWS_SCENARIO_HPP

#include <cstdint>
#include <string>

#include "cows/logic.hpp"

namespace cows {

/// The four integers driving the tollbooth adaptation model: the estimated
/// adaptation time, its bound, the post-adaptation execution estimate and
/// the overall execution bound. Compared with `gt` only, so any integers
/// are legal.
struct TollboothParams {
  std::int64_t adaptEstimate = 0;
  std::int64_t adaptDeadline = 4;
  std::int64_t execEstimate = 10;
  std::int64_t execBound = 60;
};

/// Model text for the tollbooth scenario: the bundled source with the four
/// literals of the requestor's create invoke replaced by the parameters.
/// With default parameters this is exactly the shipped corpus file.
std::string tollboothSource(const TollboothParams& p = {});

/// Parse of tollboothSource(p).
Model buildTollbooth(const TollboothParams& p = {});

/// The three quality-of-service properties over the tollbooth endpoints:
/// every accepted request is eventually answered, a request can always be
/// accepted, and success stays reachable after every accepted request.
FormulaPtr responsivenessProp();
FormulaPtr availabilityProp();
FormulaPtr reliabilityProp();

}  // namespace cows

#endif
