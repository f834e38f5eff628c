#ifndef COWS_AUT_HPP
#define COWS_AUT_HPP

#include <string>

#include "cows/explorer.hpp"

namespace cows {

/// Aldebaran text: header `des (0,<numTransitions>,<numStates>)` followed by
/// one `(src,"<label>",dst)` line per transition, in stored order. Output is
/// byte-deterministic for a given Lts.
std::string exportAut(const Lts& l);

/// Inverse of exportAut. The resulting Lts has no term backing, so state
/// predicates (enabled) cannot be evaluated on it. Throws ParseError on
/// malformed input.
Lts parseAut(const std::string& text);

}  // namespace cows

#endif
