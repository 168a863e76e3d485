#pragma once

// The middle-thirds Cantor set and its distribution function (the Devil's
// staircase), evaluated exactly on the binary expansion of a double.

#include <cstddef>

namespace floquetlab {

inline constexpr std::size_t kCantorDefaultDepth = 52;

// alpha(x) from the first `depth` ternary digits: the first digit 1 emits a
// binary 1 and stops, otherwise 2 -> 1 and 0 -> 0. Error <= 2^-depth.
double cantor_value(double x, std::size_t depth = kCantorDefaultDepth);

// sum_{k=1}^{depth} 2^{k-1}/3^k, the length removed after `depth` stages.
double removed_measure(std::size_t depth);

// True when x lies in the stage-`depth` Cantor set C_depth, allowing one ulp
// of x for representation error (so the double nearest 1/3 is a member).
// Endpoints such as 1/3 = 0.0222..._3 belong to the set.
bool in_cantor_set(double x, std::size_t depth = kCantorDefaultDepth);

}  // namespace floquetlab
