#pragma once

#include <cstdint>
#include <vector>

#include "boundarykit/grid.hpp"

namespace bk {

/// Exact squared Euclidean distance to the nearest true pixel of `seeds`
/// (Felzenszwalb & Huttenlocher lower-envelope transform, two 1D passes).
/// Pixels of an all-false mask get +infinity.
std::vector<double> squared_euclidean_distance_transform(const BinaryMask& seeds);

/// Exact Chebyshev (chessboard) distance to the nearest true pixel, computed
/// with a forward/backward chamfer sweep over the 8-neighborhood. Pixels of
/// an all-false mask get a value larger than any possible image distance.
std::vector<std::int32_t> chebyshev_distance_transform(const BinaryMask& seeds);

} // namespace bk
