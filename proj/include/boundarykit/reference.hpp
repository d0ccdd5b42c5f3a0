#pragma once

#include <vector>

#include "boundarykit/grid.hpp"
#include "boundarykit/losses.hpp"
#include "boundarykit/metrics.hpp"
#include "boundarykit/warp.hpp"

// Naive reference evaluators, deliberately written as direct nested loops
// over the defining formulas. They verify the fast implementations in the
// test suites and in `boundarykit selfcheck`; keep them independent of the
// code paths they check.
namespace bk::reference {

/// Direct evaluation of the backward-warp sum: for every output pixel,
/// enumerate the four integer neighbors of p + D(p) and combine them with
/// the bilinear kernel weights. Entirely in double.
std::vector<double> warp_gather(const FeatureMap& features, const DisplacementField& disp,
                                const WarpConfig& cfg);

/// Erosion as an O(H*W*side^2) window scan; outside the image counts as
/// background.
BinaryMask erode_scan(const BinaryMask& mask, int side);

/// Distance from every pixel to the nearest true seed by scanning all seeds.
/// Pixels of an empty seed set get +infinity.
std::vector<double> nearest_seed_distances(const BinaryMask& seeds, DistanceMetric metric);

/// Per-pixel binary cross-entropy summed in a plain double loop.
double edge_bce_sum(const FeatureMap& pred, const BinaryMask& target, double eps);

/// Cross-entropy summed over non-ignore pixels in a plain double loop.
double seg_cross_entropy_sum(const FeatureMap& pred, const LabelMap& target, double eps);

} // namespace bk::reference
