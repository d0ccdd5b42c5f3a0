#pragma once

#include "boundarykit/grid.hpp"

namespace bk {

enum class EdgeMethod {
    NeighborDifference, // exact on discrete maps, default
    Canny,
};

struct EdgeExtractionConfig {
    EdgeMethod method = EdgeMethod::NeighborDifference;
    double canny_sigma = 1.0; // Gaussian std in pixels
    double canny_low = 0.1;   // hysteresis thresholds on a 0-1 intensity scale
    double canny_high = 0.2;

    void validate() const; // throws ValidationError
};

/// Marks pixels that sit on a semantic boundary of the label map.
///
/// Neighbor-difference mode: a pixel is an edge iff any 4-neighbor carries a
/// different class index; pairs involving ignore_index never produce edges.
///
/// Canny mode: each class present in the map is turned into a {0,1} intensity
/// image and run through Gaussian blur, Sobel gradients, non-maximum
/// suppression (8-connected hysteresis); the per-class results are unioned
/// and restricted to the 3x3 neighborhood of label transitions, so only
/// semantic boundaries survive, never raw intensity edges and never
/// transitions into ignore regions.
BinaryMask extract_semantic_edges(const LabelMap& labels, const EdgeExtractionConfig& cfg);

/// Single-channel {0.0, 1.0} map; thresholding at 0.5 recovers the mask.
FeatureMap edge_mask_to_probability(const BinaryMask& mask);

/// Inverse of edge_mask_to_probability for any threshold in (0,1).
BinaryMask probability_to_edge_mask(const FeatureMap& prob, double threshold = 0.5);

/// True wherever the 3x3 neighborhood contains a true pixel.
BinaryMask dilate3x3(const BinaryMask& mask);

} // namespace bk
