#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "boundarykit/grid.hpp"

namespace bk {

enum class Reduction {
    MeanOverValid, // default; keeps weighting comparable across image sizes
    Sum,
};

struct LossConfig {
    double lambda_edge = 0.1;       // weight of the edge term in the combined loss
    Reduction reduction = Reduction::MeanOverValid;
    double probability_floor = 1e-7; // probabilities are clamped to [eps, 1-eps]

    void validate() const; // throws ValidationError
};

struct LossValue {
    double total = 0.0;
    std::map<std::string, double> per_term;
    std::int64_t valid_pixel_count = 0;
};

/// Binary cross-entropy between a single-channel probability map and a
/// boolean target, returned with the conventional non-negative sign.
/// Probabilities outside [0,1] are a domain error.
LossValue edge_bce(const FeatureMap& pred, const BinaryMask& target, const LossConfig& cfg);

/// Per-pixel cross-entropy of C-channel class probabilities against integer
/// targets. Pixels labeled ignore_index are excluded from both the sum and
/// the count; an all-ignore target yields loss 0 with an "empty_support"
/// flag in per_term. Channel sums must be within 1e-4 of one.
LossValue seg_cross_entropy(const FeatureMap& pred, const LabelMap& target,
                            const LossConfig& cfg);

/// total = seg + lambda_edge * edge; both terms exposed in per_term.
LossValue combined_loss(const FeatureMap& seg_pred, const LabelMap& seg_target,
                        const FeatureMap& edge_pred, const BinaryMask& edge_target,
                        const LossConfig& cfg);

} // namespace bk
