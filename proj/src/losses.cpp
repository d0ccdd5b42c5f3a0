#include "boundarykit/losses.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "boundarykit/errors.hpp"

namespace bk {

void LossConfig::validate() const {
    if (lambda_edge < 0.0)
        throw ValidationError("LossConfig: lambda_edge must be >= 0");
    if (!(probability_floor > 0.0 && probability_floor < 0.5))
        throw ValidationError("LossConfig: probability_floor must lie in (0, 0.5)");
}

namespace {

double reduce(double sum, std::int64_t count, Reduction reduction) {
    if (reduction == Reduction::Sum) return sum;
    return count > 0 ? sum / double(count) : 0.0;
}

} // namespace

LossValue edge_bce(const FeatureMap& pred, const BinaryMask& target, const LossConfig& cfg) {
    cfg.validate();
    pred.validate();
    target.validate();
    if (pred.channels != 1)
        throw ValidationError("edge_bce: prediction must be single-channel");
    require_same_dims(pred.height, pred.width, target.height, target.width,
                      "edge_bce: prediction vs target");

    const double eps = cfg.probability_floor;
    double sum = 0.0;
    for (std::size_t i = 0; i < pred.data.size(); ++i) {
        const double p_raw = pred.data[i];
        if (p_raw < 0.0 || p_raw > 1.0)
            throw ValidationError("edge_bce: prediction outside [0,1] at index " +
                                  std::to_string(i));
        const double p = std::clamp(p_raw, eps, 1.0 - eps);
        sum -= target.bits[i] ? std::log(p) : std::log(1.0 - p);
    }

    LossValue v;
    v.valid_pixel_count = std::int64_t(pred.data.size());
    v.total = reduce(sum, v.valid_pixel_count, cfg.reduction);
    v.per_term["edge"] = v.total;
    return v;
}

LossValue seg_cross_entropy(const FeatureMap& pred, const LabelMap& target,
                            const LossConfig& cfg) {
    cfg.validate();
    pred.validate();
    target.validate();
    if (pred.channels != target.num_classes)
        throw ValidationError("seg_cross_entropy: prediction channels (" +
                              std::to_string(pred.channels) + ") must equal num_classes (" +
                              std::to_string(target.num_classes) + ")");
    require_same_dims(pred.height, pred.width, target.height, target.width,
                      "seg_cross_entropy: prediction vs target");

    const int h = pred.height, w = pred.width, C = pred.channels;
    const std::size_t plane = std::size_t(h) * w;
    for (std::size_t i = 0; i < plane; ++i) {
        double s = 0.0;
        for (int c = 0; c < C; ++c) s += pred.data[std::size_t(c) * plane + i];
        if (std::abs(s - 1.0) > 1e-4)
            throw ValidationError("seg_cross_entropy: channel probabilities at pixel " +
                                  std::to_string(i) + " sum to " + std::to_string(s));
    }

    const double eps = cfg.probability_floor;
    double sum = 0.0;
    std::int64_t count = 0;
    for (std::size_t i = 0; i < plane; ++i) {
        const int t = target.data[i];
        if (t == target.ignore_index) continue;
        const double p = std::clamp(double(pred.data[std::size_t(t) * plane + i]), eps,
                                    1.0 - eps);
        sum -= std::log(p);
        ++count;
    }

    LossValue v;
    v.valid_pixel_count = count;
    v.total = reduce(sum, count, cfg.reduction);
    v.per_term["sem"] = v.total;
    if (count == 0) v.per_term["empty_support"] = 1.0;
    return v;
}

LossValue combined_loss(const FeatureMap& seg_pred, const LabelMap& seg_target,
                        const FeatureMap& edge_pred, const BinaryMask& edge_target,
                        const LossConfig& cfg) {
    const LossValue sem = seg_cross_entropy(seg_pred, seg_target, cfg);
    const LossValue edge = edge_bce(edge_pred, edge_target, cfg);

    LossValue v;
    v.total = sem.total + cfg.lambda_edge * edge.total;
    v.per_term["sem"] = sem.total;
    v.per_term["edge"] = edge.total;
    v.valid_pixel_count = sem.valid_pixel_count;
    if (sem.valid_pixel_count == 0) v.per_term["empty_support"] = 1.0;
    return v;
}

} // namespace bk
