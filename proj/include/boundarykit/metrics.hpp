#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <vector>

#include "boundarykit/grid.hpp"

namespace bk {

/// counts[g][p] = number of pixels with ground truth g predicted as p.
struct ConfusionMatrix {
    int num_classes = 0;
    std::vector<std::int64_t> counts; // row-major C x C

    ConfusionMatrix() = default;
    explicit ConfusionMatrix(int num_classes);

    std::int64_t& at(int gt, int pred) {
        return counts[std::size_t(gt) * num_classes + pred];
    }
    std::int64_t at(int gt, int pred) const {
        return counts[std::size_t(gt) * num_classes + pred];
    }
    std::int64_t total() const;
    ConfusionMatrix& operator+=(const ConfusionMatrix& other);
};

/// Adds one count per pixel where gt is not ignore and, if a region mask is
/// given, the region is true. Accumulation is plain integer addition, so it
/// is associative and order-independent over image sequences.
void accumulate(ConfusionMatrix& cm, const LabelMap& pred, const LabelMap& gt,
                const BinaryMask* region = nullptr);

struct MiouResult {
    std::vector<double> per_class; // meaningful only where present[c]
    std::vector<bool> present;     // false when union is empty (class absent)
    double mean = 0.0;
};

/// IoU_c = diag / (row + col - diag); classes with an empty union are
/// excluded from the mean and reported absent. An optional subset restricts
/// the mean to those classes. Raises DataError when no class is evaluable.
MiouResult miou(const ConfusionMatrix& cm,
                const std::optional<std::set<int>>& class_subset = std::nullopt);

enum class DistanceMetric { Euclidean, Chebyshev };

enum class BandConvention {
    PerSide,   // default: band reaches `bandwidth` pixels on each side of a boundary
    TotalWidth // band totals `bandwidth` pixels straddling the boundary
};

struct TrimapSpec {
    std::vector<int> bandwidths = {4, 8, 16, 20};
    DistanceMetric metric = DistanceMetric::Euclidean;
    BandConvention convention = BandConvention::PerSide;

    void validate() const; // throws ValidationError
};

/// Pixels within the given radius of a ground-truth semantic boundary.
/// Boundary pixels are the ignore-aware neighbor-difference edges, which mark
/// both sides of every class change; a pixel joins the band when its distance
/// to the nearest boundary pixel is strictly below the effective radius, so a
/// bandwidth of r covers exactly r pixel rows on each side of the change.
/// A map without boundaries yields an all-false band.
BinaryMask trimap_band(const LabelMap& gt, int radius, DistanceMetric metric,
                       BandConvention convention = BandConvention::PerSide);

struct TrimapBandResult {
    int bandwidth = 0;
    MiouResult result;
    std::int64_t evaluated_pixels = 0;
};

struct TrimapTable {
    std::vector<TrimapBandResult> bands;
    MiouResult global; // unrestricted mIoU over the same pairs
    std::int64_t global_pixels = 0;
};

/// Restricts the confusion accumulation to each trimap band and reports mIoU
/// per bandwidth, plus the unrestricted mIoU for comparison. Sequences must
/// be aligned and nonempty. Bands that never cover an evaluable pixel raise
/// DataError rather than reporting a silent zero.
TrimapTable trimap_miou(const std::vector<LabelMap>& preds, const std::vector<LabelMap>& gts,
                        const TrimapSpec& spec);

} // namespace bk
