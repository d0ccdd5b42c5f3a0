#include "boundarykit/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "boundarykit/distance_transform.hpp"
#include "boundarykit/edges.hpp"
#include "boundarykit/errors.hpp"

namespace bk {

ConfusionMatrix::ConfusionMatrix(int num_classes_)
    : num_classes(num_classes_), counts(std::size_t(num_classes_) * num_classes_, 0) {
    if (num_classes < 1)
        throw ValidationError("ConfusionMatrix: num_classes must be positive");
}

std::int64_t ConfusionMatrix::total() const {
    std::int64_t t = 0;
    for (std::int64_t c : counts) t += c;
    return t;
}

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& other) {
    if (other.num_classes != num_classes)
        throw ValidationError("ConfusionMatrix: class count mismatch in +=");
    for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += other.counts[i];
    return *this;
}

void accumulate(ConfusionMatrix& cm, const LabelMap& pred, const LabelMap& gt,
                const BinaryMask* region) {
    pred.validate();
    gt.validate();
    require_same_dims(pred.height, pred.width, gt.height, gt.width,
                      "accumulate: prediction vs ground truth");
    if (region)
        require_same_dims(region->height, region->width, gt.height, gt.width,
                          "accumulate: region mask");

    for (std::size_t i = 0; i < gt.data.size(); ++i) {
        const int g = gt.data[i];
        if (g == gt.ignore_index) continue;
        if (region && !region->bits[i]) continue;
        const int p = pred.data[i];
        if (g >= cm.num_classes)
            throw ValidationError("accumulate: ground-truth class " + std::to_string(g) +
                                  " exceeds matrix size");
        if (p >= cm.num_classes)
            throw ValidationError("accumulate: predicted class " + std::to_string(p) +
                                  " exceeds matrix size");
        ++cm.at(g, p);
    }
}

MiouResult miou(const ConfusionMatrix& cm, const std::optional<std::set<int>>& class_subset) {
    if (cm.num_classes < 1)
        throw ValidationError("miou: empty confusion matrix");
    if (class_subset)
        for (int c : *class_subset)
            if (c < 0 || c >= cm.num_classes)
                throw ValidationError("miou: subset class " + std::to_string(c) +
                                      " out of range");

    const int C = cm.num_classes;
    MiouResult r;
    r.per_class.assign(C, 0.0);
    r.present.assign(C, false);

    double sum = 0.0;
    int considered = 0;
    for (int c = 0; c < C; ++c) {
        std::int64_t row = 0, col = 0;
        for (int k = 0; k < C; ++k) {
            row += cm.at(c, k);
            col += cm.at(k, c);
        }
        const std::int64_t diag = cm.at(c, c);
        const std::int64_t uni = row + col - diag;
        if (uni == 0) continue; // class absent from both gt and prediction
        r.present[c] = true;
        r.per_class[c] = double(diag) / double(uni);
        if (!class_subset || class_subset->count(c)) {
            sum += r.per_class[c];
            ++considered;
        }
    }
    if (considered == 0)
        throw DataError("miou: no evaluable class (every union empty)");
    r.mean = sum / considered;
    return r;
}

void TrimapSpec::validate() const {
    if (bandwidths.empty())
        throw ValidationError("TrimapSpec: bandwidths must be nonempty");
    for (std::size_t i = 0; i < bandwidths.size(); ++i) {
        if (bandwidths[i] <= 0)
            throw ValidationError("TrimapSpec: bandwidths must be strictly positive");
        if (i > 0 && bandwidths[i] <= bandwidths[i - 1])
            throw ValidationError("TrimapSpec: bandwidths must be sorted ascending");
    }
}

BinaryMask trimap_band(const LabelMap& gt, int radius, DistanceMetric metric,
                       BandConvention convention) {
    if (radius < 1)
        throw ValidationError("trimap_band: radius must be >= 1");
    EdgeExtractionConfig edge_cfg; // neighbor-difference, ignore-aware
    const BinaryMask boundary = extract_semantic_edges(gt, edge_cfg);

    const double limit =
        convention == BandConvention::PerSide ? double(radius) : double(radius) / 2.0;

    BinaryMask band(gt.height, gt.width);
    if (boundary.count_true() == 0) return band;

    if (metric == DistanceMetric::Chebyshev) {
        const std::vector<std::int32_t> dist = chebyshev_distance_transform(boundary);
        for (std::size_t i = 0; i < band.bits.size(); ++i)
            band.bits[i] = double(dist[i]) < limit ? 1 : 0;
    } else {
        const std::vector<double> d2 = squared_euclidean_distance_transform(boundary);
        const double limit2 = limit * limit;
        for (std::size_t i = 0; i < band.bits.size(); ++i)
            band.bits[i] = d2[i] < limit2 ? 1 : 0;
    }
    return band;
}

TrimapTable trimap_miou(const std::vector<LabelMap>& preds, const std::vector<LabelMap>& gts,
                        const TrimapSpec& spec) {
    spec.validate();
    if (preds.empty() || preds.size() != gts.size())
        throw ValidationError("trimap_miou: prediction and ground-truth sequences must be "
                              "aligned and nonempty");

    int num_classes = 0;
    for (const LabelMap& gt : gts) num_classes = std::max(num_classes, gt.num_classes);
    for (const LabelMap& p : preds) num_classes = std::max(num_classes, p.num_classes);

    TrimapTable table;
    ConfusionMatrix global_cm(num_classes);
    for (std::size_t i = 0; i < preds.size(); ++i)
        accumulate(global_cm, preds[i], gts[i], nullptr);
    table.global = miou(global_cm);
    table.global_pixels = global_cm.total();

    for (int bw : spec.bandwidths) {
        ConfusionMatrix cm(num_classes);
        for (std::size_t i = 0; i < preds.size(); ++i) {
            const BinaryMask band = trimap_band(gts[i], bw, spec.metric, spec.convention);
            accumulate(cm, preds[i], gts[i], &band);
        }
        TrimapBandResult entry;
        entry.bandwidth = bw;
        entry.evaluated_pixels = cm.total();
        if (entry.evaluated_pixels == 0)
            throw DataError("trimap_miou: band " + std::to_string(bw) +
                            " covers no evaluable pixel (uniform ground truth?)");
        entry.result = miou(cm);
        table.bands.push_back(std::move(entry));
    }
    return table;
}

} // namespace bk
