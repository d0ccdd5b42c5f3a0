#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "boundarykit/grid.hpp"
#include "boundarykit/rng.hpp"

namespace bk {

struct AugmentConfig {
    // Object classes eligible for pasting. For 19-class street scenes the
    // usual pool is the "things": pole, traffic light, traffic sign, person,
    // rider, car, truck, bus, train, motorcycle, bicycle.
    std::vector<int> pasteable_classes = {5, 6, 7, 11, 12, 13, 14, 15, 16, 17, 18};
    // When unset, each pasteable class joins the subset independently with
    // probability 0.5 (one forced if all were rejected). When set, exactly
    // min(subset_size, pool size) distinct classes are drawn.
    std::optional<int> subset_size;
    int erode_side = 5;             // structuring-element side, odd
    int min_surviving_pixels = 1;   // classes eroded below this are skipped
    std::uint64_t seed = 0;

    void validate() const; // throws ValidationError
};

struct PasteReport {
    std::vector<std::pair<int, std::int64_t>> chosen; // class -> surviving pixels
    std::int64_t pasted_pixels = 0;
};

/// Exact indicator of class c. Requires c < labels.num_classes.
BinaryMask class_mask(const LabelMap& labels, int c);

/// Binary erosion by a side x side square: a pixel survives iff the whole
/// window centered on it lies inside the mask. Windows leaving the image
/// count the outside as background, so survivors keep a full in-image
/// margin. side must be odd; side 1 is the identity.
BinaryMask erode(const BinaryMask& mask, int side);

/// Draws the class subset, erodes each chosen class mask and unions them.
/// Classes whose eroded mask falls below min_surviving_pixels are dropped
/// from the returned list. Deterministic given the rng state.
std::pair<BinaryMask, std::vector<int>> build_paste_mask(const LabelMap& pseudo,
                                                         const AugmentConfig& cfg, Rng& rng);

/// Piecewise composition: where mask is true the output pixel and label come
/// from the source pair, elsewhere from the destination pair.
std::pair<RgbImage, LabelMap> paste(const RgbImage& dst_img, const LabelMap& dst_labels,
                                    const RgbImage& src_img, const LabelMap& src_pseudo,
                                    const BinaryMask& mask);

/// build_paste_mask + paste, seeded from cfg.seed. Works both with a source
/// destination pair and with another target pair as destination.
std::tuple<RgbImage, LabelMap, PasteReport> synthesize_pair(
    const RgbImage& target_img, const LabelMap& target_pseudo, const RgbImage& dest_img,
    const LabelMap& dest_labels, const AugmentConfig& cfg);

} // namespace bk
