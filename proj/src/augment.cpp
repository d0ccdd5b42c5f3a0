#include "boundarykit/augment.hpp"

#include <algorithm>
#include <string>

#include "boundarykit/errors.hpp"

namespace bk {

void AugmentConfig::validate() const {
    if (pasteable_classes.empty())
        throw ValidationError("AugmentConfig: pasteable_classes must be nonempty");
    for (int c : pasteable_classes)
        if (c < 0 || c > 255)
            throw ValidationError("AugmentConfig: class index " + std::to_string(c) +
                                  " out of range");
    if (erode_side < 1 || erode_side % 2 == 0)
        throw ValidationError("AugmentConfig: erode_side must be odd and >= 1, got " +
                              std::to_string(erode_side));
    if (min_surviving_pixels < 0)
        throw ValidationError("AugmentConfig: min_surviving_pixels must be >= 0");
    if (subset_size && *subset_size < 1)
        throw ValidationError("AugmentConfig: subset_size must be >= 1 when set");
}

BinaryMask class_mask(const LabelMap& labels, int c) {
    labels.validate();
    if (c < 0 || c >= labels.num_classes)
        throw ValidationError("class_mask: class " + std::to_string(c) +
                              " not below num_classes " + std::to_string(labels.num_classes));
    BinaryMask mask(labels.height, labels.width);
    for (std::size_t i = 0; i < labels.data.size(); ++i)
        mask.bits[i] = labels.data[i] == c ? 1 : 0;
    return mask;
}

BinaryMask erode(const BinaryMask& mask, int side) {
    mask.validate();
    if (side < 1 || side % 2 == 0)
        throw ValidationError("erode: structuring element side must be odd and >= 1, got " +
                              std::to_string(side));
    const int h = mask.height, w = mask.width;
    const int r = side / 2;

    // Separable: a square window is all-true iff every row segment is, so run
    // a horizontal all-true pass followed by a vertical one. Windows that
    // leave the image fail outright.
    BinaryMask horiz(h, w);
    for (int y = 0; y < h; ++y) {
        int run = 0; // consecutive true pixels ending at x
        for (int x = 0; x < w; ++x) {
            run = mask.get(y, x) ? run + 1 : 0;
            if (x - 2 * r >= 0 && run >= side) horiz.set(y, x - r, true);
        }
    }
    BinaryMask out(h, w);
    for (int x = 0; x < w; ++x) {
        int run = 0;
        for (int y = 0; y < h; ++y) {
            run = horiz.get(y, x) ? run + 1 : 0;
            if (y - 2 * r >= 0 && run >= side) out.set(y - r, x, true);
        }
    }
    return out;
}

std::pair<BinaryMask, std::vector<int>> build_paste_mask(const LabelMap& pseudo,
                                                         const AugmentConfig& cfg, Rng& rng) {
    pseudo.validate();
    cfg.validate();

    std::vector<int> pool = cfg.pasteable_classes;
    std::sort(pool.begin(), pool.end());
    pool.erase(std::unique(pool.begin(), pool.end()), pool.end());
    for (int c : pool)
        if (c >= pseudo.num_classes)
            throw ValidationError("build_paste_mask: pasteable class " + std::to_string(c) +
                                  " not below num_classes");

    std::vector<int> subset;
    if (cfg.subset_size) {
        // Partial Fisher-Yates over the sorted pool.
        const int k = std::min<int>(*cfg.subset_size, int(pool.size()));
        std::vector<int> rest = pool;
        for (int i = 0; i < k; ++i) {
            const std::uint32_t j = rng.next_below(std::uint32_t(rest.size() - i)) + i;
            std::swap(rest[i], rest[j]);
            subset.push_back(rest[i]);
        }
        std::sort(subset.begin(), subset.end());
    } else {
        for (int c : pool)
            if (rng.next_unit() < 0.5) subset.push_back(c);
        if (subset.empty())
            subset.push_back(pool[rng.next_below(std::uint32_t(pool.size()))]);
    }

    BinaryMask merged(pseudo.height, pseudo.width);
    std::vector<int> surviving;
    for (int c : subset) {
        BinaryMask eroded = erode(class_mask(pseudo, c), cfg.erode_side);
        const std::int64_t n = std::int64_t(eroded.count_true());
        if (n < cfg.min_surviving_pixels || n == 0) continue;
        for (std::size_t i = 0; i < merged.bits.size(); ++i) merged.bits[i] |= eroded.bits[i];
        surviving.push_back(c);
    }
    return {std::move(merged), std::move(surviving)};
}

std::pair<RgbImage, LabelMap> paste(const RgbImage& dst_img, const LabelMap& dst_labels,
                                    const RgbImage& src_img, const LabelMap& src_pseudo,
                                    const BinaryMask& mask) {
    dst_img.validate();
    dst_labels.validate();
    src_img.validate();
    src_pseudo.validate();
    mask.validate();
    require_same_dims(dst_img.height, dst_img.width, dst_labels.height, dst_labels.width,
                      "paste: destination pair");
    require_same_dims(src_img.height, src_img.width, src_pseudo.height, src_pseudo.width,
                      "paste: source pair");
    require_same_dims(dst_img.height, dst_img.width, src_img.height, src_img.width,
                      "paste: destination vs source");
    require_same_dims(dst_img.height, dst_img.width, mask.height, mask.width,
                      "paste: mask");
    if (dst_labels.num_classes != src_pseudo.num_classes ||
        dst_labels.ignore_index != src_pseudo.ignore_index)
        throw ValidationError("paste: label maps disagree on num_classes or ignore_index");

    RgbImage out_img = dst_img;
    LabelMap out_labels = dst_labels;
    for (std::size_t i = 0; i < mask.bits.size(); ++i) {
        if (!mask.bits[i]) continue;
        out_labels.data[i] = src_pseudo.data[i];
        out_img.data[i * 3] = src_img.data[i * 3];
        out_img.data[i * 3 + 1] = src_img.data[i * 3 + 1];
        out_img.data[i * 3 + 2] = src_img.data[i * 3 + 2];
    }
    return {std::move(out_img), std::move(out_labels)};
}

std::tuple<RgbImage, LabelMap, PasteReport> synthesize_pair(
    const RgbImage& target_img, const LabelMap& target_pseudo, const RgbImage& dest_img,
    const LabelMap& dest_labels, const AugmentConfig& cfg) {
    Rng rng(cfg.seed);
    auto [mask, chosen] = build_paste_mask(target_pseudo, cfg, rng);

    PasteReport report;
    for (int c : chosen) {
        std::int64_t n = 0;
        for (std::size_t i = 0; i < mask.bits.size(); ++i)
            if (mask.bits[i] && target_pseudo.data[i] == c) ++n;
        report.chosen.emplace_back(c, n);
    }
    report.pasted_pixels = std::int64_t(mask.count_true());

    auto [img, labels] = paste(dest_img, dest_labels, target_img, target_pseudo, mask);
    return {std::move(img), std::move(labels), std::move(report)};
}

} // namespace bk
