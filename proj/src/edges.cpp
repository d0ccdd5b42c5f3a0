#include "boundarykit/edges.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>
#include <vector>

#include "boundarykit/errors.hpp"

namespace bk {

void EdgeExtractionConfig::validate() const {
    if (canny_sigma <= 0.0)
        throw ValidationError("EdgeExtractionConfig: canny_sigma must be > 0");
    if (!(canny_low < canny_high))
        throw ValidationError("EdgeExtractionConfig: canny_low must be < canny_high");
    if (canny_low <= 0.0)
        throw ValidationError("EdgeExtractionConfig: canny_low must be > 0");
}

namespace {

BinaryMask neighbor_difference(const LabelMap& labels) {
    const int h = labels.height, w = labels.width;
    BinaryMask edges(h, w);
    auto differs = [&](int a, int b) {
        return a != b && a != labels.ignore_index && b != labels.ignore_index;
    };
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const int c = labels.at(y, x);
            bool e = (x > 0 && differs(c, labels.at(y, x - 1))) ||
                     (x + 1 < w && differs(c, labels.at(y, x + 1))) ||
                     (y > 0 && differs(c, labels.at(y - 1, x))) ||
                     (y + 1 < h && differs(c, labels.at(y + 1, x)));
            edges.set(y, x, e);
        }
    }
    return edges;
}

// Separable Gaussian blur with replicate borders; constants stay constant.
std::vector<double> gaussian_blur(const std::vector<double>& img, int h, int w,
                                  double sigma) {
    const int radius = std::max(1, int(std::ceil(3.0 * sigma)));
    std::vector<double> kernel(2 * radius + 1);
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        kernel[i + radius] = std::exp(-0.5 * (i * i) / (sigma * sigma));
        sum += kernel[i + radius];
    }
    for (double& k : kernel) k /= sum;

    auto clampi = [](int v, int lo, int hi) { return v < lo ? lo : (v > hi ? hi : v); };

    std::vector<double> tmp(img.size()), out(img.size());
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int i = -radius; i <= radius; ++i)
                acc += kernel[i + radius] * img[std::size_t(y) * w + clampi(x + i, 0, w - 1)];
            tmp[std::size_t(y) * w + x] = acc;
        }
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int i = -radius; i <= radius; ++i)
                acc += kernel[i + radius] * tmp[std::size_t(clampi(y + i, 0, h - 1)) * w + x];
            out[std::size_t(y) * w + x] = acc;
        }
    return out;
}

// Canny on a {0,1} intensity image: blur, Sobel normalized to intensity units
// per pixel, 4-sector non-maximum suppression, 8-connected hysteresis.
BinaryMask canny_binary(const std::vector<double>& intensity, int h, int w,
                        const EdgeExtractionConfig& cfg) {
    const std::vector<double> smooth = gaussian_blur(intensity, h, w, cfg.canny_sigma);

    auto pix = [&](int y, int x) {
        y = std::clamp(y, 0, h - 1);
        x = std::clamp(x, 0, w - 1);
        return smooth[std::size_t(y) * w + x];
    };

    std::vector<double> mag(std::size_t(h) * w, 0.0);
    std::vector<double> gxv(mag.size()), gyv(mag.size());
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double gx = (pix(y - 1, x + 1) + 2 * pix(y, x + 1) + pix(y + 1, x + 1) -
                         pix(y - 1, x - 1) - 2 * pix(y, x - 1) - pix(y + 1, x - 1)) / 8.0;
            double gy = (pix(y + 1, x - 1) + 2 * pix(y + 1, x) + pix(y + 1, x + 1) -
                         pix(y - 1, x - 1) - 2 * pix(y - 1, x) - pix(y - 1, x + 1)) / 8.0;
            const std::size_t i = std::size_t(y) * w + x;
            gxv[i] = gx;
            gyv[i] = gy;
            mag[i] = std::hypot(gx, gy);
        }
    }

    auto mag_at = [&](int y, int x) {
        if (y < 0 || y >= h || x < 0 || x >= w) return 0.0;
        return mag[std::size_t(y) * w + x];
    };

    // NMS keeps plateau ties on both sides so straight boundaries retain the
    // pixel pair straddling the class change.
    std::vector<std::uint8_t> thin(mag.size(), 0);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const std::size_t i = std::size_t(y) * w + x;
            if (mag[i] < cfg.canny_low) continue;
            double angle = std::atan2(gyv[i], gxv[i]);
            if (angle < 0) angle += M_PI;
            int ddx, ddy;
            if (angle < M_PI / 8 || angle >= 7 * M_PI / 8) {
                ddx = 1; ddy = 0;
            } else if (angle < 3 * M_PI / 8) {
                ddx = 1; ddy = 1;
            } else if (angle < 5 * M_PI / 8) {
                ddx = 0; ddy = 1;
            } else {
                ddx = -1; ddy = 1;
            }
            if (mag[i] >= mag_at(y + ddy, x + ddx) && mag[i] >= mag_at(y - ddy, x - ddx))
                thin[i] = mag[i] >= cfg.canny_high ? 2 : 1; // 2 strong, 1 weak
        }
    }

    BinaryMask out(h, w);
    std::vector<std::size_t> stack;
    for (std::size_t i = 0; i < thin.size(); ++i)
        if (thin[i] == 2) {
            out.bits[i] = 1;
            stack.push_back(i);
        }
    while (!stack.empty()) {
        const std::size_t i = stack.back();
        stack.pop_back();
        const int y = int(i / w), x = int(i % w);
        for (int ny = y - 1; ny <= y + 1; ++ny)
            for (int nx = x - 1; nx <= x + 1; ++nx) {
                if (ny < 0 || ny >= h || nx < 0 || nx >= w) continue;
                const std::size_t j = std::size_t(ny) * w + nx;
                if (thin[j] == 1 && !out.bits[j]) {
                    out.bits[j] = 1;
                    stack.push_back(j);
                }
            }
    }
    return out;
}

} // namespace

BinaryMask dilate3x3(const BinaryMask& mask) {
    mask.validate();
    const int h = mask.height, w = mask.width;
    BinaryMask out(h, w);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            bool any = false;
            for (int ny = std::max(0, y - 1); !any && ny <= std::min(h - 1, y + 1); ++ny)
                for (int nx = std::max(0, x - 1); nx <= std::min(w - 1, x + 1); ++nx)
                    if (mask.get(ny, nx)) {
                        any = true;
                        break;
                    }
            out.set(y, x, any);
        }
    return out;
}

BinaryMask extract_semantic_edges(const LabelMap& labels, const EdgeExtractionConfig& cfg) {
    labels.validate();
    cfg.validate();

    if (cfg.method == EdgeMethod::NeighborDifference) return neighbor_difference(labels);

    const int h = labels.height, w = labels.width;
    std::set<int> classes;
    for (std::uint8_t v : labels.data)
        if (v != labels.ignore_index) classes.insert(v);

    BinaryMask merged(h, w);
    std::vector<double> intensity(std::size_t(h) * w);
    for (int c : classes) {
        for (std::size_t i = 0; i < intensity.size(); ++i)
            intensity[i] = labels.data[i] == c ? 1.0 : 0.0;
        BinaryMask per_class = canny_binary(intensity, h, w, cfg);
        for (std::size_t i = 0; i < merged.bits.size(); ++i)
            merged.bits[i] |= per_class.bits[i];
    }

    // Semantic restriction: keep responses only next to real label
    // transitions. This also removes class-to-ignore responses.
    const BinaryMask allowed = dilate3x3(neighbor_difference(labels));
    for (std::size_t i = 0; i < merged.bits.size(); ++i) merged.bits[i] &= allowed.bits[i];
    return merged;
}

FeatureMap edge_mask_to_probability(const BinaryMask& mask) {
    mask.validate();
    FeatureMap prob(1, mask.height, mask.width);
    for (std::size_t i = 0; i < mask.bits.size(); ++i)
        prob.data[i] = mask.bits[i] ? 1.0f : 0.0f;
    return prob;
}

BinaryMask probability_to_edge_mask(const FeatureMap& prob, double threshold) {
    prob.validate();
    if (prob.channels != 1)
        throw ValidationError("probability_to_edge_mask: expected a single channel");
    BinaryMask mask(prob.height, prob.width);
    for (std::size_t i = 0; i < mask.bits.size(); ++i)
        mask.bits[i] = prob.data[i] >= threshold ? 1 : 0;
    return mask;
}

} // namespace bk
