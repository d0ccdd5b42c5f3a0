#include "boundarykit/selfcheck.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "boundarykit/augment.hpp"
#include "boundarykit/distance_transform.hpp"
#include "boundarykit/edges.hpp"
#include "boundarykit/losses.hpp"
#include "boundarykit/metrics.hpp"
#include "boundarykit/reference.hpp"
#include "boundarykit/rng.hpp"
#include "boundarykit/upsample.hpp"
#include "boundarykit/warp.hpp"

namespace bk {

namespace {

std::string fmt(const char* format, double a, double b = 0.0) {
    char buf[160];
    std::snprintf(buf, sizeof buf, format, a, b);
    return buf;
}

FeatureMap random_features(Rng& rng, int c, int h, int w, double lo = -1.0, double hi = 1.0) {
    FeatureMap m(c, h, w);
    for (float& v : m.data) v = float(rng.next_in(lo, hi));
    return m;
}

DisplacementField random_disp(Rng& rng, int h, int w, double lo, double hi) {
    DisplacementField d(h, w);
    for (std::size_t i = 0; i < d.pixel_count(); ++i) {
        d.dx[i] = float(rng.next_in(lo, hi));
        d.dy[i] = float(rng.next_in(lo, hi));
    }
    return d;
}

// Displacements whose sample coordinates stay at least `margin` away from
// every integer, where the bilinear kernel is non-differentiable.
DisplacementField random_disp_off_lattice(Rng& rng, int h, int w, double margin) {
    DisplacementField d(h, w);
    auto off_lattice = [&](double v) {
        const double frac = v - std::floor(v);
        return frac > margin && frac < 1.0 - margin;
    };
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const std::size_t i = std::size_t(y) * w + x;
            do {
                d.dx[i] = float(rng.next_in(-2.0, 2.0));
            } while (!off_lattice(x + double(d.dx[i])));
            do {
                d.dy[i] = float(rng.next_in(-2.0, 2.0));
            } while (!off_lattice(y + double(d.dy[i])));
        }
    return d;
}

LabelMap random_labels(Rng& rng, int h, int w, int num_classes, int rect_count) {
    LabelMap m(h, w, num_classes, 255, 0);
    for (int r = 0; r < rect_count; ++r) {
        const int c = int(rng.next_below(std::uint32_t(num_classes)));
        const int y0 = int(rng.next_below(std::uint32_t(h)));
        const int x0 = int(rng.next_below(std::uint32_t(w)));
        const int y1 = std::min(h, y0 + 1 + int(rng.next_below(std::uint32_t(h / 2 + 1))));
        const int x1 = std::min(w, x0 + 1 + int(rng.next_below(std::uint32_t(w / 2 + 1))));
        for (int y = y0; y < y1; ++y)
            for (int x = x0; x < x1; ++x) m.at(y, x) = std::uint8_t(c);
    }
    return m;
}

BinaryMask random_mask(Rng& rng, int h, int w, double density) {
    BinaryMask m(h, w);
    for (auto& b : m.bits) b = rng.next_unit() < density ? 1 : 0;
    return m;
}

RgbImage random_image(Rng& rng, int h, int w) {
    RgbImage img(h, w);
    for (auto& v : img.data) v = std::uint8_t(rng.next_below(256));
    return img;
}

// ---- criterion checks ----------------------------------------------------

CheckResult check_warp_oracle() {
    Rng rng(101);
    double worst = 0.0;
    for (int i = 0; i < 25; ++i) {
        const int c = 1 + int(rng.next_below(4));
        const int h = 2 + int(rng.next_below(11));
        const int w = 2 + int(rng.next_below(11));
        const FeatureMap features = random_features(rng, c, h, w);
        const DisplacementField disp = random_disp(rng, h, w, -2.0, 2.0);
        const WarpConfig cfg{i % 2 == 0 ? BorderMode::Clamp : BorderMode::Zeros};
        const FeatureMap got = warp(features, disp, cfg);
        const std::vector<double> want = reference::warp_gather(features, disp, cfg);
        for (std::size_t k = 0; k < want.size(); ++k)
            worst = std::max(worst, std::abs(double(got.data[k]) - want[k]));
    }
    return {"warp-oracle", worst < 1e-6, fmt("max abs err %.3e (tol 1e-6)", worst)};
}

CheckResult check_gradients() {
    const GradcheckSummary g = run_warp_gradcheck(2024, 1e-3, 1e-3, 5);
    return {"warp-gradients", g.passed,
            fmt("worst rel err %.3e, worst adjoint gap %.3e",
                std::max(g.worst_rel_features, g.worst_rel_disp), g.worst_adjoint)};
}

CheckResult check_identity() {
    Rng rng(7);
    bool ok = true;
    for (int i = 0; i < 5; ++i) {
        const int c = 1 + int(rng.next_below(3));
        const int h = 2 + int(rng.next_below(6));
        const int w = 2 + int(rng.next_below(6));
        const FeatureMap coarse = random_features(rng, c, h, w);
        const DisplacementField zero(h * 2, w * 2);
        const FeatureMap up = bilinear_upsample(coarse, h * 2, w * 2);
        const FeatureMap refined = refine(coarse, zero, {});
        ok = ok && refined.data == up.data;

        const DisplacementField zero_same(h, w);
        const FeatureMap same = warp(coarse, zero_same, {});
        ok = ok && same.data == coarse.data;
    }
    return {"identity-composition", ok,
            ok ? "refine(.,0) == upsample and warp(.,0) == id, bit-exact" : "mismatch"};
}

CheckResult check_erosion() {
    Rng rng(33);
    bool scan_ok = true;
    for (int i = 0; i < 100; ++i) {
        const int h = 4 + int(rng.next_below(61));
        const int w = 4 + int(rng.next_below(61));
        const int side = 1 + 2 * int(rng.next_below(4));
        const BinaryMask mask = random_mask(rng, h, w, 0.35 + 0.5 * rng.next_unit());
        if (erode(mask, side).bits != reference::erode_scan(mask, side).bits) {
            scan_ok = false;
            break;
        }
    }

    // Chebyshev margin of the union paste mask against other-class pixels.
    bool margin_ok = true;
    for (int i = 0; i < 20 && margin_ok; ++i) {
        const LabelMap pseudo = random_labels(rng, 40, 40, 8, 10);
        AugmentConfig cfg;
        cfg.pasteable_classes = {2, 3, 4, 5, 6};
        cfg.seed = 1000 + i;
        Rng mask_rng(cfg.seed);
        const auto [mask, chosen] = build_paste_mask(pseudo, cfg, mask_rng);
        for (int y = 0; y < 40 && margin_ok; ++y)
            for (int x = 0; x < 40 && margin_ok; ++x) {
                if (!mask.get(y, x)) continue;
                const int c = pseudo.at(y, x);
                for (int dy = -1; dy <= 1 && margin_ok; ++dy)
                    for (int dx = -1; dx <= 1; ++dx) {
                        const int ny = y + dy, nx = x + dx;
                        if (ny < 0 || ny >= 40 || nx < 0 || nx >= 40) continue;
                        if (pseudo.at(ny, nx) != c) {
                            margin_ok = false;
                            break;
                        }
                    }
            }
    }
    const bool ok = scan_ok && margin_ok;
    return {"erosion-oracle", ok,
            ok ? "window-scan equal on 100 masks; paste-mask margin >= 2 held"
               : (scan_ok ? "margin violated" : "window-scan mismatch")};
}

CheckResult check_paste() {
    Rng rng(55);
    bool ok = true;
    const int h = 24, w = 30;
    const RgbImage dst_img = random_image(rng, h, w);
    const RgbImage src_img = random_image(rng, h, w);
    const LabelMap dst_labels = random_labels(rng, h, w, 8, 6);
    const LabelMap src_pseudo = random_labels(rng, h, w, 8, 6);

    const BinaryMask empty(h, w, false), full(h, w, true);
    auto [img_e, lab_e] = paste(dst_img, dst_labels, src_img, src_pseudo, empty);
    ok = ok && img_e.data == dst_img.data && lab_e.data == dst_labels.data;
    auto [img_f, lab_f] = paste(dst_img, dst_labels, src_img, src_pseudo, full);
    ok = ok && img_f.data == src_img.data && lab_f.data == src_pseudo.data;

    AugmentConfig cfg;
    cfg.pasteable_classes = {2, 3, 4, 5};
    cfg.seed = 99;
    auto [i1, l1, r1] = synthesize_pair(src_img, src_pseudo, dst_img, dst_labels, cfg);
    auto [i2, l2, r2] = synthesize_pair(src_img, src_pseudo, dst_img, dst_labels, cfg);
    ok = ok && i1.data == i2.data && l1.data == l2.data && r1.chosen == r2.chosen;

    return {"paste-piecewise", ok,
            ok ? "empty/full masks exact; reruns bit-identical" : "mismatch"};
}

CheckResult check_losses() {
    const int h = 6, w = 7, C = 19;
    LossConfig cfg;

    FeatureMap uniform(C, h, w, float(1.0 / C));
    LabelMap target(h, w, C, 255, 3);
    const LossValue seg = seg_cross_entropy(uniform, target, cfg);
    const double seg_err = std::abs(seg.total - std::log(19.0));

    FeatureMap half(1, h, w, 0.5f);
    BinaryMask edges(h, w, true);
    const LossValue edge = edge_bce(half, edges, cfg);
    const double edge_err = std::abs(edge.total - std::log(2.0));

    const LossValue combined = combined_loss(uniform, target, half, edges, cfg);
    const double comb_err =
        std::abs(combined.total - (seg.total + cfg.lambda_edge * edge.total));

    const bool ok = seg_err < 1e-4 && edge_err < 1e-6 && comb_err < 1e-9;
    return {"loss-values", ok,
            fmt("seg err %.3e, edge+combined err %.3e", seg_err,
                std::max(edge_err, comb_err))};
}

CheckResult check_metrics() {
    bool ok = true;
    std::string detail = "cm arithmetic, perfect trimap, monotone bands, full-band equality";

    ConfusionMatrix cm(2);
    cm.at(0, 0) = 3;
    cm.at(0, 1) = 1;
    cm.at(1, 0) = 1;
    cm.at(1, 1) = 3;
    const MiouResult m = miou(cm);
    ok = ok && m.per_class[0] == 3.0 / 5.0 && m.per_class[1] == 3.0 / 5.0 &&
         m.mean == 3.0 / 5.0;
    if (!ok) detail = "cm [[3,1],[1,3]] did not give 0.6";

    Rng rng(77);
    std::vector<LabelMap> gts;
    for (int i = 0; i < 3; ++i) gts.push_back(random_labels(rng, 40, 44, 5, 7));
    TrimapSpec spec; // bands 4, 8, 16, 20
    const TrimapTable perfect = trimap_miou(gts, gts, spec);
    for (const TrimapBandResult& band : perfect.bands)
        if (band.result.mean != 1.0) {
            ok = false;
            detail = "perfect prediction not 1.0 at band " + std::to_string(band.bandwidth);
        }

    for (int i = 0; i < 50 && ok; ++i) {
        const LabelMap gt = random_labels(rng, 24, 26, 5, 6);
        const int r1 = 1 + int(rng.next_below(8));
        const int r2 = r1 + 1 + int(rng.next_below(8));
        const DistanceMetric metric =
            i % 2 == 0 ? DistanceMetric::Euclidean : DistanceMetric::Chebyshev;
        const BinaryMask b1 = trimap_band(gt, r1, metric);
        const BinaryMask b2 = trimap_band(gt, r2, metric);
        for (std::size_t k = 0; k < b1.bits.size(); ++k)
            if (b1.bits[k] && !b2.bits[k]) {
                ok = false;
                detail = "band not monotone in radius";
                break;
            }
    }

    if (ok) {
        const LabelMap gt = random_labels(rng, 30, 32, 5, 7);
        LabelMap pred = gt;
        for (int i = 0; i < 60; ++i)
            pred.data[rng.next_below(std::uint32_t(pred.data.size()))] =
                std::uint8_t(rng.next_below(5));
        ConfusionMatrix plain(5);
        accumulate(plain, pred, gt, nullptr);
        const BinaryMask full_band = trimap_band(gt, gt.height + gt.width,
                                                 DistanceMetric::Euclidean);
        ConfusionMatrix banded(5);
        accumulate(banded, pred, gt, &full_band);
        if (plain.counts != banded.counts || miou(plain).mean != miou(banded).mean) {
            ok = false;
            detail = "full-image band did not reproduce global mIoU";
        }
    }
    return {"metric-correctness", ok, detail};
}

CheckResult check_distance_transform() {
    Rng rng(909);
    double worst_euc = 0.0;
    bool cheb_ok = true;
    for (int i = 0; i < 25; ++i) {
        const int h = 4 + int(rng.next_below(29));
        const int w = 4 + int(rng.next_below(29));
        const LabelMap gt = random_labels(rng, h, w, 4, 5);
        EdgeExtractionConfig edge_cfg;
        const BinaryMask boundary = extract_semantic_edges(gt, edge_cfg);
        if (boundary.count_true() == 0) continue;

        const std::vector<double> brute_e =
            reference::nearest_seed_distances(boundary, DistanceMetric::Euclidean);
        const std::vector<double> d2 = squared_euclidean_distance_transform(boundary);
        for (std::size_t k = 0; k < d2.size(); ++k)
            worst_euc = std::max(worst_euc, std::abs(std::sqrt(d2[k]) - brute_e[k]));

        const std::vector<double> brute_c =
            reference::nearest_seed_distances(boundary, DistanceMetric::Chebyshev);
        const std::vector<std::int32_t> dc = chebyshev_distance_transform(boundary);
        for (std::size_t k = 0; k < dc.size(); ++k)
            if (double(dc[k]) != brute_c[k]) cheb_ok = false;
    }
    const bool ok = cheb_ok && worst_euc <= 1e-6;
    return {"distance-transform-oracle", ok,
            fmt("euclidean worst err %.3e (tol 1e-6), chebyshev exact: %.0f", worst_euc,
                cheb_ok ? 1.0 : 0.0)};
}

} // namespace

GradcheckSummary run_warp_gradcheck(std::uint64_t seed, double eps, double tol,
                                    int instances) {
    Rng rng(seed);
    GradcheckSummary s;
    s.instances = instances;

    auto rel = [](double a, double f) {
        return std::abs(a - f) / std::max({1.0, std::abs(a), std::abs(f)});
    };

    for (int i = 0; i < instances; ++i) {
        const int c = 1 + int(rng.next_below(3));
        const int h = 4 + int(rng.next_below(5));
        const int w = 4 + int(rng.next_below(5));
        const WarpConfig cfg{i % 2 == 0 ? BorderMode::Clamp : BorderMode::Zeros};

        FeatureMap features = random_features(rng, c, h, w);
        const DisplacementField disp = random_disp_off_lattice(rng, h, w, 0.05);
        const FeatureMap upstream = random_features(rng, c, h, w);

        const WarpGradients grad = warp_backward(features, disp, upstream, cfg);

        // d_disp against central differences of the double-precision loss
        DisplacementField d = disp;
        for (std::size_t k = 0; k < d.pixel_count(); ++k) {
            for (int axis = 0; axis < 2; ++axis) {
                std::vector<float>& vals = axis == 0 ? d.dx : d.dy;
                const float orig = vals[k];
                const float plus = orig + float(eps);
                const float minus = orig - float(eps);
                vals[k] = plus;
                const double lp = warp_scalar_loss(features, d, upstream, cfg);
                vals[k] = minus;
                const double lm = warp_scalar_loss(features, d, upstream, cfg);
                vals[k] = orig;
                const double fd = (lp - lm) / (double(plus) - double(minus));
                const double an =
                    axis == 0 ? double(grad.d_disp.dx[k]) : double(grad.d_disp.dy[k]);
                s.worst_rel_disp = std::max(s.worst_rel_disp, rel(an, fd));
            }
        }

        // d_features against central differences
        for (std::size_t k = 0; k < features.data.size(); ++k) {
            const float orig = features.data[k];
            const float plus = orig + float(eps);
            const float minus = orig - float(eps);
            features.data[k] = plus;
            const double lp = warp_scalar_loss(features, disp, upstream, cfg);
            features.data[k] = minus;
            const double lm = warp_scalar_loss(features, disp, upstream, cfg);
            features.data[k] = orig;
            const double fd = (lp - lm) / (double(plus) - double(minus));
            s.worst_rel_features =
                std::max(s.worst_rel_features, rel(double(grad.d_features.data[k]), fd));
        }

        // adjointness: <warp(A,D), U> == <A, d_features>
        const FeatureMap out = warp(features, disp, cfg);
        double lhs = 0.0, rhs = 0.0;
        for (std::size_t k = 0; k < out.data.size(); ++k) {
            lhs += double(out.data[k]) * double(upstream.data[k]);
            rhs += double(features.data[k]) * double(grad.d_features.data[k]);
        }
        s.worst_adjoint = std::max(s.worst_adjoint, std::abs(lhs - rhs));
    }

    s.passed = s.worst_rel_features < tol && s.worst_rel_disp < tol &&
               s.worst_adjoint < 1e-5;
    return s;
}

std::vector<CheckResult> run_selfcheck() {
    return {
        check_warp_oracle(),    check_gradients(), check_identity(),
        check_erosion(),        check_paste(),     check_losses(),
        check_metrics(),        check_distance_transform(),
    };
}

bool all_passed(const std::vector<CheckResult>& results) {
    for (const CheckResult& r : results)
        if (!r.passed) return false;
    return true;
}

} // namespace bk
