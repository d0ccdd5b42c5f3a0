#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "boundarykit/errors.hpp"
#include "boundarykit/reference.hpp"
#include "boundarykit/selfcheck.hpp"
#include "boundarykit/upsample.hpp"
#include "boundarykit/warp.hpp"
#include "testutil.hpp"

using namespace bk;

TEST_CASE("zero displacement is the bit-exact identity") {
    bk::Rng rng(2);
    for (int i = 0; i < 8; ++i) {
        const int c = 1 + int(rng.next_below(4));
        const int h = 1 + int(rng.next_below(9));
        const int w = 1 + int(rng.next_below(9));
        const FeatureMap f = testutil::random_features(rng, c, h, w, -10.0, 10.0);
        const DisplacementField zero(h, w);
        for (BorderMode mode : {BorderMode::Clamp, BorderMode::Zeros}) {
            const FeatureMap out = warp(f, zero, {mode});
            CHECK(out.data == f.data);
        }
    }
}

TEST_CASE("single-pixel shifts match the hand evaluation") {
    FeatureMap f(1, 1, 2);
    f.at(0, 0, 0) = 3.0f; // a
    f.at(0, 0, 1) = 5.0f; // b

    DisplacementField full(1, 2);
    full.dx[0] = 1.0f; // at x=0 gather from x=1
    CHECK(warp(f, full, {}).at(0, 0, 0) == 5.0f);

    DisplacementField half(1, 2);
    half.dx[0] = 0.5f;
    CHECK(warp(f, half, {}).at(0, 0, 0) == doctest::Approx(4.0).epsilon(1e-12)); // (a+b)/2
}

TEST_CASE("warp is linear in the features") {
    bk::Rng rng(12);
    for (int i = 0; i < 5; ++i) {
        const int h = 3 + int(rng.next_below(6)), w = 3 + int(rng.next_below(6));
        const FeatureMap a = testutil::random_features(rng, 2, h, w);
        const FeatureMap b = testutil::random_features(rng, 2, h, w);
        const DisplacementField d = testutil::random_disp(rng, h, w, -2.0, 2.0);
        const double alpha = rng.next_in(-2.0, 2.0), beta = rng.next_in(-2.0, 2.0);

        FeatureMap mix(2, h, w);
        for (std::size_t k = 0; k < mix.data.size(); ++k)
            mix.data[k] = float(alpha * a.data[k] + beta * b.data[k]);

        const FeatureMap wm = warp(mix, d, {});
        const FeatureMap wa = warp(a, d, {});
        const FeatureMap wb = warp(b, d, {});
        for (std::size_t k = 0; k < wm.data.size(); ++k)
            CHECK(std::abs(wm.data[k] - (alpha * wa.data[k] + beta * wb.data[k])) < 1e-6);
    }
}

TEST_CASE("clamp-mode outputs stay inside the per-channel input range") {
    bk::Rng rng(22);
    for (int i = 0; i < 5; ++i) {
        const int h = 3 + int(rng.next_below(6)), w = 3 + int(rng.next_below(6));
        const FeatureMap f = testutil::random_features(rng, 3, h, w, -4.0, 4.0);
        const DisplacementField d = testutil::random_disp(rng, h, w, -5.0, 5.0);
        const FeatureMap out = warp(f, d, {BorderMode::Clamp});
        for (int c = 0; c < 3; ++c) {
            float lo = f.at(c, 0, 0), hi = lo;
            for (int y = 0; y < h; ++y)
                for (int x = 0; x < w; ++x) {
                    lo = std::min(lo, f.at(c, y, x));
                    hi = std::max(hi, f.at(c, y, x));
                }
            for (int y = 0; y < h; ++y)
                for (int x = 0; x < w; ++x) {
                    CHECK(out.at(c, y, x) >= lo);
                    CHECK(out.at(c, y, x) <= hi);
                }
        }
    }
}

TEST_CASE("warp matches the nested-loop reference on random instances") {
    bk::Rng rng(32);
    double worst = 0.0;
    for (int i = 0; i < 25; ++i) {
        const int c = 1 + int(rng.next_below(4));
        const int h = 2 + int(rng.next_below(11));
        const int w = 2 + int(rng.next_below(11));
        const FeatureMap f = testutil::random_features(rng, c, h, w);
        const DisplacementField d = testutil::random_disp(rng, h, w, -2.0, 2.0);
        const WarpConfig cfg{i % 2 == 0 ? BorderMode::Clamp : BorderMode::Zeros};

        const FeatureMap got = warp(f, d, cfg);
        const std::vector<double> want = reference::warp_gather(f, d, cfg);
        for (std::size_t k = 0; k < want.size(); ++k)
            worst = std::max(worst, std::abs(double(got.data[k]) - want[k]));
    }
    CHECK(worst < 1e-6);
}

TEST_CASE("zeros mode fades out past the border") {
    FeatureMap f(1, 1, 2);
    f.at(0, 0, 0) = 2.0f;
    f.at(0, 0, 1) = 6.0f;

    DisplacementField d(1, 2);
    d.dx[0] = -0.5f; // half outside on the left
    const FeatureMap out = warp(f, d, {BorderMode::Zeros});
    CHECK(out.at(0, 0, 0) == doctest::Approx(1.0)); // 0.5 * 2 + 0.5 * 0

    d.dx[0] = -3.0f; // fully outside
    CHECK(warp(f, d, {BorderMode::Zeros}).at(0, 0, 0) == 0.0f);
}

TEST_CASE("backward pass: identity scatter and hand-checked derivative") {
    // zero displacement, all-ones upstream: gradient lands one-to-one
    FeatureMap f(1, 3, 3);
    for (std::size_t i = 0; i < f.data.size(); ++i) f.data[i] = float(i);
    const DisplacementField zero(3, 3);
    FeatureMap ones(1, 3, 3, 1.0f);
    const WarpGradients g = warp_backward(f, zero, ones, {});
    for (float v : g.d_features.data) CHECK(v == 1.0f);
    // exact-integer coordinates take the right-sided (floor-cell) derivative
    for (int y = 0; y < 3; ++y)
        for (int x = 0; x < 3; ++x) {
            CHECK(g.d_disp.dx[g.d_disp.index(y, x)] ==
                  (x < 2 ? f.at(0, y, x + 1) - f.at(0, y, x) : 0.0f));
            CHECK(g.d_disp.dy[g.d_disp.index(y, x)] ==
                  (y < 2 ? f.at(0, y + 1, x) - f.at(0, y, x) : 0.0f));
        }

    // half-pixel shift on [a, b]: d/ddx = b - a at x=0
    FeatureMap ab(1, 1, 2);
    ab.at(0, 0, 0) = 3.0f;
    ab.at(0, 0, 1) = 5.0f;
    DisplacementField half(1, 2);
    half.dx[0] = 0.5f;
    FeatureMap up(1, 1, 2, 0.0f);
    up.at(0, 0, 0) = 1.0f;
    const WarpGradients gh = warp_backward(ab, half, up, {});
    CHECK(gh.d_disp.dx[0] == doctest::Approx(2.0).epsilon(1e-12)); // b - a
    CHECK(gh.d_features.at(0, 0, 0) == doctest::Approx(0.5));
    CHECK(gh.d_features.at(0, 0, 1) == doctest::Approx(0.5));
}

TEST_CASE("analytic gradients agree with finite differences") {
    const GradcheckSummary s = run_warp_gradcheck(2024, 1e-3, 1e-3, 5);
    CHECK(s.passed);
    CHECK(s.worst_rel_features < 1e-3);
    CHECK(s.worst_rel_disp < 1e-3);
    CHECK(s.worst_adjoint < 1e-5);
}

TEST_CASE("adjointness holds on random instances") {
    bk::Rng rng(52);
    for (int i = 0; i < 5; ++i) {
        const int c = 1 + int(rng.next_below(3));
        const int h = 3 + int(rng.next_below(6)), w = 3 + int(rng.next_below(6));
        const FeatureMap f = testutil::random_features(rng, c, h, w);
        const FeatureMap u = testutil::random_features(rng, c, h, w);
        const DisplacementField d = testutil::random_disp(rng, h, w, -2.0, 2.0);
        for (BorderMode mode : {BorderMode::Clamp, BorderMode::Zeros}) {
            const FeatureMap out = warp(f, d, {mode});
            const WarpGradients g = warp_backward(f, d, u, {mode});
            double lhs = 0.0, rhs = 0.0;
            for (std::size_t k = 0; k < out.data.size(); ++k) {
                lhs += double(out.data[k]) * double(u.data[k]);
                rhs += double(f.data[k]) * double(g.d_features.data[k]);
            }
            CHECK(std::abs(lhs - rhs) < 1e-5);
        }
    }
}

TEST_CASE("refine composes upsampling and warping") {
    bk::Rng rng(62);

    // zero field: refine is exactly the upsample
    const FeatureMap coarse = testutil::random_features(rng, 3, 4, 4);
    const DisplacementField zero(9, 11);
    CHECK(refine(coarse, zero, {}).data == bilinear_upsample(coarse, 9, 11).data);

    // constant map stays constant under any clamped warp
    FeatureMap flat(2, 3, 3, 4.25f);
    const DisplacementField wild = testutil::random_disp(rng, 7, 8, -6.0, 6.0);
    for (float v : refine(flat, wild, {BorderMode::Clamp}).data) CHECK(v == 4.25f);

    // against the nested-loop reference on the upsampled input
    for (int i = 0; i < 5; ++i) {
        const FeatureMap c = testutil::random_features(rng, 3, 4, 4);
        const DisplacementField d = testutil::random_disp(rng, 10, 12, -1.0, 1.0);
        const FeatureMap got = refine(c, d, {});
        const FeatureMap up = bilinear_upsample(c, 10, 12);
        const std::vector<double> want = reference::warp_gather(up, d, {});
        for (std::size_t k = 0; k < want.size(); ++k)
            CHECK(std::abs(double(got.data[k]) - want[k]) < 1e-6);
    }
}

TEST_CASE("shape mismatches are rejected") {
    FeatureMap f(1, 3, 3, 0.0f);
    DisplacementField d(4, 3);
    CHECK_THROWS_AS(warp(f, d, {}), ValidationError);

    DisplacementField ok(3, 3);
    FeatureMap upstream(2, 3, 3, 0.0f); // wrong channel count
    CHECK_THROWS_AS(warp_backward(f, ok, upstream, {}), ValidationError);

    DisplacementField small(2, 2); // smaller than coarse
    CHECK_THROWS_AS(refine(f, small, {}), ValidationError);
}
