#include "boundarykit/warp.hpp"

#include <cmath>

#include "boundarykit/errors.hpp"
#include "boundarykit/upsample.hpp"

namespace bk {

namespace {

// Geometry of one bilinear sample: the 2x2 cell, fractional weights, and
// whether the spatial derivative in each direction is live (not clamped).
struct SampleCell {
    int x0, x1, y0, y1;
    double fx, fy;
    bool live_x, live_y;
};

SampleCell make_cell(double xs, double ys, int h, int w, BorderMode border) {
    SampleCell cell{};
    cell.live_x = cell.live_y = true;

    if (border == BorderMode::Clamp) {
        if (xs < 0.0) {
            xs = 0.0;
            cell.live_x = false;
        } else if (xs > w - 1) {
            xs = w - 1;
            cell.live_x = false;
        }
        if (ys < 0.0) {
            ys = 0.0;
            cell.live_y = false;
        } else if (ys > h - 1) {
            ys = h - 1;
            cell.live_y = false;
        }
    } else {
        // Everything beyond one pixel outside samples zeros with zero
        // derivative; clamp only to keep floor() in integer range.
        xs = std::clamp(xs, -2.0, double(w) + 1.0);
        ys = std::clamp(ys, -2.0, double(h) + 1.0);
    }

    cell.x0 = int(std::floor(xs));
    cell.y0 = int(std::floor(ys));
    cell.fx = xs - cell.x0;
    cell.fy = ys - cell.y0;
    cell.x1 = cell.x0 + 1;
    cell.y1 = cell.y0 + 1;

    if (border == BorderMode::Clamp) {
        // Floor-based cell at the top edge collapses; derivative follows.
        if (cell.x1 > w - 1) cell.x1 = w - 1;
        if (cell.y1 > h - 1) cell.y1 = h - 1;
    }
    return cell;
}

inline double fetch(const FeatureMap& f, int c, int y, int x, BorderMode border) {
    if (border == BorderMode::Zeros && (y < 0 || y >= f.height || x < 0 || x >= f.width))
        return 0.0;
    return f.at(c, y, x);
}

void check_forward_shapes(const FeatureMap& features, const DisplacementField& disp) {
    features.validate();
    disp.validate();
    require_same_dims(features.height, features.width, disp.height, disp.width,
                      "warp: features vs displacement");
}

} // namespace

FeatureMap warp(const FeatureMap& features, const DisplacementField& disp,
                const WarpConfig& cfg) {
    check_forward_shapes(features, disp);
    const int h = features.height, w = features.width, ch = features.channels;

    FeatureMap out(ch, h, w);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const std::size_t p = std::size_t(y) * w + x;
            const SampleCell cell =
                make_cell(x + double(disp.dx[p]), y + double(disp.dy[p]), h, w,
                          cfg.border_mode);
            const double w00 = (1.0 - cell.fx) * (1.0 - cell.fy);
            const double w10 = cell.fx * (1.0 - cell.fy);
            const double w01 = (1.0 - cell.fx) * cell.fy;
            const double w11 = cell.fx * cell.fy;
            for (int c = 0; c < ch; ++c) {
                double v = w00 * fetch(features, c, cell.y0, cell.x0, cfg.border_mode) +
                           w10 * fetch(features, c, cell.y0, cell.x1, cfg.border_mode) +
                           w01 * fetch(features, c, cell.y1, cell.x0, cfg.border_mode) +
                           w11 * fetch(features, c, cell.y1, cell.x1, cfg.border_mode);
                out.at(c, y, x) = float(v);
            }
        }
    }
    return out;
}

WarpGradients warp_backward(const FeatureMap& features, const DisplacementField& disp,
                            const FeatureMap& upstream, const WarpConfig& cfg) {
    check_forward_shapes(features, disp);
    upstream.validate();
    if (upstream.channels != features.channels || upstream.height != features.height ||
        upstream.width != features.width)
        throw ValidationError("warp_backward: upstream shape must equal the warp output shape");

    const int h = features.height, w = features.width, ch = features.channels;
    WarpGradients g{FeatureMap(ch, h, w, 0.0f), DisplacementField(h, w, 0.0f, 0.0f)};

    auto scatter = [&](int c, int y, int x, double v) {
        if (y < 0 || y >= h || x < 0 || x >= w) return; // zeros mode only
        g.d_features.at(c, y, x) += float(v);
    };

    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const std::size_t p = std::size_t(y) * w + x;
            const SampleCell cell =
                make_cell(x + double(disp.dx[p]), y + double(disp.dy[p]), h, w,
                          cfg.border_mode);
            const double w00 = (1.0 - cell.fx) * (1.0 - cell.fy);
            const double w10 = cell.fx * (1.0 - cell.fy);
            const double w01 = (1.0 - cell.fx) * cell.fy;
            const double w11 = cell.fx * cell.fy;

            double ddx = 0.0, ddy = 0.0;
            for (int c = 0; c < ch; ++c) {
                const double u = upstream.at(c, y, x);
                scatter(c, cell.y0, cell.x0, u * w00);
                scatter(c, cell.y0, cell.x1, u * w10);
                scatter(c, cell.y1, cell.x0, u * w01);
                scatter(c, cell.y1, cell.x1, u * w11);

                const double v00 = fetch(features, c, cell.y0, cell.x0, cfg.border_mode);
                const double v10 = fetch(features, c, cell.y0, cell.x1, cfg.border_mode);
                const double v01 = fetch(features, c, cell.y1, cell.x0, cfg.border_mode);
                const double v11 = fetch(features, c, cell.y1, cell.x1, cfg.border_mode);
                ddx += u * ((1.0 - cell.fy) * (v10 - v00) + cell.fy * (v11 - v01));
                ddy += u * ((1.0 - cell.fx) * (v01 - v00) + cell.fx * (v11 - v10));
            }
            g.d_disp.dx[p] = cell.live_x ? float(ddx) : 0.0f;
            g.d_disp.dy[p] = cell.live_y ? float(ddy) : 0.0f;
        }
    }
    return g;
}

double warp_scalar_loss(const FeatureMap& features, const DisplacementField& disp,
                        const FeatureMap& upstream, const WarpConfig& cfg) {
    check_forward_shapes(features, disp);
    if (upstream.channels != features.channels || upstream.height != features.height ||
        upstream.width != features.width)
        throw ValidationError("warp_scalar_loss: upstream shape must equal the output shape");

    const int h = features.height, w = features.width, ch = features.channels;
    double loss = 0.0;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const std::size_t p = std::size_t(y) * w + x;
            const SampleCell cell =
                make_cell(x + double(disp.dx[p]), y + double(disp.dy[p]), h, w,
                          cfg.border_mode);
            const double w00 = (1.0 - cell.fx) * (1.0 - cell.fy);
            const double w10 = cell.fx * (1.0 - cell.fy);
            const double w01 = (1.0 - cell.fx) * cell.fy;
            const double w11 = cell.fx * cell.fy;
            for (int c = 0; c < ch; ++c) {
                double v = w00 * fetch(features, c, cell.y0, cell.x0, cfg.border_mode) +
                           w10 * fetch(features, c, cell.y0, cell.x1, cfg.border_mode) +
                           w01 * fetch(features, c, cell.y1, cell.x0, cfg.border_mode) +
                           w11 * fetch(features, c, cell.y1, cell.x1, cfg.border_mode);
                loss += double(upstream.at(c, y, x)) * v;
            }
        }
    }
    return loss;
}

FeatureMap refine(const FeatureMap& coarse, const DisplacementField& disp,
                  const WarpConfig& cfg) {
    disp.validate();
    return warp(bilinear_upsample(coarse, disp.height, disp.width), disp, cfg);
}

} // namespace bk
