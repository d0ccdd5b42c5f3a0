#include "boundarykit/reference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace bk::reference {

std::vector<double> warp_gather(const FeatureMap& features, const DisplacementField& disp,
                                const WarpConfig& cfg) {
    const int h = features.height, w = features.width, ch = features.channels;
    std::vector<double> out(std::size_t(ch) * h * w, 0.0);

    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const std::size_t p = std::size_t(y) * w + x;
            double xs = x + double(disp.dx[p]);
            double ys = y + double(disp.dy[p]);
            if (cfg.border_mode == BorderMode::Clamp) {
                xs = std::clamp(xs, 0.0, double(w - 1));
                ys = std::clamp(ys, 0.0, double(h - 1));
            }
            const double fx = std::floor(xs);
            const double fy = std::floor(ys);
            for (int ny = int(fy); ny <= int(fy) + 1; ++ny) {
                for (int nx = int(fx); nx <= int(fx) + 1; ++nx) {
                    const double weight = std::max(0.0, 1.0 - std::abs(xs - nx)) *
                                          std::max(0.0, 1.0 - std::abs(ys - ny));
                    if (weight == 0.0) continue;
                    int sy = ny, sx = nx;
                    if (cfg.border_mode == BorderMode::Clamp) {
                        sy = std::clamp(sy, 0, h - 1);
                        sx = std::clamp(sx, 0, w - 1);
                    } else if (sy < 0 || sy >= h || sx < 0 || sx >= w) {
                        continue; // zero contribution
                    }
                    for (int c = 0; c < ch; ++c)
                        out[(std::size_t(c) * h + y) * w + x] +=
                            weight * double(features.at(c, sy, sx));
                }
            }
        }
    }
    return out;
}

BinaryMask erode_scan(const BinaryMask& mask, int side) {
    const int h = mask.height, w = mask.width, r = side / 2;
    BinaryMask out(h, w);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            bool all = true;
            for (int dy = -r; all && dy <= r; ++dy) {
                for (int dx = -r; dx <= r; ++dx) {
                    const int ny = y + dy, nx = x + dx;
                    if (ny < 0 || ny >= h || nx < 0 || nx >= w || !mask.get(ny, nx)) {
                        all = false;
                        break;
                    }
                }
            }
            out.set(y, x, all);
        }
    }
    return out;
}

std::vector<double> nearest_seed_distances(const BinaryMask& seeds, DistanceMetric metric) {
    const int h = seeds.height, w = seeds.width;
    std::vector<std::pair<int, int>> pts;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            if (seeds.get(y, x)) pts.emplace_back(y, x);

    std::vector<double> dist(std::size_t(h) * w,
                             std::numeric_limits<double>::infinity());
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& [sy, sx] : pts) {
                const double ddy = std::abs(y - sy), ddx = std::abs(x - sx);
                const double d = metric == DistanceMetric::Chebyshev
                                     ? std::max(ddy, ddx)
                                     : std::sqrt(ddy * ddy + ddx * ddx);
                best = std::min(best, d);
            }
            dist[std::size_t(y) * w + x] = best;
        }
    }
    return dist;
}

double edge_bce_sum(const FeatureMap& pred, const BinaryMask& target, double eps) {
    double sum = 0.0;
    for (int y = 0; y < pred.height; ++y) {
        for (int x = 0; x < pred.width; ++x) {
            const double p = std::clamp(double(pred.at(0, y, x)), eps, 1.0 - eps);
            const double e = target.get(y, x) ? 1.0 : 0.0;
            sum += e * std::log(p) + (1.0 - e) * std::log(1.0 - p);
        }
    }
    return -sum;
}

double seg_cross_entropy_sum(const FeatureMap& pred, const LabelMap& target, double eps) {
    double sum = 0.0;
    for (int y = 0; y < pred.height; ++y) {
        for (int x = 0; x < pred.width; ++x) {
            const int t = target.at(y, x);
            if (t == target.ignore_index) continue;
            const double p = std::clamp(double(pred.at(t, y, x)), eps, 1.0 - eps);
            sum += std::log(p);
        }
    }
    return -sum;
}

} // namespace bk::reference
