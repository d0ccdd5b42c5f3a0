#include "boundarykit/distance_transform.hpp"

#include <algorithm>
#include <limits>

namespace bk {

namespace {

// Finite stand-in for "no seed"; far above any squared image distance, far
// below overflow. Converted back to infinity after the passes.
constexpr double kFar = 1e20;

// 1D squared distance transform (Felzenszwalb & Huttenlocher lower envelope).
// The finite kFar sentinel keeps every parabola intersection strictly inside
// (-kFar, kFar), so the envelope stack never underflows.
void edt_1d(const std::vector<double>& f, int n, std::vector<double>& d,
            std::vector<int>& v, std::vector<double>& z) {
    auto intersect = [&](int q, int p) {
        return ((f[q] + double(q) * q) - (f[p] + double(p) * p)) / (2.0 * (q - p));
    };

    int k = 0;
    v[0] = 0;
    z[0] = -kFar;
    z[1] = kFar;
    for (int q = 1; q < n; ++q) {
        double s = intersect(q, v[k]);
        while (s <= z[k]) {
            --k;
            s = intersect(q, v[k]);
        }
        ++k;
        v[k] = q;
        z[k] = s;
        z[k + 1] = kFar;
    }

    k = 0;
    for (int q = 0; q < n; ++q) {
        while (z[k + 1] < q) ++k;
        const double diff = q - v[k];
        d[q] = diff * diff + f[v[k]];
    }
}

} // namespace

std::vector<double> squared_euclidean_distance_transform(const BinaryMask& seeds) {
    seeds.validate();
    const int h = seeds.height, w = seeds.width;
    std::vector<double> dist(std::size_t(h) * w);
    for (std::size_t i = 0; i < dist.size(); ++i) dist[i] = seeds.bits[i] ? 0.0 : kFar;

    const int n = std::max(h, w);
    std::vector<double> f(n), d(n), z(n + 1);
    std::vector<int> v(n);

    // columns, then rows
    for (int x = 0; x < w; ++x) {
        for (int y = 0; y < h; ++y) f[y] = dist[std::size_t(y) * w + x];
        edt_1d(f, h, d, v, z);
        for (int y = 0; y < h; ++y) dist[std::size_t(y) * w + x] = d[y];
    }
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) f[x] = dist[std::size_t(y) * w + x];
        edt_1d(f, w, d, v, z);
        for (int x = 0; x < w; ++x) dist[std::size_t(y) * w + x] = d[x];
    }

    for (double& v2 : dist)
        if (v2 >= kFar / 2) v2 = std::numeric_limits<double>::infinity();
    return dist;
}

std::vector<std::int32_t> chebyshev_distance_transform(const BinaryMask& seeds) {
    seeds.validate();
    const int h = seeds.height, w = seeds.width;
    const std::int32_t big = std::int32_t(h) + std::int32_t(w) + 1;
    std::vector<std::int32_t> dist(std::size_t(h) * w);
    for (std::size_t i = 0; i < dist.size(); ++i) dist[i] = seeds.bits[i] ? 0 : big;

    auto at = [&](int y, int x) -> std::int32_t& { return dist[std::size_t(y) * w + x]; };

    // forward sweep: W, N, NW, NE
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            std::int32_t m = at(y, x);
            if (x > 0) m = std::min(m, at(y, x - 1) + 1);
            if (y > 0) {
                m = std::min(m, at(y - 1, x) + 1);
                if (x > 0) m = std::min(m, at(y - 1, x - 1) + 1);
                if (x + 1 < w) m = std::min(m, at(y - 1, x + 1) + 1);
            }
            at(y, x) = m;
        }
    // backward sweep: E, S, SE, SW
    for (int y = h - 1; y >= 0; --y)
        for (int x = w - 1; x >= 0; --x) {
            std::int32_t m = at(y, x);
            if (x + 1 < w) m = std::min(m, at(y, x + 1) + 1);
            if (y + 1 < h) {
                m = std::min(m, at(y + 1, x) + 1);
                if (x + 1 < w) m = std::min(m, at(y + 1, x + 1) + 1);
                if (x > 0) m = std::min(m, at(y + 1, x - 1) + 1);
            }
            at(y, x) = m;
        }
    return dist;
}

} // namespace bk
