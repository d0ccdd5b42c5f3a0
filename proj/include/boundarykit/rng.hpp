#pragma once

#include <cstdint>

namespace bk {

// splitmix64. Used instead of <random> distributions so that seeded runs are
// bit-identical across standard libraries and platforms.
struct Rng {
    std::uint64_t state;

    explicit Rng(std::uint64_t seed) : state(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1).
    double next_unit() { return double(next() >> 11) * 0x1.0p-53; }

    /// Uniform in [0, n). n must be > 0.
    std::uint32_t next_below(std::uint32_t n) {
        return std::uint32_t((std::uint64_t(next() >> 32) * n) >> 32);
    }

    /// Uniform in [lo, hi).
    double next_in(double lo, double hi) { return lo + (hi - lo) * next_unit(); }
};

} // namespace bk
