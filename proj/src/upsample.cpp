#include "boundarykit/upsample.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "boundarykit/errors.hpp"

namespace bk {

namespace {

struct Tap {
    int lo;
    int hi;
    double frac; // weight of hi; 0 means "use lo only"
};

// Source sampling positions for one axis, align-corners=false, edge-clamped.
std::vector<Tap> axis_taps(int src_size, int dst_size) {
    std::vector<Tap> taps(dst_size);
    const double scale = double(src_size) / double(dst_size);
    for (int d = 0; d < dst_size; ++d) {
        double s = (d + 0.5) * scale - 0.5;
        int lo = int(std::floor(s));
        double frac = s - lo;
        if (lo < 0) {
            lo = 0;
            frac = 0.0;
        } else if (lo >= src_size - 1) {
            lo = src_size - 1;
            frac = 0.0;
        }
        taps[d] = Tap{lo, lo + 1 < src_size ? lo + 1 : lo, frac};
    }
    return taps;
}

inline double lerp(double a, double b, double t) { return a + t * (b - a); }

} // namespace

FeatureMap bilinear_upsample(const FeatureMap& src, int out_height, int out_width) {
    src.validate();
    if (out_height < 1 || out_width < 1)
        throw ValidationError("bilinear_upsample: output dimensions must be positive, got " +
                              std::to_string(out_height) + "x" + std::to_string(out_width));
    if (out_height < src.height || out_width < src.width)
        throw ValidationError("bilinear_upsample: output must be at least source size");

    const std::vector<Tap> xs = axis_taps(src.width, out_width);
    const std::vector<Tap> ys = axis_taps(src.height, out_height);

    FeatureMap dst(src.channels, out_height, out_width);
    for (int c = 0; c < src.channels; ++c) {
        for (int y = 0; y < out_height; ++y) {
            const Tap& ty = ys[y];
            for (int x = 0; x < out_width; ++x) {
                const Tap& tx = xs[x];
                double top = lerp(src.at(c, ty.lo, tx.lo), src.at(c, ty.lo, tx.hi), tx.frac);
                double bot = lerp(src.at(c, ty.hi, tx.lo), src.at(c, ty.hi, tx.hi), tx.frac);
                dst.at(c, y, x) = float(lerp(top, bot, ty.frac));
            }
        }
    }
    return dst;
}

} // namespace bk
