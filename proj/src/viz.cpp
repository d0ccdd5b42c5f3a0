#include "boundarykit/viz.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "boundarykit/errors.hpp"

namespace bk {

namespace {

std::array<std::uint8_t, 3> hsv_to_rgb(double hue_deg, double sat) {
    // value fixed at 1; saturation 0 gives white
    double h = hue_deg / 60.0;
    h -= std::floor(h / 6.0) * 6.0;
    const int i = int(h) % 6;
    const double f = h - std::floor(h);
    const double p = 1.0 - sat;
    const double q = 1.0 - sat * f;
    const double t = 1.0 - sat * (1.0 - f);

    double r, g, b;
    switch (i) {
        case 0: r = 1; g = t; b = p; break;
        case 1: r = q; g = 1; b = p; break;
        case 2: r = p; g = 1; b = t; break;
        case 3: r = p; g = q; b = 1; break;
        case 4: r = t; g = p; b = 1; break;
        default: r = 1; g = p; b = q; break;
    }
    auto to_byte = [](double v) { return std::uint8_t(std::lround(v * 255.0)); };
    return {to_byte(r), to_byte(g), to_byte(b)};
}

double percentile99(const DisplacementField& disp) {
    std::vector<double> mags(disp.pixel_count());
    for (std::size_t i = 0; i < mags.size(); ++i)
        mags[i] = std::hypot(double(disp.dx[i]), double(disp.dy[i]));
    std::sort(mags.begin(), mags.end());
    const std::size_t n = mags.size();
    const std::size_t idx =
        std::min(n - 1, std::size_t(std::ceil(0.99 * double(n))) - 1);
    return mags[idx];
}

} // namespace

RgbImage flow_to_rgb(const DisplacementField& disp, const FlowColorSpec& spec) {
    disp.validate();

    double max_mag = spec.max_magnitude;
    if (max_mag <= 0.0) max_mag = percentile99(disp);
    if (max_mag <= 0.0) max_mag = 1.0;

    RgbImage img(disp.height, disp.width);
    for (std::size_t i = 0; i < disp.pixel_count(); ++i) {
        const double dx = disp.dx[i], dy = disp.dy[i];
        const double mag = std::hypot(dx, dy);
        if (mag == 0.0) {
            img.data[i * 3] = img.data[i * 3 + 1] = img.data[i * 3 + 2] = 255;
            continue;
        }
        double angle = std::atan2(dy, dx) * 180.0 / M_PI;
        if (angle < 0.0) angle += 360.0;
        const double sat = std::min(mag / max_mag, 1.0);
        const auto rgb = hsv_to_rgb(angle, sat);
        img.data[i * 3] = rgb[0];
        img.data[i * 3 + 1] = rgb[1];
        img.data[i * 3 + 2] = rgb[2];
    }
    return img;
}

RgbImage colorize_labels(const LabelMap& labels, const Palette& palette) {
    labels.validate();
    RgbImage img(labels.height, labels.width);
    for (std::size_t i = 0; i < labels.data.size(); ++i) {
        const int c = labels.data[i];
        if (c == labels.ignore_index) continue; // black
        auto it = palette.find(c);
        if (it == palette.end())
            throw ValidationError("colorize_labels: no palette entry for class " +
                                  std::to_string(c));
        img.data[i * 3] = it->second[0];
        img.data[i * 3 + 1] = it->second[1];
        img.data[i * 3 + 2] = it->second[2];
    }
    return img;
}

RgbImage overlay_edges(const RgbImage& img, const BinaryMask& edges,
                       std::array<std::uint8_t, 3> color) {
    img.validate();
    edges.validate();
    require_same_dims(img.height, img.width, edges.height, edges.width,
                      "overlay_edges: image vs mask");
    RgbImage out = img;
    for (std::size_t i = 0; i < edges.bits.size(); ++i) {
        if (!edges.bits[i]) continue;
        out.data[i * 3] = color[0];
        out.data[i * 3 + 1] = color[1];
        out.data[i * 3 + 2] = color[2];
    }
    return out;
}

Palette street_scene_palette() {
    return {
        {0, {128, 64, 128}},  {1, {244, 35, 232}},  {2, {70, 70, 70}},
        {3, {102, 102, 156}}, {4, {190, 153, 153}}, {5, {153, 153, 153}},
        {6, {250, 170, 30}},  {7, {220, 220, 0}},   {8, {107, 142, 35}},
        {9, {152, 251, 152}}, {10, {70, 130, 180}}, {11, {220, 20, 60}},
        {12, {255, 0, 0}},    {13, {0, 0, 142}},    {14, {0, 0, 70}},
        {15, {0, 60, 100}},   {16, {0, 80, 100}},   {17, {0, 0, 230}},
        {18, {119, 11, 32}},
    };
}

} // namespace bk
