#pragma once

#include <array>
#include <cstdint>
#include <map>

#include "boundarykit/grid.hpp"

namespace bk {

/// Displacement color coding: hue encodes the direction angle atan2(dy, dx)
/// on the six-segment wheel red(0 deg) -> yellow -> green -> cyan(180 deg) ->
/// blue -> magenta -> red, each segment linear over 60 degrees; saturation
/// encodes magnitude, so zero displacement is pure white and magnitudes at or
/// above max_magnitude are fully saturated. Opposite displacements therefore
/// map to exact complementary colors.
struct FlowColorSpec {
    // <= 0 selects the default: the 99th percentile (nearest-rank) of |D|,
    // falling back to 1 for an all-zero field.
    double max_magnitude = 0.0;
};

RgbImage flow_to_rgb(const DisplacementField& disp, const FlowColorSpec& spec = {});

using Palette = std::map<int, std::array<std::uint8_t, 3>>;

/// Recolors class indices through the palette; ignore_index renders black.
/// A present class without a palette entry is a config error.
RgbImage colorize_labels(const LabelMap& labels, const Palette& palette);

/// Replaces pixels where the edge mask is true with the given color.
RgbImage overlay_edges(const RgbImage& img, const BinaryMask& edges,
                       std::array<std::uint8_t, 3> color);

/// The usual 19-class street-scene palette (road, sidewalk, building, ...).
Palette street_scene_palette();

} // namespace bk
