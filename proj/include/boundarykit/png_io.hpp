#pragma once

#include <string>

#include "boundarykit/grid.hpp"

namespace bk {

/// Reads an 8-bit single-channel or paletted PNG as class indices. Paletted
/// images yield the palette indices themselves, never the palette colors.
/// 16-bit or RGB(A) files raise DataError telling the caller to use index
/// images. Values must be < num_classes or equal to ignore_index.
LabelMap read_label_png(const std::string& path, int num_classes = 256,
                        int ignore_index = 255);

/// Writes the indices as an 8-bit grayscale PNG. Round-trips bit-exactly.
void write_label_png(const LabelMap& map, const std::string& path);

/// Reads any 8/16-bit gray, paletted, RGB or RGBA PNG as 8-bit RGB.
RgbImage read_rgb_png(const std::string& path);

void write_rgb_png(const RgbImage& img, const std::string& path);

/// Mask PNGs store false as 0 and true as 255 in an 8-bit gray image.
BinaryMask read_mask_png(const std::string& path);
void write_mask_png(const BinaryMask& mask, const std::string& path);

} // namespace bk
