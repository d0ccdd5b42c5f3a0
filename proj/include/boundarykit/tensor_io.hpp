#pragma once

#include <string>

#include "boundarykit/grid.hpp"

namespace bk {

// BWTF binary tensor files, little-endian:
//   magic "BWTF" (4 bytes), format version u32 = 1, rank u8,
//   rank x u32 dims, then row-major 32-bit floats.
// This toolkit writes and reads rank-3 tensors only: feature maps as
// C x H x W, displacement fields as 2 x H x W with dx = channel 0 and
// dy = channel 1. Round trips are bit-exact. Malformed files raise
// DataError with the offending byte offset.

void write_tensor(const FeatureMap& value, const std::string& path);
void write_tensor(const DisplacementField& value, const std::string& path);

FeatureMap read_feature_map(const std::string& path);
DisplacementField read_displacement_field(const std::string& path);

} // namespace bk
