#pragma once

#include "boundarykit/grid.hpp"

namespace bk {

/// Bilinear upsampling with the align-corners=false convention: the source
/// coordinate of output pixel d is (d + 0.5) * scale - 0.5 with
/// scale = src_size / dst_size, clamped to the valid range. Accumulation is
/// done in double; constant inputs produce bit-identical constant outputs.
/// Requires out_height >= src.height and out_width >= src.width.
FeatureMap bilinear_upsample(const FeatureMap& src, int out_height, int out_width);

} // namespace bk
