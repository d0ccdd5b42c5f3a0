#pragma once

#include "boundarykit/grid.hpp"

namespace bk {

enum class BorderMode {
    Clamp, // sample coordinates are clamped into the image, default
    Zeros, // out-of-range neighbors contribute 0
};

struct WarpConfig {
    BorderMode border_mode = BorderMode::Clamp;
    // Displacement units are pixels at the output resolution.
};

struct WarpGradients {
    FeatureMap d_features;     // same shape as the forward features input
    DisplacementField d_disp;  // same shape as the forward displacement input
};

/// Backward warping: every output position p gathers from p_hat = p + D(p)
/// by bilinear interpolation over the four integer neighbors of p_hat. The
/// bilinear weights sum to 1; a zero displacement reproduces the input
/// bit-exactly. Coordinates use x rightward, y downward. Interpolation runs
/// in double and is stored as float.
FeatureMap warp(const FeatureMap& features, const DisplacementField& disp,
                const WarpConfig& cfg = {});

/// Analytic gradients of warp. d_features scatters upstream times the
/// bilinear weights back to the four source neighbors (the transpose of the
/// gather); d_disp contracts upstream with the horizontal/vertical
/// differences of the neighbor values. Where clamping pinned a coordinate,
/// the spatial derivative in that direction is zero. At exact-integer
/// coordinates the floor-based cell supplies the one-sided derivative.
WarpGradients warp_backward(const FeatureMap& features, const DisplacementField& disp,
                            const FeatureMap& upstream, const WarpConfig& cfg = {});

/// Sum over channels and pixels of upstream * warp(features, disp), fully in
/// double with no float32 rounding of intermediate outputs. This is the
/// scalar objective finite-difference gradient checks differentiate.
double warp_scalar_loss(const FeatureMap& features, const DisplacementField& disp,
                        const FeatureMap& upstream, const WarpConfig& cfg = {});

/// Upsamples the coarse map to the displacement field's size, then warps it:
/// the boundary-refinement composition. With D = 0 this equals plain
/// bilinear upsampling.
FeatureMap refine(const FeatureMap& coarse, const DisplacementField& disp,
                  const WarpConfig& cfg = {});

} // namespace bk
