#pragma once

#include <cstdint>

#include "msdc/image.hpp"
#include "msdc/noise.hpp"

namespace msdc {

/// One training/evaluation sample of the dual-camera setup.
struct DatasetQuadruplet {
    MosaicImage ms_mosaic;   // 4x4 MSFA
    MosaicImage rgb_mosaic;  // 2x2 Bayer
    SpectralImage ms_gt;     // clean, same size as ms_mosaic
    SpectralImage rgb_gt;    // clean, RGB view, same size as rgb_mosaic
    /// Full-resolution MS target. Equals ms_gt in scenario 1; in scenario 2 it is
    /// the clean MS image before the 4x reduction.
    SpectralImage ms_target;
    double baseline_px = 0.0;
    int scenario = 1;
};

struct QuadrupletOptions {
    int scenario = 1;         // 1: same resolution, 2: MS at 1/4 resolution
    double shift_px = 0.0;    // horizontal translation applied to the RGB view
    std::uint64_t seed = 0;
};

/// Noise streams used by synth_quadruplet for the two views.
inline constexpr std::uint32_t kMsNoiseStream = 1;
inline constexpr std::uint32_t kRgbNoiseStream = 2;

/// Builds a quadruplet from aligned ground truths. The RGB view is translated by
/// shift_px; in scenario 2 the MS view is box-downsampled by 4 before noise.
/// Noise is applied to the clean images before mosaicking; ground truths stay clean.
/// `ms_noise` and `rgb_noise` must each have 1 entry or one per channel.
DatasetQuadruplet synth_quadruplet(const SpectralImage& ms_gt, const SpectralImage& rgb_gt,
                                   const NoiseModel& ms_noise, const NoiseModel& rgb_noise,
                                   const QuadrupletOptions& options);

/// Single-model convenience overload (model broadcast or per-channel for both views).
DatasetQuadruplet synth_quadruplet(const SpectralImage& ms_gt, const SpectralImage& rgb_gt,
                                   const NoiseModel& noise, const QuadrupletOptions& options);

/// Expands a per-RGB-channel model to the 16 MS channels using each MS curve's
/// source RGB channel.
NoiseModel expand_rgb_noise_to_ms(const NoiseModel& rgb_model, const std::vector<int>& source);

}  // namespace msdc
