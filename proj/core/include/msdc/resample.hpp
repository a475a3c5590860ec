#pragma once

#include "msdc/image.hpp"

namespace msdc {

/// Mean over non-overlapping factor x factor blocks.
/// Throws DimensionError unless both dimensions are divisible by factor.
SpectralImage box_downsample(const SpectralImage& img, int factor);

/// Keys bicubic (a = -0.5) upsampling with pixel-center alignment and edge clamping.
SpectralImage bicubic_upsample(const SpectralImage& img, int factor);

/// out(y, x) = img(y, x - shift) with bilinear interpolation and edge clamping,
/// i.e. content moves right by `shift` pixels.
SpectralImage translate_horizontal(const SpectralImage& img, double shift);

}  // namespace msdc
