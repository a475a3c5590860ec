#pragma once

#include "msdc/image.hpp"

namespace msdc {

/// Samples one channel per pixel according to the pattern.
/// Throws ConfigError when img.channels() != pattern.channel_count.
MosaicImage apply_mosaic(const SpectralImage& img, const MosaicPattern& pattern);

/// Non-learned baseline demosaic. Sampled pixels are copied exactly; every other
/// pixel of channel c is the tent-weighted (separable bilinear) normalized average
/// of the channel's samples within one tile period.
SpectralImage demosaic_interp(const MosaicImage& mosaic);

}  // namespace msdc
