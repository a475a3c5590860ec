#pragma once

#include <vector>

#include "msdc/image.hpp"

namespace msdc {

/// Peak signal-to-noise ratio for unit peak. Returns +infinity when the images match.
double psnr(const SpectralImage& a, const SpectralImage& b);

/// PSNR of each channel separately.
std::vector<double> psnr_per_channel(const SpectralImage& a, const SpectralImage& b);

/// Mean structural similarity over channels.
///
/// Uses the reference formulation: 11x11 Gaussian window with sigma 1.5, statistics
/// over the "valid" region only, C1 = 0.01^2 and C2 = 0.03^2 for a unit dynamic
/// range. Requires both dimensions >= 11.
double ssim(const SpectralImage& a, const SpectralImage& b);

/// Mean spectral angle in degrees. Pixels where either spectrum has norm below
/// 1e-8 are excluded; returns 0 when no pixel qualifies.
double sam(const SpectralImage& a, const SpectralImage& b);

}  // namespace msdc
