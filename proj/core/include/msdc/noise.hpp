#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "msdc/image.hpp"

namespace msdc {

/// Heteroscedastic noise law: variance(I) = beta1 * I + beta2, per channel.
/// A single entry is broadcast to every channel.
struct NoiseModel {
    std::vector<double> beta1;
    std::vector<double> beta2;
    std::string iso_tag;

    std::size_t entries() const noexcept { return beta1.size(); }
    double variance(int channel, double intensity) const;
    /// Throws ConfigError when the model cannot cover `channels` channels.
    void check_channels(int channels) const;

    static NoiseModel uniform(double beta1, double beta2, std::string tag = {});
};

/// One homogeneous-patch statistic used for calibration.
struct NoiseSample {
    int channel = 0;
    double mean = 0.0;
    double variance = 0.0;
};

/// Per-channel ordinary least squares fit of variance = beta1 * mean + beta2;
/// negative coefficients are clamped to zero. Channels are 0..max(channel).
/// Throws CalibrationError when a channel has fewer than two distinct means.
NoiseModel calibrate_noise(const std::vector<NoiseSample>& samples);

/// Same fit, also reporting the RMS residual of each channel's line.
struct NoiseFit {
    NoiseModel model;
    std::vector<double> rms_residual;
};
NoiseFit calibrate_noise_with_residuals(const std::vector<NoiseSample>& samples);

/// out = max(0, img + N(0, beta1 * img + beta2)). Draws come from Philox keyed by
/// `seed`, with counter (linear sample index, stream), so the result is independent
/// of traversal order.
SpectralImage synth_noise(const SpectralImage& img, const NoiseModel& model,
                          std::uint64_t seed, std::uint32_t stream = 0);

}  // namespace msdc
