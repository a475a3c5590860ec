#include "msdc/noise.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "msdc/error.hpp"
#include "msdc/rng.hpp"

namespace msdc {

double NoiseModel::variance(int channel, double intensity) const
{
    const std::size_t k = entries() == 1 ? 0 : std::size_t(channel);
    return std::max(0.0, beta1[k] * intensity + beta2[k]);
}

void NoiseModel::check_channels(int channels) const
{
    if (beta1.size() != beta2.size() || beta1.empty())
        throw ConfigError("noise model: beta1/beta2 must be non-empty and equally sized");
    if (entries() != 1 && entries() != std::size_t(channels))
        throw ConfigError("noise model has " + std::to_string(entries()) +
                          " entries, image has " + std::to_string(channels) + " channels");
    for (std::size_t i = 0; i < entries(); ++i)
        if (beta1[i] < 0.0 || beta2[i] < 0.0)
            throw ConfigError("noise model: negative beta");
}

NoiseModel NoiseModel::uniform(double beta1, double beta2, std::string tag)
{
    return {{beta1}, {beta2}, std::move(tag)};
}

NoiseFit calibrate_noise_with_residuals(const std::vector<NoiseSample>& samples)
{
    if (samples.empty())
        throw CalibrationError("calibrate_noise: no samples");
    int channels = 0;
    for (const auto& s : samples) {
        if (s.channel < 0)
            throw CalibrationError("calibrate_noise: negative channel index");
        channels = std::max(channels, s.channel + 1);
    }

    NoiseFit fit;
    fit.model.beta1.assign(std::size_t(channels), 0.0);
    fit.model.beta2.assign(std::size_t(channels), 0.0);
    fit.rms_residual.assign(std::size_t(channels), 0.0);
    for (int c = 0; c < channels; ++c) {
        std::vector<const NoiseSample*> rows;
        std::set<double> distinct;
        for (const auto& s : samples)
            if (s.channel == c) {
                rows.push_back(&s);
                distinct.insert(s.mean);
            }
        if (distinct.size() < 2)
            throw CalibrationError("calibrate_noise: channel " + std::to_string(c) +
                                   " needs at least two distinct mean intensities");
        const double n = double(rows.size());
        double mx = 0.0, my = 0.0;
        for (const auto* r : rows) {
            mx += r->mean;
            my += r->variance;
        }
        mx /= n;
        my /= n;
        double sxx = 0.0, sxy = 0.0;
        for (const auto* r : rows) {
            sxx += (r->mean - mx) * (r->mean - mx);
            sxy += (r->mean - mx) * (r->variance - my);
        }
        const double slope = sxy / sxx;
        const double intercept = my - slope * mx;
        double ss = 0.0;
        for (const auto* r : rows) {
            const double e = r->variance - (slope * r->mean + intercept);
            ss += e * e;
        }
        fit.model.beta1[std::size_t(c)] = std::max(0.0, slope);
        fit.model.beta2[std::size_t(c)] = std::max(0.0, intercept);
        fit.rms_residual[std::size_t(c)] = std::sqrt(ss / n);
    }
    return fit;
}

NoiseModel calibrate_noise(const std::vector<NoiseSample>& samples)
{
    return calibrate_noise_with_residuals(samples).model;
}

SpectralImage synth_noise(const SpectralImage& img, const NoiseModel& model, std::uint64_t seed,
                          std::uint32_t stream)
{
    model.check_channels(img.channels());
    SpectralImage out = img;
    auto src = img.data();
    auto dst = out.data();
    const int ch = img.channels();
    for (std::size_t i = 0; i < src.size(); ++i) {
        const double v = src[i];
        const double sigma = std::sqrt(model.variance(int(i % std::size_t(ch)), v));
        if (sigma == 0.0)
            continue;  // leaves the input bit-identical
        const double z = philox_normal(seed, stream, i);
        dst[i] = float(std::max(0.0, v + sigma * z));
    }
    return out;
}

}  // namespace msdc
