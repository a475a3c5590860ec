#include "msdc/dataset.hpp"

#include "msdc/error.hpp"
#include "msdc/mosaic.hpp"
#include "msdc/resample.hpp"

namespace msdc {

DatasetQuadruplet synth_quadruplet(const SpectralImage& ms_gt, const SpectralImage& rgb_gt,
                                   const NoiseModel& ms_noise, const NoiseModel& rgb_noise,
                                   const QuadrupletOptions& options)
{
    if (options.scenario != 1 && options.scenario != 2)
        throw ConfigError("synth_quadruplet: scenario must be 1 or 2");
    if (ms_gt.channels() != 16)
        throw DimensionError("synth_quadruplet: MS ground truth must have 16 channels, got " +
                             ms_gt.shape_string());
    if (rgb_gt.channels() != 3)
        throw DimensionError("synth_quadruplet: RGB ground truth must have 3 channels, got " +
                             rgb_gt.shape_string());
    if (ms_gt.height() != rgb_gt.height() || ms_gt.width() != rgb_gt.width())
        throw DimensionError("synth_quadruplet: MS " + ms_gt.shape_string() + " and RGB " +
                             rgb_gt.shape_string() + " views differ in size");
    const int tile = options.scenario == 2 ? 16 : 4;
    if (ms_gt.height() % tile != 0 || ms_gt.width() % tile != 0)
        throw DimensionError("synth_quadruplet: dimensions must be multiples of " +
                             std::to_string(tile));
    ms_noise.check_channels(16);
    rgb_noise.check_channels(3);

    DatasetQuadruplet q;
    q.scenario = options.scenario;
    q.baseline_px = options.shift_px;
    q.ms_target = ms_gt;
    q.ms_gt = options.scenario == 2 ? box_downsample(ms_gt, 4) : ms_gt;
    q.rgb_gt = options.shift_px == 0.0 ? rgb_gt : translate_horizontal(rgb_gt, options.shift_px);

    const auto ms_noisy = synth_noise(q.ms_gt, ms_noise, options.seed, kMsNoiseStream);
    const auto rgb_noisy = synth_noise(q.rgb_gt, rgb_noise, options.seed, kRgbNoiseStream);
    q.ms_mosaic = apply_mosaic(ms_noisy, MosaicPattern::msfa16());
    q.rgb_mosaic = apply_mosaic(rgb_noisy, MosaicPattern::bayer_grbg());
    return q;
}

DatasetQuadruplet synth_quadruplet(const SpectralImage& ms_gt, const SpectralImage& rgb_gt,
                                   const NoiseModel& noise, const QuadrupletOptions& options)
{
    return synth_quadruplet(ms_gt, rgb_gt, noise, noise, options);
}

NoiseModel expand_rgb_noise_to_ms(const NoiseModel& rgb_model, const std::vector<int>& source)
{
    rgb_model.check_channels(3);
    NoiseModel out;
    out.iso_tag = rgb_model.iso_tag;
    for (int s : source) {
        if (s < 0 || s > 2)
            throw ConfigError("expand_rgb_noise_to_ms: source channel out of range");
        const std::size_t k = rgb_model.entries() == 1 ? 0 : std::size_t(s);
        out.beta1.push_back(rgb_model.beta1[k]);
        out.beta2.push_back(rgb_model.beta2[k]);
    }
    return out;
}

}  // namespace msdc
