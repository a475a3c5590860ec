#include "msdc/pipeline/trainer.hpp"

#include <numeric>

#include "msdc/error.hpp"
#include "msdc/resample.hpp"

namespace msdc::pipeline {

void TrainConfig::validate(int levels) const
{
    if (stage != 1 && stage != 2)
        throw ConfigError("train: stage must be 1 or 2");
    if (scenario != 1 && scenario != 2)
        throw ConfigError("train: scenario must be 1 or 2");
    if (iterations < 0 || batch_size < 1 || lr < 0.0)
        throw ConfigError("train: iterations >= 0, batch_size >= 1 and lr >= 0 required");
    const int unit = std::lcm(4, 1 << levels);
    const int ms_patch = scenario == 2 ? patch_size / 4 : patch_size;
    if (patch_size <= 0 || patch_size % unit != 0 || ms_patch % unit != 0 ||
        (scenario == 2 && patch_size % 4 != 0))
        throw ConfigError("train: patch_size " + std::to_string(patch_size) +
                          " must be divisible by " + std::to_string(unit) +
                          (scenario == 2 ? " after the 4x reduction" : ""));
}

namespace {

using nn::Tensor;

void check_data(const std::vector<DatasetQuadruplet>& data, const TrainConfig& cfg,
                const ModelBundle<float>& m)
{
    if (data.empty())
        throw ConfigError("train: empty dataset");
    if (cfg.scenario != m.config.scenario)
        throw ConfigError("train: config scenario does not match the model");
    cfg.validate(m.levels());
    for (const auto& q : data) {
        if (q.scenario != cfg.scenario)
            throw ConfigError("train: sample scenario does not match the config");
        if (q.rgb_mosaic.plane.height() < cfg.patch_size ||
            q.rgb_mosaic.plane.width() < cfg.patch_size)
            throw DimensionError("train: sample " + q.rgb_mosaic.plane.shape_string() +
                                 " smaller than patch " + std::to_string(cfg.patch_size));
    }
}

struct Crop {
    int index, y0, x0;
};

// Uniform scene and aligned top-left corner. `align` keeps MSFA/Bayer phase
// and pyramid alignment; the MS crop in scenario 2 lives at y0/4, x0/4.
Crop draw_crop(Rng& rng, const std::vector<DatasetQuadruplet>& data, int patch, int align)
{
    Crop c;
    c.index = rng.below(int(data.size()));
    const auto& plane = data[std::size_t(c.index)].rgb_mosaic.plane;
    c.y0 = rng.below((plane.height() - patch) / align + 1) * align;
    c.x0 = rng.below((plane.width() - patch) / align + 1) * align;
    return c;
}

double scalar(const Var<float>& v) { return double(v->value[0]); }

}  // namespace

std::vector<IterationLog> train_stage1(ModelBundle<float>& m,
                                       const std::vector<DatasetQuadruplet>& data,
                                       const TrainConfig& cfg, const TrainCallback& on_iter)
{
    if (cfg.stage != 1)
        throw ConfigError("train_stage1: config stage must be 1");
    check_data(data, cfg, m);
    const bool s2 = cfg.scenario == 2;
    const int ms_scale = s2 ? 4 : 1;
    const int align = std::lcm(4, 1 << (m.levels() - 1)) * ms_scale;

    struct Cache {
        Tensor<float> ms_in, rgb_in, ms_gt, rgb_gt, ms_hr;
    };
    std::vector<Cache> cache;
    for (const auto& q : data)
        cache.push_back({demosaic_input<float>(q.ms_mosaic), demosaic_input<float>(q.rgb_mosaic),
                         to_tensor<float>(q.ms_gt), to_tensor<float>(q.rgb_gt),
                         s2 ? to_tensor<float>(q.ms_target) : Tensor<float>()});

    auto ms_params = m.d_ms.parameters();
    if (m.upsampler)
        for (auto* p : m.upsampler->parameters())
            ms_params.push_back(p);
    auto rgb_params = m.d_rgb.parameters();
    const nn::AdamConfig adam{cfg.lr};
    Rng rng(cfg.seed);
    const float inv_batch = 1.0f / float(cfg.batch_size);
    const int P = cfg.patch_size, p = P / ms_scale;

    std::vector<IterationLog> logs;
    for (int it = 1; it <= cfg.iterations; ++it) {
        nn::zero_grad(ms_params);
        nn::zero_grad(rgb_params);
        IterationLog log{it};
        for (int b = 0; b < cfg.batch_size; ++b) {
            const Crop c = draw_crop(rng, data, P, align);
            const Cache& s = cache[std::size_t(c.index)];
            const int my = c.y0 / ms_scale, mx = c.x0 / ms_scale;

            auto g = demosaic_graph(m.d_ms, s.ms_in.crop(my, mx, p, p));
            Var<float> ms_loss = nn::l2_loss(g.out, s.ms_gt.crop(my, mx, p, p));
            if (s2) {
                Tensor<float> base =
                    to_tensor<float>(bicubic_upsample(to_image(g.out->value), 4));
                auto hr = nn::add(nn::constant(std::move(base)), (*m.upsampler)(g.features[0]));
                ms_loss = nn::add(ms_loss, nn::l2_loss(hr, s.ms_hr.crop(c.y0, c.x0, P, P)));
            }
            log.ms_loss += scalar(ms_loss) * inv_batch;
            nn::backward(nn::scale(ms_loss, inv_batch));

            auto r = demosaic_graph(m.d_rgb, s.rgb_in.crop(c.y0, c.x0, P, P));
            Var<float> rgb_loss = nn::l2_loss(r.out, s.rgb_gt.crop(c.y0, c.x0, P, P));
            log.rgb_loss += scalar(rgb_loss) * inv_batch;
            nn::backward(nn::scale(rgb_loss, inv_batch));
        }
        nn::adam_step(ms_params, adam);
        nn::adam_step(rgb_params, adam);
        log.loss = log.ms_loss + log.rgb_loss;
        logs.push_back(log);
        if (on_iter)
            on_iter(log);
    }
    nn::zero_grad(m.demosaic_parameters());
    m.stage1_done = true;
    return logs;
}

std::vector<IterationLog> train_stage2(ModelBundle<float>& m,
                                       const std::vector<DatasetQuadruplet>& data,
                                       const TrainConfig& cfg, const TrainCallback& on_iter)
{
    if (cfg.stage != 2)
        throw ConfigError("train_stage2: config stage must be 2");
    if (!m.stage1_done)
        throw ConfigError("train_stage2: missing stage-1 checkpoint (demosaicing networks untrained)");
    if (!m.color_matrix)
        throw ConfigError("train_stage2: fusion requires a calibrated color matrix");
    check_data(data, cfg, m);
    const int align = std::lcm(4, 1 << (m.levels() - 1)) * (cfg.scenario == 2 ? 4 : 1);

    std::vector<FusionContext<float>> contexts;
    std::vector<Tensor<float>> targets;
    for (const auto& q : data) {
        const auto d = forward_demosaic(q, m);
        const SpectralImage ms = cfg.scenario == 2 ? upsample_ms(d, m) : d.ms;
        contexts.push_back(make_fusion_context(ms, d.rgb, d.rgb_features, m));
        targets.push_back(to_tensor<float>(q.ms_target));
    }

    auto params = m.fusion_parameters();
    const nn::AdamConfig adam{cfg.lr};
    Rng rng(cfg.seed);
    const float inv_batch = 1.0f / float(cfg.batch_size);
    const int P = cfg.patch_size;

    std::vector<IterationLog> logs;
    for (int it = 1; it <= cfg.iterations; ++it) {
        nn::zero_grad(params);
        IterationLog log{it};
        for (int b = 0; b < cfg.batch_size; ++b) {
            const Crop c = draw_crop(rng, data, P, align);
            auto out = fusion_graph(contexts[std::size_t(c.index)].crop(c.y0, c.x0, P, P), m);
            auto loss = nn::l2_loss(out, targets[std::size_t(c.index)].crop(c.y0, c.x0, P, P));
            log.loss += scalar(loss) * inv_batch;
            nn::backward(nn::scale(loss, inv_batch));
        }
        nn::adam_step(params, adam);
        logs.push_back(log);
        if (on_iter)
            on_iter(log);
    }
    nn::zero_grad(params);
    return logs;
}

}  // namespace msdc::pipeline
