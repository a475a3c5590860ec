#include "msdc/pipeline/benchmark.hpp"

#include "msdc/error.hpp"
#include "msdc/scene.hpp"

namespace msdc::pipeline {

NoiseModel iso400_like_noise()
{
    return NoiseModel::uniform(5e-4, 5e-6, "iso400-like");
}

ToyBenchmark make_toy_benchmark(const ToyBenchmarkConfig& cfg)
{
    if (cfg.scenes < 2 || cfg.train_scenes < 1 || cfg.train_scenes >= cfg.scenes)
        throw ConfigError("benchmark: need at least one training and one test scene");
    const SceneRenderer renderer;
    ToyBenchmark b;
    for (int s = 0; s < cfg.scenes; ++s) {
        const ScenePair scene = make_texture_scene(cfg.size, cfg.size, cfg.seed * 1000 + s, renderer);
        QuadrupletOptions opt;
        opt.scenario = cfg.scenario;
        opt.shift_px = cfg.shift_px;
        opt.seed = cfg.seed * 1000 + 500 + s;
        auto q = synth_quadruplet(scene.ms, scene.rgb, iso400_like_noise(), opt);
        (s < cfg.train_scenes ? b.train : b.test).push_back(std::move(q));
    }
    const PatchTable patches = make_color_patches(cfg.color_patches, cfg.seed * 1000 + 999, renderer);
    b.color_matrix = fit_color_matrix(patches.ms, patches.rgb);
    return b;
}

namespace {

template <typename F>
MetricsReport mean_report(const std::vector<DatasetQuadruplet>& data, F&& predict)
{
    if (data.empty())
        throw ConfigError("evaluate: empty sample list");
    MetricsReport mean;
    for (const auto& q : data) {
        const MetricsReport r = evaluate(predict(q), q.ms_target);
        mean.psnr += r.psnr / double(data.size());
        mean.ssim += r.ssim / double(data.size());
        mean.sam += r.sam / double(data.size());
        if (mean.psnr_per_channel.empty())
            mean.psnr_per_channel.assign(r.psnr_per_channel.size(), 0.0);
        for (std::size_t c = 0; c < r.psnr_per_channel.size(); ++c)
            mean.psnr_per_channel[c] += r.psnr_per_channel[c] / double(data.size());
    }
    return mean;
}

}  // namespace

MetricsReport evaluate_model(const ModelBundle<float>& m, const std::vector<DatasetQuadruplet>& data)
{
    return mean_report(data, [&m](const DatasetQuadruplet& q) { return reconstruct(q, m); });
}

MetricsReport evaluate_baseline(const std::vector<DatasetQuadruplet>& data)
{
    return mean_report(data, [](const DatasetQuadruplet& q) { return interpolation_baseline(q); });
}

}  // namespace msdc::pipeline
