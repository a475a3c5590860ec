#include "msdc/pipeline/model.hpp"

#include <set>

#include "json.hpp"
#include "msdc/error.hpp"
#include "msdc/mosaic.hpp"
#include "msdc/msi_io.hpp"
#include "msdc/neuro/checkpoint.hpp"
#include "msdc/resample.hpp"

namespace msdc::pipeline {

using nlohmann::json;

std::string to_string(Guidance g)
{
    switch (g) {
    case Guidance::none: return "none";
    case Guidance::image_unaligned: return "image_unaligned";
    case Guidance::image_warped: return "image_warped";
    case Guidance::sal: return "sal";
    }
    return "none";
}

Guidance guidance_from_string(const std::string& s)
{
    for (Guidance g : {Guidance::none, Guidance::image_unaligned, Guidance::image_warped,
                       Guidance::sal})
        if (to_string(g) == s)
            return g;
    throw ConfigError("unknown guidance mode '" + s +
                      "' (expected none, image_unaligned, image_warped or sal)");
}

std::string ModelConfig::to_json() const
{
    return json{{"width", net.width},       {"blocks", net.blocks},
                {"levels", net.levels},     {"guidance", to_string(guidance)},
                {"scenario", scenario},     {"max_offset", max_offset},
                {"seed", seed}}
        .dump();
}

ModelConfig ModelConfig::from_json(const std::string& text)
{
    ModelConfig c;
    try {
        const json j = json::parse(text);
        static const std::set<std::string> known{"width",    "blocks",     "levels", "guidance",
                                                 "scenario", "max_offset", "seed"};
        for (const auto& [key, value] : j.items())
            if (!known.count(key))
                throw ConfigError("model config: unknown key '" + key + "'");
        c.net.width = j.at("width").get<int>();
        c.net.blocks = j.at("blocks").get<int>();
        c.net.levels = j.at("levels").get<int>();
        c.guidance = guidance_from_string(j.at("guidance").get<std::string>());
        c.scenario = j.at("scenario").get<int>();
        c.max_offset = j.at("max_offset").get<double>();
        c.seed = j.at("seed").get<std::uint64_t>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("model config: ") + e.what());
    }
    return c;
}

bool ModelConfig::compatible(const ModelConfig& o) const
{
    return net.width == o.net.width && net.blocks == o.net.blocks &&
           net.levels == o.net.levels && scenario == o.scenario;
}

template <typename T>
ModelBundle<T>::ModelBundle(const ModelConfig& cfg) : config(cfg)
{
    if (cfg.scenario != 1 && cfg.scenario != 2)
        throw ConfigError("scenario must be 1 or 2");
    Rng rng(cfg.seed);
    const int c = cfg.net.width;
    d_ms = UNet<T>("d_ms", kMsChannels + 1, kMsChannels, 0, cfg.net, rng, 0.1);
    d_rgb = UNet<T>("d_rgb", kRgbChannels + 1, kRgbChannels, 0, cfg.net, rng, 0.1);
    if (cfg.scenario == 2)
        upsampler.emplace("upsampler", c, kMsChannels, kMsChannels, rng);
    for (int l = 0; l < cfg.net.levels; ++l)
        sal.emplace_back("sal" + std::to_string(l), c, c, rng, T(cfg.max_offset));
    fusion = UNet<T>("fusion", kMsChannels + kRgbChannels, kMsChannels, c, cfg.net, rng, 0.05);
}

template <typename T>
std::vector<Parameter<T>*> ModelBundle<T>::demosaic_parameters()
{
    auto p = d_ms.parameters();
    for (auto* q : d_rgb.parameters())
        p.push_back(q);
    if (upsampler)
        for (auto* q : upsampler->parameters())
            p.push_back(q);
    return p;
}

template <typename T>
std::vector<Parameter<T>*> ModelBundle<T>::fusion_parameters()
{
    std::vector<Parameter<T>*> p;
    for (auto& k : sal)
        for (auto* q : k.parameters())
            p.push_back(q);
    for (auto* q : fusion.parameters())
        p.push_back(q);
    return p;
}

template <typename T>
std::vector<Parameter<T>*> ModelBundle<T>::all_parameters()
{
    auto p = demosaic_parameters();
    for (auto* q : fusion_parameters())
        p.push_back(q);
    return p;
}

template <typename T>
Tensor<T> to_tensor(const SpectralImage& img)
{
    const int h = img.height(), w = img.width(), ch = img.channels();
    Tensor<T> t({ch, h, w});
    const float* src = img.data().data();
    const std::size_t plane = img.pixel_count();
    for (std::size_t p = 0; p < plane; ++p)
        for (int c = 0; c < ch; ++c)
            t[std::size_t(c) * plane + p] = T(src[p * ch + c]);
    return t;
}

template <typename T>
SpectralImage to_image(const Tensor<T>& t)
{
    if (t.rank() != 3)
        throw DimensionError("to_image: expected (C,H,W), got " + t.shape_string());
    SpectralImage img(t.height(), t.width(), t.channels());
    float* dst = img.data().data();
    const std::size_t plane = t.plane();
    const int ch = t.channels();
    for (std::size_t p = 0; p < plane; ++p)
        for (int c = 0; c < ch; ++c)
            dst[p * ch + c] = float(t[std::size_t(c) * plane + p]);
    return img;
}

template <typename T>
Tensor<T> demosaic_input(const MosaicImage& mosaic)
{
    const SpectralImage interp = demosaic_interp(mosaic);
    const int ch = interp.channels();
    Tensor<T> t({ch + 1, interp.height(), interp.width()});
    const Tensor<T> pre = to_tensor<T>(interp);
    std::copy(pre.data(), pre.data() + pre.numel(), t.data());
    const auto raw = mosaic.plane.data();
    for (std::size_t p = 0; p < raw.size(); ++p)
        t[pre.numel() + p] = T(raw[p]);
    return t;
}

template <typename T>
DemosaicGraph<T> demosaic_graph(const UNet<T>& net, const Tensor<T>& input)
{
    const int ch = input.channels() - 1;
    Tensor<T> prefill({ch, input.height(), input.width()});
    std::copy(input.data(), input.data() + prefill.numel(), prefill.data());
    auto r = net.forward(nn::constant(input));
    return {nn::add(nn::constant(std::move(prefill)), r.out), std::move(r.features)};
}

template <typename T>
DemosaicOutput<T> forward_demosaic(const DatasetQuadruplet& q, const ModelBundle<T>& m)
{
    if (q.ms_mosaic.pattern.channel_count != kMsChannels ||
        q.rgb_mosaic.pattern.channel_count != kRgbChannels)
        throw DimensionError("forward_demosaic: expected 16-band MS and 3-band RGB mosaics");
    DemosaicOutput<T> out;
    {
        auto g = demosaic_graph(m.d_ms, demosaic_input<T>(q.ms_mosaic));
        out.ms = to_image(g.out->value);
        for (auto& f : g.features)
            out.ms_features.push_back(f->value);
    }
    {
        auto g = demosaic_graph(m.d_rgb, demosaic_input<T>(q.rgb_mosaic));
        out.rgb = to_image(g.out->value);
        for (auto& f : g.features)
            out.rgb_features.push_back(f->value);
    }
    return out;
}

template <typename T>
SpectralImage upsample_ms(const DemosaicOutput<T>& d, const ModelBundle<T>& m)
{
    if (!m.upsampler)
        throw ConfigError("upsample_ms: model has no upsampler (scenario 1 model)");
    auto corr = (*m.upsampler)(nn::constant(d.ms_features.front()));
    Tensor<T> base = to_tensor<T>(bicubic_upsample(d.ms, 4));
    return to_image(nn::add(nn::constant(std::move(base)), corr)->value);
}

FlowField cross_spectral_flow(const SpectralImage& ms, const SpectralImage& rgb,
                              const ColorMatrix& matrix, const FlowParams& params)
{
    const SpectralImage proxy = to_srgb_preview(ms_to_proxy_rgb(ms, matrix), std::nullopt);
    const SpectralImage view = to_srgb_preview(rgb, std::nullopt);
    return estimate_flow(proxy, view, params);
}

template <typename T>
FusionContext<T> FusionContext<T>::crop(int y0, int x0, int h, int w) const
{
    FusionContext c;
    c.ms = ms.crop(y0, x0, h, w);
    c.image_guide = image_guide.crop(y0, x0, h, w);
    for (std::size_t l = 0; l < rgb_features.size(); ++l) {
        const int f = 1 << l;
        if (y0 % f || x0 % f || h % f || w % f)
            throw DimensionError("fusion crop not aligned to level " + std::to_string(l));
        c.rgb_features.push_back(rgb_features[l].crop(y0 / f, x0 / f, h / f, w / f));
        c.level_flows.push_back(level_flows[l].crop(y0 / f, x0 / f, h / f, w / f));
    }
    return c;
}

template <typename T>
FusionContext<T> make_fusion_context(const SpectralImage& ms, const SpectralImage& rgb,
                                     const std::vector<Tensor<T>>& rgb_features,
                                     const ModelBundle<T>& m)
{
    if (!m.color_matrix)
        throw ConfigError("fusion requires a calibrated color matrix");
    if (ms.channels() != kMsChannels || rgb.channels() != kRgbChannels ||
        ms.height() != rgb.height() || ms.width() != rgb.width())
        throw DimensionError("fusion: MS " + ms.shape_string() + " and RGB " +
                             rgb.shape_string() + " views do not match");
    const Guidance g = m.config.guidance;
    FusionContext<T> c;
    c.ms = to_tensor<T>(ms);
    if (g == Guidance::image_warped || g == Guidance::sal)
        c.flow = cross_spectral_flow(ms, rgb, *m.color_matrix, m.flow_params);
    switch (g) {
    case Guidance::image_unaligned: c.image_guide = to_tensor<T>(rgb); break;
    case Guidance::image_warped: c.image_guide = to_tensor<T>(warp_backward(rgb, c.flow)); break;
    default: c.image_guide = Tensor<T>({kRgbChannels, ms.height(), ms.width()});
    }
    if (g == Guidance::sal) {
        if (int(rgb_features.size()) != m.levels())
            throw DimensionError("fusion: expected " + std::to_string(m.levels()) +
                                 " RGB feature levels");
        for (int l = 0; l < m.levels(); ++l) {
            const Tensor<T>& f = rgb_features[std::size_t(l)];
            if (f.rank() != 3 || f.height() * (1 << l) != ms.height() ||
                f.width() * (1 << l) != ms.width())
                throw DimensionError("fusion: RGB feature level " + std::to_string(l) + " " +
                                     f.shape_string() + " has wrong size");
            c.rgb_features.push_back(f);
            c.level_flows.push_back(nn::flow_tensor<T>(downscale_flow(c.flow, 1 << l)));
        }
    }
    return c;
}

template <typename T>
Var<T> fusion_graph(const FusionContext<T>& ctx, const ModelBundle<T>& m)
{
    auto ms = nn::constant(ctx.ms);
    auto input = nn::concat_channels<T>({ms, nn::constant(ctx.image_guide)});
    std::vector<Var<T>> guidance;
    if (m.config.guidance == Guidance::sal)
        for (int l = 0; l < m.levels(); ++l)
            guidance.push_back(nn::deformable_sample(nn::constant(ctx.rgb_features[std::size_t(l)]),
                                                     m.sal[std::size_t(l)],
                                                     ctx.level_flows[std::size_t(l)]));
    return nn::add(ms, m.fusion.forward(input, guidance).out);
}

template <typename T>
SpectralImage forward_fuse(const SpectralImage& ms, const SpectralImage& rgb,
                           const std::vector<Tensor<T>>& rgb_features, const ModelBundle<T>& m)
{
    return to_image(fusion_graph(make_fusion_context(ms, rgb, rgb_features, m), m)->value);
}

template <typename T>
SpectralImage run_scenario2(const DatasetQuadruplet& q, const ModelBundle<T>& m)
{
    if (!m.upsampler)
        throw ConfigError("run_scenario2: model has no upsampler");
    if (q.ms_mosaic.plane.height() * 4 != q.rgb_mosaic.plane.height() ||
        q.ms_mosaic.plane.width() * 4 != q.rgb_mosaic.plane.width())
        throw DimensionError("run_scenario2: MS mosaic " + q.ms_mosaic.plane.shape_string() +
                             " must be a quarter of RGB mosaic " +
                             q.rgb_mosaic.plane.shape_string());
    const auto d = forward_demosaic(q, m);
    return forward_fuse(upsample_ms(d, m), d.rgb, d.rgb_features, m);
}

template <typename T>
SpectralImage reconstruct(const DatasetQuadruplet& q, const ModelBundle<T>& m)
{
    if (m.config.scenario == 2)
        return run_scenario2(q, m);
    if (!q.ms_mosaic.plane.same_shape(q.rgb_mosaic.plane))
        throw DimensionError("reconstruct: scenario-1 model needs equal-size mosaics");
    const auto d = forward_demosaic(q, m);
    return forward_fuse(d.ms, d.rgb, d.rgb_features, m);
}

SpectralImage interpolation_baseline(const DatasetQuadruplet& q)
{
    SpectralImage ms = demosaic_interp(q.ms_mosaic);
    if (q.ms_mosaic.plane.height() != q.rgb_mosaic.plane.height())
        ms = bicubic_upsample(ms, q.rgb_mosaic.plane.height() / q.ms_mosaic.plane.height());
    return ms;
}

namespace {

std::vector<Parameter<float>*> stage_parameters(ModelBundle<float>& m, int stage)
{
    return stage == 1 ? m.demosaic_parameters() : m.all_parameters();
}

}  // namespace

void save_model(const std::filesystem::path& path, ModelBundle<float>& m, int stage,
                std::int64_t step)
{
    if (stage != 1 && stage != 2)
        throw ConfigError("checkpoint stage must be 1 or 2");
    const json arch = {{"model", json::parse(m.config.to_json())}, {"stage", stage}};
    nn::save_checkpoint<float>(path, {arch.dump(), step}, stage_parameters(m, stage));
}

namespace {

std::pair<ModelConfig, int> read_arch(const std::string& bytes)
{
    const nn::CheckpointInfo info = nn::peek_checkpoint(bytes);
    try {
        const json arch = json::parse(info.arch_json);
        return {ModelConfig::from_json(arch.at("model").dump()), arch.at("stage").get<int>()};
    } catch (const json::exception& e) {
        throw IntegrityError(std::string("checkpoint: architecture header unreadable: ") +
                             e.what());
    }
}

}  // namespace

int load_model_into(const std::filesystem::path& path, ModelBundle<float>& m)
{
    const std::string bytes = read_file(path);
    const auto [cfg, stage] = read_arch(bytes);
    if (!cfg.compatible(m.config))
        throw ConfigError("checkpoint " + path.string() + " architecture " + cfg.to_json() +
                          " does not match model " + m.config.to_json());
    nn::decode_checkpoint<float>(bytes, stage_parameters(m, stage));
    m.stage1_done = true;
    return stage;
}

ModelBundle<float> load_model(const std::filesystem::path& path)
{
    const std::string bytes = read_file(path);
    const auto [cfg, stage] = read_arch(bytes);
    ModelBundle<float> m(cfg);
    nn::decode_checkpoint<float>(bytes, stage_parameters(m, stage));
    m.stage1_done = true;
    return m;
}

#define MSDC_INSTANTIATE(T)                                                                   \
    template struct ModelBundle<T>;                                                           \
    template Tensor<T> to_tensor<T>(const SpectralImage&);                                    \
    template SpectralImage to_image<T>(const Tensor<T>&);                                     \
    template Tensor<T> demosaic_input<T>(const MosaicImage&);                                 \
    template DemosaicGraph<T> demosaic_graph<T>(const UNet<T>&, const Tensor<T>&);            \
    template DemosaicOutput<T> forward_demosaic<T>(const DatasetQuadruplet&,                  \
                                                   const ModelBundle<T>&);                    \
    template SpectralImage upsample_ms<T>(const DemosaicOutput<T>&, const ModelBundle<T>&);   \
    template struct FusionContext<T>;                                                         \
    template FusionContext<T> make_fusion_context<T>(const SpectralImage&,                    \
                                                     const SpectralImage&,                    \
                                                     const std::vector<Tensor<T>>&,           \
                                                     const ModelBundle<T>&);                  \
    template Var<T> fusion_graph<T>(const FusionContext<T>&, const ModelBundle<T>&);          \
    template SpectralImage forward_fuse<T>(const SpectralImage&, const SpectralImage&,        \
                                           const std::vector<Tensor<T>>&,                     \
                                           const ModelBundle<T>&);                            \
    template SpectralImage run_scenario2<T>(const DatasetQuadruplet&, const ModelBundle<T>&); \
    template SpectralImage reconstruct<T>(const DatasetQuadruplet&, const ModelBundle<T>&);

MSDC_INSTANTIATE(float)
MSDC_INSTANTIATE(double)
#undef MSDC_INSTANTIATE

}  // namespace msdc::pipeline
