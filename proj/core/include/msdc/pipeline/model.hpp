#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "msdc/color.hpp"
#include "msdc/dataset.hpp"
#include "msdc/flow.hpp"
#include "msdc/neuro/deformable.hpp"
#include "msdc/pipeline/networks.hpp"

namespace msdc::pipeline {

inline constexpr int kMsChannels = 16;
inline constexpr int kRgbChannels = 3;

/// What the fusion network receives from the RGB view.
enum class Guidance {
    none,             // zeros everywhere
    image_unaligned,  // I'_RGB concatenated to the input as is
    image_warped,     // I'_RGB backward-warped by the cross-spectral flow
    sal,              // per-level RGB features aligned by the deformable layers
};

std::string to_string(Guidance g);
Guidance guidance_from_string(const std::string& s);

struct ModelConfig {
    NetConfig net;
    Guidance guidance = Guidance::sal;
    int scenario = 1;
    double max_offset = 2.0;
    std::uint64_t seed = 1;

    std::string to_json() const;
    static ModelConfig from_json(const std::string& text);
    /// Same parameter layout (guidance mode and seed may differ).
    bool compatible(const ModelConfig& other) const;
};

template <typename T>
struct ModelBundle {
    ModelConfig config;
    UNet<T> d_ms, d_rgb, fusion;
    std::vector<nn::DeformableKernel<T>> sal;  // one per level
    std::optional<Upsampler<T>> upsampler;    // scenario 2 only
    std::optional<ColorMatrix> color_matrix;
    FlowParams flow_params;
    bool stage1_done = false;

    explicit ModelBundle(const ModelConfig& cfg);
    ModelBundle(const ModelBundle&) = delete;
    ModelBundle& operator=(const ModelBundle&) = delete;
    ModelBundle(ModelBundle&&) = default;
    ModelBundle& operator=(ModelBundle&&) = default;

    int levels() const { return config.net.levels; }
    /// D_MS, D_RGB and the upsampler (trained in stage 1).
    std::vector<Parameter<T>*> demosaic_parameters();
    /// SAL kernels and F (trained in stage 2).
    std::vector<Parameter<T>*> fusion_parameters();
    std::vector<Parameter<T>*> all_parameters();
};

template <typename T>
Tensor<T> to_tensor(const SpectralImage& img);
template <typename T>
SpectralImage to_image(const Tensor<T>& t);

/// Network input: demosaic_interp prefill channels followed by the raw plane.
template <typename T>
Tensor<T> demosaic_input(const MosaicImage& mosaic);

template <typename T>
struct DemosaicGraph {
    Var<T> out;                     // prefill + learned correction
    std::vector<Var<T>> features;   // decoder maps, full resolution first
};

/// input: demosaic_input(...) or a crop of it.
template <typename T>
DemosaicGraph<T> demosaic_graph(const UNet<T>& net, const Tensor<T>& input);

template <typename T>
struct DemosaicOutput {
    SpectralImage ms, rgb;                  // I'_MS (mosaic resolution), I'_RGB
    std::vector<Tensor<T>> ms_features;
    std::vector<Tensor<T>> rgb_features;    // f'_RGB per level
};

template <typename T>
DemosaicOutput<T> forward_demosaic(const DatasetQuadruplet& q, const ModelBundle<T>& m);

/// Scenario 2: bicubic 4x of I'_MS plus the upsampler's correction from the
/// full-resolution D_MS features.
template <typename T>
SpectralImage upsample_ms(const DemosaicOutput<T>& d, const ModelBundle<T>& m);

/// Flow from the MS view to the RGB view, matched on sRGB renderings of the
/// proxy RGB and of the RGB image.
FlowField cross_spectral_flow(const SpectralImage& ms, const SpectralImage& rgb,
                              const ColorMatrix& matrix, const FlowParams& params = {});

/// Everything the fusion stage consumes, precomputed so training patches can
/// be cropped from cached full scenes.
template <typename T>
struct FusionContext {
    Tensor<T> ms;                          // I'_MS (16, H, W)
    Tensor<T> image_guide;                 // (3, H, W), depends on the guidance mode
    std::vector<Tensor<T>> rgb_features;   // sal mode only
    std::vector<Tensor<T>> level_flows;    // sal mode only, (2, H/2^l, W/2^l)
    FlowField flow;                        // empty unless the mode needs it

    /// y0, x0, h, w must be multiples of 2^(L-1).
    FusionContext crop(int y0, int x0, int h, int w) const;
};

template <typename T>
FusionContext<T> make_fusion_context(const SpectralImage& ms, const SpectralImage& rgb,
                                     const std::vector<Tensor<T>>& rgb_features,
                                     const ModelBundle<T>& m);

/// I_MS = I'_MS + F(I'_MS, image guide, per-level guidance).
template <typename T>
Var<T> fusion_graph(const FusionContext<T>& ctx, const ModelBundle<T>& m);

template <typename T>
SpectralImage forward_fuse(const SpectralImage& ms, const SpectralImage& rgb,
                           const std::vector<Tensor<T>>& rgb_features, const ModelBundle<T>& m);

/// Low-resolution MS mosaic + full-resolution RGB mosaic -> 4x MS image.
template <typename T>
SpectralImage run_scenario2(const DatasetQuadruplet& q, const ModelBundle<T>& m);

/// Full two-stage reconstruction for either scenario.
template <typename T>
SpectralImage reconstruct(const DatasetQuadruplet& q, const ModelBundle<T>& m);

/// Non-learned reference: demosaic_interp, followed in scenario 2 by bicubic 4x.
SpectralImage interpolation_baseline(const DatasetQuadruplet& q);

/// Stage 1 checkpoints hold demosaic_parameters(), stage 2 all_parameters().
void save_model(const std::filesystem::path& path, ModelBundle<float>& m, int stage,
                std::int64_t step);
/// Loads parameters into an existing bundle with a compatible layout and
/// returns the stored stage.
int load_model_into(const std::filesystem::path& path, ModelBundle<float>& m);
/// Rebuilds a bundle from the architecture stored in the checkpoint.
ModelBundle<float> load_model(const std::filesystem::path& path);

}  // namespace msdc::pipeline
