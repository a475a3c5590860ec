#pragma once

#include <string>
#include <vector>

#include "msdc/neuro/ops.hpp"
#include "msdc/neuro/optim.hpp"

namespace msdc::pipeline {

using nn::Parameter;
using nn::Tensor;
using nn::Var;

/// Backbone shape shared by every network of a model.
struct NetConfig {
    int width = 16;   // channels at every pyramid level
    int blocks = 4;   // gated blocks at the coarsest level
    int levels = 3;   // pyramid levels L (L - 1 downsamplings)
};

template <typename T>
struct Conv {
    Parameter<T> weight, bias;
    int stride = 1, pad = 0;

    Conv() = default;
    /// Variance-preserving uniform weights scaled by gain, zero bias.
    Conv(const std::string& name, int in, int out, int kernel, int stride, int pad, Rng& rng,
         double gain = 1.0);
    Var<T> operator()(const Var<T>& x) const;
    void collect(std::vector<Parameter<T>*>& out);
};

/// x + project(simple_gate(expand(x))): 3x3 expansion to 2c, gate back to c,
/// 1x1 projection.
template <typename T>
struct GatedBlock {
    Conv<T> expand, project;

    GatedBlock() = default;
    GatedBlock(const std::string& name, int channels, Rng& rng);
    Var<T> operator()(const Var<T>& x) const;
    void collect(std::vector<Parameter<T>*>& out);
};

/// Constant-width U-Net. One gated block per encoder and decoder level, `blocks`
/// at the bottom, strided 2x2 convs down, 1x1 conv + pixel shuffle up, additive
/// skips. When guide_channels > 0, each decoder level concatenates an external
/// guidance map and mixes it back to width with a 1x1 conv. The output head is
/// a 3x3 conv whose initial weights are scaled by head_gain.
template <typename T>
class UNet {
public:
    struct Output {
        Var<T> out;
        std::vector<Var<T>> features;  // decoder maps, index 0 = full resolution
    };

    UNet() = default;
    UNet(const std::string& name, int in_channels, int out_channels, int guide_channels,
         const NetConfig& cfg, Rng& rng, double head_gain);

    /// guidance: empty (zeros are injected) or one (guide_channels, H/2^l, W/2^l) map per level.
    Output forward(const Var<T>& x, const std::vector<Var<T>>& guidance = {}) const;
    std::vector<Parameter<T>*> parameters();

    int levels() const { return cfg_.levels; }
    int width() const { return cfg_.width; }
    int in_channels() const { return in_; }
    int guide_channels() const { return guide_; }

private:
    NetConfig cfg_;
    int in_ = 0, guide_ = 0;
    Conv<T> intro_, head_;
    std::vector<GatedBlock<T>> encoders_, decoders_, bottom_;
    std::vector<Conv<T>> down_, up_, merge_;
};

/// Scenario-2 4x upsampler: conv3x3(c -> 4u) + LReLU, pixel shuffle 2,
/// conv3x3(u -> 4u) + LReLU, pixel shuffle 2, conv3x3(u -> out) + LReLU.
template <typename T>
class Upsampler {
public:
    Upsampler() = default;
    Upsampler(const std::string& name, int in_channels, int mid_channels, int out_channels,
              Rng& rng);
    Var<T> operator()(const Var<T>& features) const;
    std::vector<Parameter<T>*> parameters();

private:
    Conv<T> c1_, c2_, c3_;
};

}  // namespace msdc::pipeline
