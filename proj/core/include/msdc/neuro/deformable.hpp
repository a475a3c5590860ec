#pragma once

#include <string>
#include <vector>

#include "msdc/flow.hpp"
#include "msdc/neuro/ops.hpp"
#include "msdc/neuro/optim.hpp"

namespace msdc::nn {

/// Packs a flow field into a (2, H, W) tensor (horizontal, vertical).
template <typename T>
Tensor<T> flow_tensor(const FlowField& flow);

/// Spectral alignment kernel: 3x3 weights k plus a 3x3 offset head that maps
/// concat(flow-warped feature, level flow) to 18 per-tap displacements,
/// bounded to +-max_offset px by a scaled tanh.
template <typename T>
struct DeformableKernel {
    Parameter<T> weight;         // (out, in, 3, 3)
    Parameter<T> offset_weight;  // (18, in + 2, 3, 3)
    Parameter<T> offset_bias;    // (18)
    T max_offset = T(2);

    DeformableKernel() = default;
    /// Center-tap identity (when in == out) plus small noise; zero offset head.
    DeformableKernel(const std::string& name, int in_channels, int out_channels, Rng& rng,
                     T max_offset = T(2));

    int in_channels() const { return weight.value().dim(1); }
    int out_channels() const { return weight.value().dim(0); }

    /// Offsets (18, H, W) for feature f and level flow (2, H, W).
    Var<T> offsets(const Var<T>& f, const Tensor<T>& flow) const;
    std::vector<Parameter<T>*> parameters();
};

/// Deformable sampling of f at p + flow(p) + i + offsets(p, i) for every 3x3 tap i.
/// flow must already be at f's resolution and scale.
template <typename T>
Var<T> deformable_sample(const Var<T>& f, const DeformableKernel<T>& k, const Tensor<T>& flow);

/// Same, taking the full-resolution flow and a 1-based pyramid level: the flow
/// is average-pooled by 2^(level-1) and its values divided by the same factor.
template <typename T>
Var<T> deformable_sample(const Var<T>& f, const DeformableKernel<T>& k, const FlowField& flow,
                         int level);

}  // namespace msdc::nn
