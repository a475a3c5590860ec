#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "msdc/neuro/graph.hpp"
#include "msdc/rng.hpp"

namespace msdc::nn {

/// Trainable tensor plus its Adam moment buffers.
template <typename T>
struct Parameter {
    std::string name;
    Var<T> var;
    Tensor<T> adam_m, adam_v;
    std::int64_t step_count = 0;

    Parameter() = default;
    Parameter(std::string name, Tensor<T> init);

    Tensor<T>& value() { return var->value; }
    const Tensor<T>& value() const { return var->value; }
    /// Gradient accumulated since the last zero_grad (may be empty).
    const Tensor<T>& grad() const { return var->grad; }
};

/// Variance-preserving uniform draw (bound gain * sqrt(3 / fan_in)) for a
/// (out, in, kh, kw) kernel.
template <typename T>
Tensor<T> lecun_kernel(int out, int in, int kh, int kw, Rng& rng, double gain = 1.0);

struct AdamConfig {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

/// Bias-corrected Adam update on every parameter; missing gradients count as zero.
template <typename T>
void adam_step(const std::vector<Parameter<T>*>& params, const AdamConfig& cfg);

template <typename T>
void zero_grad(const std::vector<Parameter<T>*>& params);

/// Order-sensitive FNV-1a digest of parameter values, used to prove freezing.
template <typename T>
std::uint64_t parameter_checksum(const std::vector<Parameter<T>*>& params);

}  // namespace msdc::nn
