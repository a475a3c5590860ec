#pragma once

// Check routines shared by the unit tests and the acceptance runner.

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "msdc/neuro/deformable.hpp"
#include "msdc/neuro/ops.hpp"
#include "msdc/pipeline/model.hpp"
#include "support/fixtures.hpp"

namespace msdc::testing {

struct GradientCase {
    std::string name;
    double error = 0.0;  // worst norm-wise relative error over the checked inputs
};

namespace detail {

inline double check_all(const std::vector<nn::Var<double>>& inputs,
                        const std::function<nn::Var<double>()>& build, std::size_t max_entries = 400)
{
    for (const auto& v : inputs)
        v->grad = {};
    nn::backward(build());
    double worst = 0.0;
    for (const auto& v : inputs)
        worst = std::max(worst, gradient_error(
                                    v, [&] { return build()->value[0]; }, 1e-3, max_entries));
    return worst;
}

/// Flow with half-pixel fractional parts. Bilinear sampling is only piecewise
/// differentiable; together with small learned offsets this keeps every sample
/// position well inside a pixel cell, so +-h probes never straddle a kink.
template <typename T>
nn::Tensor<T> half_pixel_flow(int h, int w, std::uint64_t seed)
{
    Rng rng(seed);
    nn::Tensor<T> flow({2, h, w});
    for (auto& v : flow.values())
        v = T(rng.below(3) - 1) + T(0.5);
    return flow;
}

/// Largest |offset| a kernel produces on (f, flow).
template <typename T>
double max_offset(const nn::DeformableKernel<T>& k, const nn::Var<T>& f, const nn::Tensor<T>& flow)
{
    double m = 0.0;
    for (T v : k.offsets(f, flow)->value.values())
        m = std::max(m, double(std::abs(v)));
    return m;
}

/// Halves the offset head until every offset stays below 0.35 px, so sample
/// positions remain inside the cell picked by a half-pixel flow.
template <typename T>
void shrink_offsets(nn::DeformableKernel<T>& k, const nn::Var<T>& f, const nn::Tensor<T>& flow)
{
    while (max_offset(k, f, flow) >= 0.35) {
        for (auto& v : k.offset_weight.value().values())
            v *= T(0.5);
        for (auto& v : k.offset_bias.value().values())
            v *= T(0.5);
    }
}

}  // namespace detail

inline GradientCase gradient_conv2d(std::uint64_t seed)
{
    auto x = nn::leaf(random_tensor<double>({1, 8, 8}, seed));
    auto w = nn::leaf(random_tensor<double>({3, 1, 3, 3}, seed + 1));
    auto b = nn::leaf(random_tensor<double>({3}, seed + 2));
    auto x2 = nn::leaf(random_tensor<double>({2, 9, 9}, seed + 3));
    auto w2 = nn::leaf(random_tensor<double>({4, 2, 2, 2}, seed + 4));
    const auto t1 = random_tensor<double>({3, 8, 8}, seed + 5);
    const auto t2 = random_tensor<double>({4, 5, 5}, seed + 6);
    const double e1 = detail::check_all({x, w, b}, [&] {
        return nn::l2_loss(nn::conv2d(x, w, b, 1, 1), t1);
    });
    const double e2 = detail::check_all({x2, w2}, [&] {
        return nn::l2_loss(nn::conv2d(x2, w2, nn::Var<double>{}, 2, 1), t2);
    });
    return {"conv2d", std::max(e1, e2)};
}

inline GradientCase gradient_simple_gate(std::uint64_t seed)
{
    auto x = nn::leaf(random_tensor<double>({4, 6, 6}, seed));
    const auto t = random_tensor<double>({2, 6, 6}, seed + 1);
    return {"simple_gate", detail::check_all({x}, [&] { return nn::l2_loss(nn::simple_gate(x), t); })};
}

inline GradientCase gradient_pixel_shuffle(std::uint64_t seed)
{
    auto x = nn::leaf(random_tensor<double>({8, 3, 4}, seed));
    const auto t = random_tensor<double>({2, 6, 8}, seed + 1);
    auto y = nn::leaf(random_tensor<double>({2, 6, 8}, seed + 2));
    const auto u = random_tensor<double>({8, 3, 4}, seed + 3);
    const double e1 = detail::check_all({x}, [&] { return nn::l2_loss(nn::pixel_shuffle(x, 2), t); });
    const double e2 = detail::check_all({y}, [&] { return nn::l2_loss(nn::pixel_unshuffle(y, 2), u); });
    return {"pixel_shuffle", std::max(e1, e2)};
}

/// Gradients of a deformable layer with non-zero offset head w.r.t. the feature,
/// the kernel and the offset-head weights, under a fractional flow.
inline GradientCase gradient_deformable(std::uint64_t seed)
{
    Rng rng(seed);
    nn::DeformableKernel<double> k("k", 2, 3, rng, 2.0);
    k.weight.value() = random_tensor<double>({3, 2, 3, 3}, seed + 1);
    k.offset_weight.value() = random_tensor<double>({18, 4, 3, 3}, seed + 2, -0.02, 0.02);
    k.offset_bias.value() = random_tensor<double>({18}, seed + 3, -0.05, 0.05);
    auto f = nn::leaf(random_tensor<double>({2, 8, 8}, seed + 4));
    const auto flow = detail::half_pixel_flow<double>(8, 8, seed + 5);
    const auto t = random_tensor<double>({3, 8, 8}, seed + 6);
    detail::shrink_offsets(k, f, flow);
    const double e = detail::check_all(
        {f, k.weight.var, k.offset_weight.var, k.offset_bias.var},
        [&] { return nn::l2_loss(nn::deformable_sample(f, k, flow), t); });
    return {"deformable_sample", e};
}

inline GradientCase gradient_l2(std::uint64_t seed)
{
    auto p = nn::leaf(random_tensor<double>({3, 5, 7}, seed));
    const auto t = random_tensor<double>({3, 5, 7}, seed + 1);
    return {"l2_loss", detail::check_all({p}, [&] { return nn::l2_loss(p, t); })};
}

/// Small SAL-guided fusion model in double precision; gradients of the
/// reconstruction loss w.r.t. every SAL and fusion parameter.
inline GradientCase gradient_fusion_composite(std::uint64_t seed)
{
    pipeline::ModelConfig cfg;
    cfg.net = {4, 1, 2};
    cfg.seed = seed;
    pipeline::ModelBundle<double> m(cfg);
    pipeline::FusionContext<double> ctx;
    ctx.ms = random_tensor<double>({16, 8, 8}, seed + 1, 0.0, 1.0);
    ctx.image_guide = nn::Tensor<double>({3, 8, 8});
    for (int l = 0; l < 2; ++l) {
        const int s = 8 >> l;
        ctx.rgb_features.push_back(random_tensor<double>({4, s, s}, seed + 10 + std::uint64_t(l)));
        ctx.level_flows.push_back(detail::half_pixel_flow<double>(s, s, seed + 20 + std::uint64_t(l)));
    }
    // Move every parameter off its structured initialization so no path is dead.
    std::uint64_t s = seed + 100;
    for (auto* p : m.fusion_parameters()) {
        const bool offset_head = p->name.find("offset") != std::string::npos;
        const double amp = offset_head ? 0.01 : 0.2;
        auto noise = random_tensor<double>(p->value().shape(), s++, -amp, amp);
        for (std::size_t i = 0; i < noise.numel(); ++i)
            p->value()[i] += noise[i];
    }
    for (int l = 0; l < 2; ++l)
        detail::shrink_offsets(m.sal[std::size_t(l)], nn::constant(ctx.rgb_features[std::size_t(l)]),
                               ctx.level_flows[std::size_t(l)]);
    const auto target = random_tensor<double>({16, 8, 8}, seed + 3, 0.0, 1.0);
    std::vector<nn::Var<double>> inputs;
    for (auto* p : m.fusion_parameters())
        inputs.push_back(p->var);
    const double e = detail::check_all(
        inputs, [&] { return nn::l2_loss(pipeline::fusion_graph(ctx, m), target); }, 40);
    return {"fusion composite", e};
}

inline std::vector<GradientCase> gradient_suite(std::uint64_t seed = 1)
{
    return {gradient_conv2d(seed),    gradient_simple_gate(seed), gradient_pixel_shuffle(seed),
            gradient_deformable(seed), gradient_l2(seed),         gradient_fusion_composite(seed)};
}

/// Max-abs difference between deformable sampling with zero flow and zero
/// offsets and a padded 3x3 convolution, over `count` random fixtures.
inline double deformable_degeneration_error(int count = 20, std::uint64_t seed = 1)
{
    double worst = 0.0;
    for (int i = 0; i < count; ++i) {
        const std::uint64_t s = seed + std::uint64_t(i) * 31;
        Rng rng(s);
        const int ci = 1 + rng.below(6), co = 1 + rng.below(6);
        const int h = 4 + rng.below(13), w = 4 + rng.below(13);
        nn::DeformableKernel<float> k("k", ci, co, rng, 2.0f);
        k.weight.value() = random_tensor<float>({co, ci, 3, 3}, s + 1);
        auto f = nn::constant(random_tensor<float>({ci, h, w}, s + 2));
        const nn::Tensor<float> flow({2, h, w});
        const auto a = nn::deformable_sample(f, k, flow);
        const auto b = nn::conv2d(f, nn::constant(k.weight.value()), nn::Var<float>{}, 1, 1);
        for (std::size_t j = 0; j < a->value.numel(); ++j)
            worst = std::max(worst, double(std::abs(a->value[j] - b->value[j])));
    }
    return worst;
}

}  // namespace msdc::testing
