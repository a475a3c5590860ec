#include "msdc/neuro/deformable.hpp"

#include "msdc/error.hpp"

namespace msdc::nn {

template <typename T>
Tensor<T> flow_tensor(const FlowField& flow)
{
    Tensor<T> t({2, flow.height, flow.width});
    const std::size_t plane = std::size_t(flow.height) * flow.width;
    for (std::size_t p = 0; p < plane; ++p) {
        t[p] = T(flow.u[p]);
        t[plane + p] = T(flow.v[p]);
    }
    return t;
}

template <typename T>
DeformableKernel<T>::DeformableKernel(const std::string& name, int in, int out, Rng& rng,
                                      T bound)
    : max_offset(bound)
{
    Tensor<T> k = lecun_kernel<T>(out, in, 3, 3, rng, 0.1);
    if (in == out)
        for (int c = 0; c < out; ++c)
            k[((std::size_t(c) * in + c) * 3 + 1) * 3 + 1] += T(1);
    weight = Parameter<T>(name + ".weight", std::move(k));
    offset_weight = Parameter<T>(name + ".offset.weight", Tensor<T>({18, in + 2, 3, 3}));
    offset_bias = Parameter<T>(name + ".offset.bias", Tensor<T>({18}));
}

template <typename T>
Var<T> DeformableKernel<T>::offsets(const Var<T>& f, const Tensor<T>& flow) const
{
    auto guide = concat_channels<T>({warp(f, flow), constant(flow)});
    return bounded_tanh(conv2d(guide, offset_weight.var, offset_bias.var, 1, 1), max_offset);
}

template <typename T>
std::vector<Parameter<T>*> DeformableKernel<T>::parameters()
{
    return {&weight, &offset_weight, &offset_bias};
}

template <typename T>
Var<T> deformable_sample(const Var<T>& f, const DeformableKernel<T>& k, const Tensor<T>& flow)
{
    if (f->value.rank() != 3 || f->value.channels() != k.in_channels())
        throw DimensionError("deformable_sample: feature " + f->value.shape_string() +
                             " does not match kernel " + k.weight.value().shape_string());
    return deformable_conv(f, k.weight.var, flow, k.offsets(f, flow));
}

template <typename T>
Var<T> deformable_sample(const Var<T>& f, const DeformableKernel<T>& k, const FlowField& flow,
                         int level)
{
    if (level < 1)
        throw DimensionError("deformable_sample: level must be >= 1");
    const int factor = 1 << (level - 1);
    return deformable_sample(f, k, flow_tensor<T>(downscale_flow(flow, factor)));
}

#define MSDC_INSTANTIATE(T)                                                                   \
    template Tensor<T> flow_tensor<T>(const FlowField&);                                      \
    template struct DeformableKernel<T>;                                                      \
    template Var<T> deformable_sample<T>(const Var<T>&, const DeformableKernel<T>&,           \
                                         const Tensor<T>&);                                   \
    template Var<T> deformable_sample<T>(const Var<T>&, const DeformableKernel<T>&,           \
                                         const FlowField&, int);

MSDC_INSTANTIATE(float)
MSDC_INSTANTIATE(double)
#undef MSDC_INSTANTIATE

}  // namespace msdc::nn
