#include "msdc/neuro/optim.hpp"

#include <cmath>
#include <cstring>

namespace msdc::nn {

template <typename T>
Parameter<T>::Parameter(std::string n, Tensor<T> init)
    : name(std::move(n)),
      var(leaf(std::move(init))),
      adam_m(var->value.shape()),
      adam_v(var->value.shape())
{
}

template <typename T>
Tensor<T> lecun_kernel(int out, int in, int kh, int kw, Rng& rng, double gain)
{
    Tensor<T> k({out, in, kh, kw});
    const double bound = gain * std::sqrt(3.0 / double(in * kh * kw));
    for (auto& v : k.values())
        v = T(rng.uniform(-bound, bound));
    return k;
}

template <typename T>
void adam_step(const std::vector<Parameter<T>*>& params, const AdamConfig& cfg)
{
    for (Parameter<T>* p : params) {
        ++p->step_count;
        const double c1 = 1.0 - std::pow(cfg.beta1, double(p->step_count));
        const double c2 = 1.0 - std::pow(cfg.beta2, double(p->step_count));
        Tensor<T>& w = p->var->value;
        const Tensor<T>& g = p->var->grad;
        for (std::size_t i = 0; i < w.numel(); ++i) {
            const double gi = g.empty() ? 0.0 : double(g[i]);
            const double m = cfg.beta1 * double(p->adam_m[i]) + (1.0 - cfg.beta1) * gi;
            const double v = cfg.beta2 * double(p->adam_v[i]) + (1.0 - cfg.beta2) * gi * gi;
            p->adam_m[i] = T(m);
            p->adam_v[i] = T(v);
            w[i] = T(double(w[i]) - cfg.lr * (m / c1) / (std::sqrt(v / c2) + cfg.eps));
        }
    }
}

template <typename T>
void zero_grad(const std::vector<Parameter<T>*>& params)
{
    for (Parameter<T>* p : params)
        p->var->grad.fill(T(0));
}

template <typename T>
std::uint64_t parameter_checksum(const std::vector<Parameter<T>*>& params)
{
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&h](const void* data, std::size_t n) {
        const auto* b = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < n; ++i) {
            h ^= b[i];
            h *= 1099511628211ull;
        }
    };
    for (const Parameter<T>* p : params) {
        mix(p->name.data(), p->name.size());
        mix(p->var->value.data(), p->var->value.numel() * sizeof(T));
    }
    return h;
}

#define MSDC_INSTANTIATE(T)                                                                   \
    template struct Parameter<T>;                                                             \
    template Tensor<T> lecun_kernel<T>(int, int, int, int, Rng&, double);                   \
    template void adam_step<T>(const std::vector<Parameter<T>*>&, const AdamConfig&);         \
    template void zero_grad<T>(const std::vector<Parameter<T>*>&);                            \
    template std::uint64_t parameter_checksum<T>(const std::vector<Parameter<T>*>&);

MSDC_INSTANTIATE(float)
MSDC_INSTANTIATE(double)
#undef MSDC_INSTANTIATE

}  // namespace msdc::nn
