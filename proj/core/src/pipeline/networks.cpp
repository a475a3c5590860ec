#include "msdc/pipeline/networks.hpp"

#include "msdc/error.hpp"

namespace msdc::pipeline {

template <typename T>
Conv<T>::Conv(const std::string& name, int in, int out, int kernel, int s, int p, Rng& rng,
              double gain)
    : weight(name + ".weight", nn::lecun_kernel<T>(out, in, kernel, kernel, rng, gain)),
      bias(name + ".bias", Tensor<T>({out})),
      stride(s),
      pad(p)
{
}

template <typename T>
Var<T> Conv<T>::operator()(const Var<T>& x) const
{
    return nn::conv2d(x, weight.var, bias.var, stride, pad);
}

template <typename T>
void Conv<T>::collect(std::vector<Parameter<T>*>& out)
{
    out.push_back(&weight);
    out.push_back(&bias);
}

template <typename T>
GatedBlock<T>::GatedBlock(const std::string& name, int c, Rng& rng)
    : expand(name + ".expand", c, 2 * c, 3, 1, 1, rng),
      project(name + ".project", c, c, 1, 1, 0, rng, 0.1)
{
}

template <typename T>
Var<T> GatedBlock<T>::operator()(const Var<T>& x) const
{
    return nn::add(x, project(nn::simple_gate(expand(x))));
}

template <typename T>
void GatedBlock<T>::collect(std::vector<Parameter<T>*>& out)
{
    expand.collect(out);
    project.collect(out);
}

template <typename T>
UNet<T>::UNet(const std::string& name, int in_channels, int out_channels, int guide_channels,
              const NetConfig& cfg, Rng& rng, double head_gain)
    : cfg_(cfg), in_(in_channels), guide_(guide_channels)
{
    if (cfg.levels < 1 || cfg.width < 1 || cfg.blocks < 1)
        throw ConfigError("network config: levels, width and blocks must be positive");
    const int c = cfg.width;
    intro_ = Conv<T>(name + ".intro", in_channels, c, 3, 1, 1, rng);
    for (int l = 0; l + 1 < cfg.levels; ++l) {
        const std::string lv = name + ".l" + std::to_string(l);
        encoders_.emplace_back(lv + ".enc", c, rng);
        down_.emplace_back(lv + ".down", c, c, 2, 2, 0, rng);
    }
    for (int b = 0; b < cfg.blocks; ++b)
        bottom_.emplace_back(name + ".bottom" + std::to_string(b), c, rng);
    for (int l = 0; l + 1 < cfg.levels; ++l) {
        const std::string lv = name + ".l" + std::to_string(l);
        up_.emplace_back(lv + ".up", c, 4 * c, 1, 1, 0, rng);
        decoders_.emplace_back(lv + ".dec", c, rng);
    }
    if (guide_channels > 0)
        for (int l = 0; l < cfg.levels; ++l)
            merge_.emplace_back(name + ".l" + std::to_string(l) + ".merge", c + guide_channels, c,
                                1, 1, 0, rng);
    head_ = Conv<T>(name + ".head", c, out_channels, 3, 1, 1, rng, head_gain);
}

template <typename T>
typename UNet<T>::Output UNet<T>::forward(const Var<T>& x,
                                          const std::vector<Var<T>>& guidance) const
{
    const int L = cfg_.levels;
    const auto& in = x->value;
    if (in.rank() != 3 || in.channels() != in_)
        throw DimensionError("network input " + in.shape_string() + " expects " +
                             std::to_string(in_) + " channels");
    if (in.height() % (1 << (L - 1)) != 0 || in.width() % (1 << (L - 1)) != 0)
        throw DimensionError("network input " + in.shape_string() + " not divisible by 2^" +
                             std::to_string(L - 1));
    if (!guidance.empty() && (guide_ == 0 || int(guidance.size()) != L))
        throw DimensionError("network guidance: expected " + std::to_string(L) + " levels");

    auto inject = [&](Var<T> d, int l) {
        if (guide_ == 0)
            return d;
        Var<T> g = guidance.empty()
                       ? nn::constant(Tensor<T>({guide_, d->value.height(), d->value.width()}))
                       : guidance[std::size_t(l)];
        return merge_[std::size_t(l)](nn::concat_channels<T>({d, g}));
    };

    std::vector<Var<T>> skips;
    Var<T> d = intro_(x);
    for (int l = 0; l + 1 < L; ++l) {
        d = encoders_[std::size_t(l)](d);
        skips.push_back(d);
        d = down_[std::size_t(l)](d);
    }
    for (const auto& b : bottom_)
        d = b(d);

    Output out;
    out.features.resize(std::size_t(L));
    d = inject(d, L - 1);
    out.features[std::size_t(L - 1)] = d;
    for (int l = L - 2; l >= 0; --l) {
        d = nn::add(nn::pixel_shuffle(up_[std::size_t(l)](d), 2), skips[std::size_t(l)]);
        d = decoders_[std::size_t(l)](inject(d, l));
        out.features[std::size_t(l)] = d;
    }
    out.out = head_(d);
    return out;
}

template <typename T>
std::vector<Parameter<T>*> UNet<T>::parameters()
{
    std::vector<Parameter<T>*> p;
    intro_.collect(p);
    for (std::size_t l = 0; l < encoders_.size(); ++l) {
        encoders_[l].collect(p);
        down_[l].collect(p);
    }
    for (auto& b : bottom_)
        b.collect(p);
    for (std::size_t l = 0; l < decoders_.size(); ++l) {
        up_[l].collect(p);
        decoders_[l].collect(p);
    }
    for (auto& m : merge_)
        m.collect(p);
    head_.collect(p);
    return p;
}

template <typename T>
Upsampler<T>::Upsampler(const std::string& name, int in, int mid, int out, Rng& rng)
    : c1_(name + ".conv1", in, 4 * mid, 3, 1, 1, rng),
      c2_(name + ".conv2", mid, 4 * mid, 3, 1, 1, rng),
      c3_(name + ".conv3", mid, out, 3, 1, 1, rng, 0.1)
{
}

template <typename T>
Var<T> Upsampler<T>::operator()(const Var<T>& f) const
{
    Var<T> x = nn::pixel_shuffle(nn::leaky_relu(c1_(f)), 2);
    x = nn::pixel_shuffle(nn::leaky_relu(c2_(x)), 2);
    return nn::leaky_relu(c3_(x));
}

template <typename T>
std::vector<Parameter<T>*> Upsampler<T>::parameters()
{
    std::vector<Parameter<T>*> p;
    c1_.collect(p);
    c2_.collect(p);
    c3_.collect(p);
    return p;
}

template struct Conv<float>;
template struct Conv<double>;
template struct GatedBlock<float>;
template struct GatedBlock<double>;
template class UNet<float>;
template class UNet<double>;
template class Upsampler<float>;
template class Upsampler<double>;

}  // namespace msdc::pipeline
