#include <benchmark/benchmark.h>

#include "msdc/flow.hpp"
#include "msdc/mosaic.hpp"
#include "msdc/neuro/deformable.hpp"
#include "msdc/rng.hpp"

using namespace msdc;

namespace {

nn::Tensor<float> random_tensor(std::vector<int> shape, std::uint64_t seed)
{
    Rng rng(seed);
    nn::Tensor<float> t(std::move(shape));
    for (auto& v : t.values())
        v = float(rng.uniform(-1.0, 1.0));
    return t;
}

SpectralImage random_image(int h, int w, int c, std::uint64_t seed)
{
    Rng rng(seed);
    SpectralImage img(h, w, c);
    for (auto& v : img.data())
        v = float(rng.uniform(0.0, 1.0));
    return img;
}

void BM_Conv2dForwardBackward(benchmark::State& state)
{
    const int ch = int(state.range(0)), side = int(state.range(1));
    auto x = nn::leaf(random_tensor({ch, side, side}, 1));
    auto w = nn::leaf(random_tensor({ch, ch, 3, 3}, 2));
    auto b = nn::leaf(random_tensor({ch}, 3));
    for (auto _ : state) {
        auto y = nn::l2_loss(nn::conv2d(x, w, b, 1, 1), nn::Tensor<float>({ch, side, side}, 0.0f));
        nn::backward(y);
        benchmark::DoNotOptimize(w->grad.values().data());
    }
    state.SetItemsProcessed(state.iterations() * side * side);
}
BENCHMARK(BM_Conv2dForwardBackward)->Args({16, 64})->Args({32, 64});

void BM_DeformableSample(benchmark::State& state)
{
    const int ch = int(state.range(0)), side = int(state.range(1));
    Rng rng(4);
    nn::DeformableKernel<float> k("bench", ch, ch, rng);
    auto f = nn::leaf(random_tensor({ch, side, side}, 5));
    const auto flow = random_tensor({2, side, side}, 6);
    for (auto _ : state) {
        auto y = nn::l2_loss(nn::deformable_sample(f, k, flow),
                             nn::Tensor<float>({ch, side, side}, 0.0f));
        nn::backward(y);
        benchmark::DoNotOptimize(f->grad.values().data());
    }
    state.SetItemsProcessed(state.iterations() * side * side);
}
BENCHMARK(BM_DeformableSample)->Args({16, 64});

void BM_EstimateFlow(benchmark::State& state)
{
    const int side = int(state.range(0));
    const auto a = random_image(side, side, 3, 7);
    const auto b = random_image(side, side, 3, 8);
    for (auto _ : state)
        benchmark::DoNotOptimize(estimate_flow(a, b).u.data());
    state.SetItemsProcessed(state.iterations() * side * side);
}
BENCHMARK(BM_EstimateFlow)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_DemosaicInterp(benchmark::State& state)
{
    const int side = int(state.range(0));
    const auto mosaic = apply_mosaic(random_image(side, side, 16, 9), MosaicPattern::msfa16());
    for (auto _ : state)
        benchmark::DoNotOptimize(demosaic_interp(mosaic).data().data());
    state.SetItemsProcessed(state.iterations() * side * side);
}
BENCHMARK(BM_DemosaicInterp)->Arg(128)->Arg(256);

}  // namespace

BENCHMARK_MAIN();
