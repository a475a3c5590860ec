#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "msdc/image.hpp"
#include "msdc/neuro/graph.hpp"
#include "msdc/rng.hpp"

namespace msdc::testing {

inline SpectralImage random_image(int h, int w, int c, std::uint64_t seed, double lo = 0.0,
                                  double hi = 1.0)
{
    Rng rng(seed);
    SpectralImage img(h, w, c);
    for (auto& v : img.data())
        v = float(rng.uniform(lo, hi));
    return img;
}

/// Isotropic multi-scale texture: smoothly interpolated value noise at two
/// cell sizes plus a few random rectangles, suitable for block matching.
inline SpectralImage textured_image(int h, int w, int c, std::uint64_t seed)
{
    Rng rng(seed);
    SpectralImage img(h, w, c, 0.5f);
    for (const auto& [cell, amp] : {std::pair{7, 0.25}, std::pair{3, 0.12}}) {
        const int gh = h / cell + 3, gw = w / cell + 3;
        std::vector<double> grid(std::size_t(gh) * gw);
        for (auto& g : grid)
            g = rng.uniform(-amp, amp);
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                const double gy = double(y) / cell, gx = double(x) / cell;
                const int y0 = int(gy), x0 = int(gx);
                // Smoothstep weights keep the field C1 across cells.
                double ty = gy - y0, tx = gx - x0;
                ty = ty * ty * (3 - 2 * ty);
                tx = tx * tx * (3 - 2 * tx);
                auto g = [&](int yy, int xx) { return grid[std::size_t(yy) * gw + xx]; };
                const double v = (1 - ty) * ((1 - tx) * g(y0, x0) + tx * g(y0, x0 + 1)) +
                                 ty * ((1 - tx) * g(y0 + 1, x0) + tx * g(y0 + 1, x0 + 1));
                for (int ch = 0; ch < c; ++ch)
                    img.at(y, x, ch) += float(v * (0.8 + 0.1 * ch));
            }
    }
    for (int r = 0; r < 12; ++r) {
        const int y0 = rng.below(h - 4), x0 = rng.below(w - 4);
        const int rh = 2 + rng.below(h / 4), rw = 2 + rng.below(w / 4);
        const double val = rng.uniform(0.1, 0.9);
        for (int y = y0; y < std::min(h, y0 + rh); ++y)
            for (int x = x0; x < std::min(w, x0 + rw); ++x)
                for (int ch = 0; ch < c; ++ch)
                    img.at(y, x, ch) = float(0.5 * img.at(y, x, ch) + 0.5 * val);
    }
    return img;
}

template <typename T>
nn::Tensor<T> random_tensor(std::vector<int> shape, std::uint64_t seed, double lo = -1.0,
                            double hi = 1.0)
{
    Rng rng(seed);
    nn::Tensor<T> t(std::move(shape));
    for (auto& v : t.values())
        v = T(rng.uniform(lo, hi));
    return t;
}

/// Compares the analytic gradient already stored in `var->grad` with central
/// differences of `loss` (re-evaluated after perturbing var->value). Returns the
/// norm-wise relative error ||a - n|| / max(||a||, ||n||, tiny). At most
/// `max_entries` evenly spaced entries are probed.
inline double gradient_error(const nn::Var<double>& var, const std::function<double()>& loss,
                             double h = 1e-3, std::size_t max_entries = 400)
{
    auto& value = var->value;
    const std::size_t n = value.numel();
    const std::size_t stride = std::max<std::size_t>(1, n / max_entries);
    double diff2 = 0.0, a2 = 0.0, n2 = 0.0;
    for (std::size_t i = 0; i < n; i += stride) {
        const double saved = value[i];
        value[i] = saved + h;
        const double up = loss();
        value[i] = saved - h;
        const double down = loss();
        value[i] = saved;
        const double numeric = (up - down) / (2.0 * h);
        const double analytic = var->grad.empty() ? 0.0 : var->grad[i];
        diff2 += (analytic - numeric) * (analytic - numeric);
        a2 += analytic * analytic;
        n2 += numeric * numeric;
    }
    const double scale = std::max({std::sqrt(a2), std::sqrt(n2), 1e-12});
    return std::sqrt(diff2) / scale;
}

}  // namespace msdc::testing
