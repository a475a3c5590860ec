#include "msdc/scene.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "msdc/error.hpp"
#include "msdc/resample.hpp"
#include "msdc/rng.hpp"

namespace msdc {

namespace {

double integrate(const std::vector<double>& grid, const std::vector<double>& a,
                 const std::vector<double>& b)
{
    double sum = 0.0;
    for (std::size_t i = 1; i < grid.size(); ++i)
        sum += 0.5 * (a[i] * b[i] + a[i - 1] * b[i - 1]) * (grid[i] - grid[i - 1]);
    return sum;
}

std::vector<double> normalized(const std::vector<double>& grid, const std::vector<double>& curve,
                               double white_level)
{
    const std::vector<double> white(grid.size(), 1.0);
    const double area = integrate(grid, curve, white);
    if (!(area > 0.0))
        throw ConfigError("scene renderer: response curve has zero area");
    std::vector<double> out = curve;
    for (auto& v : out)
        v *= white_level / area;
    return out;
}

}  // namespace

SceneRenderer::SceneRenderer(const MsResponseSet& ms, const std::array<SpectralCurve, 3>& rgb,
                             double white_level)
{
    if (ms.selected.size() != 16)
        throw ConfigError("scene renderer: MS response set needs 16 selected channels");
    grid_ = rgb[0].wavelengths;
    for (int k : ms.selected) {
        const auto& c = ms.curves.at(std::size_t(k));
        if (!c.same_grid(rgb[0]))
            throw ConfigError("scene renderer: MS and RGB grids differ");
        ms_.push_back(normalized(grid_, c.values, white_level));
    }
    for (const auto& c : rgb)
        rgb_.push_back(normalized(grid_, c.values, white_level));
}

SceneRenderer::SceneRenderer() : SceneRenderer(default_ms_responses(), default_rgb_responses()) {}

std::array<double, 16> SceneRenderer::ms_response(const std::vector<double>& reflectance) const
{
    std::array<double, 16> out{};
    for (std::size_t k = 0; k < 16; ++k)
        out[k] = integrate(grid_, ms_[k], reflectance);
    return out;
}

std::array<double, 3> SceneRenderer::rgb_response(const std::vector<double>& reflectance) const
{
    std::array<double, 3> out{};
    for (std::size_t k = 0; k < 3; ++k)
        out[k] = integrate(grid_, rgb_[k], reflectance);
    return out;
}

std::vector<double> SceneRenderer::random_reflectance(std::uint64_t seed) const
{
    Rng rng(seed);
    const double base = rng.uniform(0.02, 0.35);
    const int bumps = 1 + rng.below(3);
    std::vector<double> centers, widths, amps;
    for (int b = 0; b < bumps; ++b) {
        centers.push_back(rng.uniform(380.0, 760.0));
        widths.push_back(rng.uniform(20.0, 90.0));
        amps.push_back(rng.uniform(-0.2, 0.8));
    }
    std::vector<double> r;
    for (double nm : grid_) {
        double v = base;
        for (int b = 0; b < bumps; ++b) {
            const double d = (nm - centers[std::size_t(b)]) / widths[std::size_t(b)];
            v += amps[std::size_t(b)] * std::exp(-0.5 * d * d);
        }
        r.push_back(std::clamp(v, 0.02, 1.0));
    }
    return r;
}

ScenePair make_texture_scene(int height, int width, std::uint64_t seed,
                             const SceneRenderer& renderer)
{
    if (height <= 0 || width <= 0)
        throw DimensionError("make_texture_scene: size must be positive");
    constexpr int kSuper = 2;
    const int sh = height * kSuper;
    const int sw = width * kSuper;
    Rng rng(seed);

    const int materials = 6 + rng.below(5);
    std::vector<std::array<double, 16>> ms_mat;
    std::vector<std::array<double, 3>> rgb_mat;
    for (int m = 0; m < materials; ++m) {
        const auto refl = renderer.random_reflectance(rng.next_u64());
        ms_mat.push_back(renderer.ms_response(refl));
        rgb_mat.push_back(renderer.rgb_response(refl));
    }

    std::vector<int> label(std::size_t(sh) * std::size_t(sw), 0);
    auto paint = [&](auto&& inside, auto&& material_at) {
        for (int y = 0; y < sh; ++y)
            for (int x = 0; x < sw; ++x)
                if (inside(double(x), double(y)))
                    label[std::size_t(y * sw + x)] = material_at(double(x), double(y));
    };

    const int shapes = 14 + rng.below(10);
    for (int s = 0; s < shapes; ++s) {
        const int kind = rng.below(5);
        const double cx = rng.uniform(0, sw);
        const double cy = rng.uniform(0, sh);
        const double rx = rng.uniform(6, 0.35 * sw);
        const double ry = rng.uniform(6, 0.35 * sh);
        const int m0 = rng.below(materials);
        const int m1 = rng.below(materials);
        const double theta = rng.uniform(0, std::numbers::pi);
        const double period = rng.uniform(3.0, 14.0) * kSuper / 2.0;
        auto in_rect = [=](double x, double y) {
            return std::abs(x - cx) < rx && std::abs(y - cy) < ry;
        };
        switch (kind) {
        case 0:
            paint(in_rect, [=](double, double) { return m0; });
            break;
        case 1:
            paint([=](double x, double y) {
                      const double dx = (x - cx) / rx, dy = (y - cy) / ry;
                      return dx * dx + dy * dy < 1.0;
                  },
                  [=](double, double) { return m0; });
            break;
        case 2:  // oriented grating
            paint(in_rect, [=](double x, double y) {
                const double t = (x * std::cos(theta) + y * std::sin(theta)) / period;
                return std::fmod(std::floor(t), 2.0) == 0.0 ? m0 : m1;
            });
            break;
        case 3: {  // checkerboard
            const double cell = std::max(2.0, period);
            paint(in_rect, [=](double x, double y) {
                const long ix = long(std::floor(x / cell)), iy = long(std::floor(y / cell));
                return ((ix + iy) & 1) == 0 ? m0 : m1;
            });
            break;
        }
        default: {  // thin line
            const double half = rng.uniform(0.6, 2.5);
            paint([=](double x, double y) {
                      const double d = (x - cx) * std::sin(theta) - (y - cy) * std::cos(theta);
                      const double along = (x - cx) * std::cos(theta) + (y - cy) * std::sin(theta);
                      return std::abs(d) < half && std::abs(along) < rx * 1.5;
                  },
                  [=](double, double) { return m0; });
            break;
        }
        }
    }

    // Smooth illumination falloff shared by both views.
    const double fx = rng.uniform(0.5, 2.0), fy = rng.uniform(0.5, 2.0);
    const double px = rng.uniform(0, 6.28), py = rng.uniform(0, 6.28);
    SpectralImage ms_hi(sh, sw, 16), rgb_hi(sh, sw, 3);
    for (int y = 0; y < sh; ++y)
        for (int x = 0; x < sw; ++x) {
            const double shade =
                0.75 + 0.125 * std::sin(fx * 2.0 * std::numbers::pi * x / sw + px) +
                0.125 * std::sin(fy * 2.0 * std::numbers::pi * y / sh + py);
            const int m = label[std::size_t(y * sw + x)];
            float* pm = ms_hi.pixel(y, x);
            for (int k = 0; k < 16; ++k)
                pm[k] = float(shade * ms_mat[std::size_t(m)][std::size_t(k)]);
            float* pr = rgb_hi.pixel(y, x);
            for (int k = 0; k < 3; ++k)
                pr[k] = float(shade * rgb_mat[std::size_t(m)][std::size_t(k)]);
        }
    return {box_downsample(ms_hi, kSuper), box_downsample(rgb_hi, kSuper)};
}

PatchTable make_color_patches(int count, std::uint64_t seed, const SceneRenderer& renderer)
{
    if (count <= 0)
        throw ConfigError("make_color_patches: count must be positive");
    PatchTable t{Eigen::MatrixXd(count, 16), Eigen::MatrixXd(count, 3)};
    Rng rng(seed);
    for (int k = 0; k < count; ++k) {
        const auto refl = renderer.random_reflectance(rng.next_u64());
        const auto ms = renderer.ms_response(refl);
        const auto rgb = renderer.rgb_response(refl);
        for (int c = 0; c < 16; ++c)
            t.ms(k, c) = ms[std::size_t(c)];
        for (int c = 0; c < 3; ++c)
            t.rgb(k, c) = rgb[std::size_t(c)];
    }
    return t;
}

std::vector<NoiseSample> simulate_noise_patches(const NoiseModel& model, int channels,
                                                const std::vector<double>& intensities,
                                                int draws, std::uint64_t seed)
{
    model.check_channels(channels);
    if (draws < 2)
        throw ConfigError("simulate_noise_patches: need at least two draws per patch");
    std::vector<NoiseSample> out;
    std::uint64_t counter = 0;
    for (int c = 0; c < channels; ++c)
        for (double level : intensities) {
            const double sigma = std::sqrt(model.variance(c, level));
            double sum = 0.0, sum_sq = 0.0;
            std::vector<double> values(static_cast<std::size_t>(draws));
            for (int d = 0; d < draws; ++d) {
                const double v = level + sigma * philox_normal(seed, 7, counter++);
                values[std::size_t(d)] = v;
                sum += v;
            }
            const double mean = sum / draws;
            for (double v : values)
                sum_sq += (v - mean) * (v - mean);
            out.push_back({c, mean, sum_sq / (draws - 1)});
        }
    return out;
}

}  // namespace msdc
