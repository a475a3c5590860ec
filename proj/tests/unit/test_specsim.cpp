#include <gtest/gtest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include "msdc/dataset.hpp"
#include "msdc/error.hpp"
#include "msdc/metrics.hpp"
#include "msdc/mosaic.hpp"
#include "msdc/noise.hpp"
#include "msdc/resample.hpp"
#include "msdc/rng.hpp"
#include "msdc/scene.hpp"
#include "msdc/spectral.hpp"
#include "support/fixtures.hpp"

using namespace msdc;

namespace {

SpectralCurve gaussian(const std::vector<double>& grid, double peak, double sigma, double scale = 1.0)
{
    SpectralCurve c{grid, {}};
    for (double w : grid)
        c.values.push_back(scale * std::exp(-0.5 * (w - peak) * (w - peak) / (sigma * sigma)));
    return c;
}

SpectralCurve indicator(const std::vector<double>& grid, double lo, double hi)
{
    SpectralCurve c{grid, {}};
    for (double w : grid)
        c.values.push_back(w >= lo && w <= hi ? 1.0 : 0.0);
    return c;
}

// Independent transcription of the channel-selection rule. `tie` reports
// whether the lower-index rule had to decide any pick.
std::vector<int> selection_oracle(const std::vector<SpectralCurve>& curves, bool* tie = nullptr)
{
    if (tie)
        *tie = false;
    const int n = int(curves.size());
    std::vector<double> area(std::size_t(n), 0.0), peak(std::size_t(n), 0.0);
    for (int k = 0; k < n; ++k) {
        const auto& c = curves[std::size_t(k)];
        double best = -1.0;
        for (std::size_t i = 0; i < c.values.size(); ++i) {
            if (i > 0)
                area[std::size_t(k)] +=
                    0.5 * (c.values[i] + c.values[i - 1]) * (c.wavelengths[i] - c.wavelengths[i - 1]);
            if (c.values[i] > best) {
                best = c.values[i];
                peak[std::size_t(k)] = c.wavelengths[i];
            }
        }
    }
    std::vector<bool> taken(std::size_t(n), false);
    std::vector<int> chosen;
    for (int round = 0; round < 12; ++round) {
        int best = -1;
        for (int k = 0; k < n; ++k)
            if (!taken[std::size_t(k)] && (best < 0 || area[std::size_t(k)] > area[std::size_t(best)]))
                best = k;
        taken[std::size_t(best)] = true;
        chosen.push_back(best);
    }
    for (int round = 0; round < 4; ++round) {
        int best = -1;
        double best_sep = -1.0;
        for (int k = 0; k < n; ++k) {
            if (taken[std::size_t(k)])
                continue;
            double sep = 1e300;
            for (int j : chosen)
                sep = std::min(sep, std::abs(peak[std::size_t(k)] - peak[std::size_t(j)]));
            if (tie && sep == best_sep)
                *tie = true;
            if (sep > best_sep) {
                best_sep = sep;
                best = k;
            }
        }
        taken[std::size_t(best)] = true;
        chosen.push_back(best);
    }
    std::sort(chosen.begin(), chosen.end());
    return chosen;
}

MsResponseSet set_from(std::vector<SpectralCurve> curves)
{
    MsResponseSet rs;
    rs.curves = std::move(curves);
    for (int k = 0; k < int(rs.curves.size()); ++k)
        rs.provenance.emplace_back(k % 3, k / 3);
    return rs;
}

}  // namespace

TEST(SpectralCurve, Validation)
{
    EXPECT_THROW((SpectralCurve{{400, 410}, {1.0}}.validate()), ConfigError);
    EXPECT_THROW((SpectralCurve{{410, 400}, {1.0, 1.0}}.validate()), ConfigError);
    EXPECT_THROW((SpectralCurve{{400, 410}, {1.0, -1.0}}.validate()), ConfigError);
    const SpectralCurve c{{400, 410, 420}, {0.0, 1.0, 0.0}};
    EXPECT_NO_THROW(c.validate());
    EXPECT_DOUBLE_EQ(c.area(), 10.0);
    EXPECT_DOUBLE_EQ(c.peak_wavelength(), 410.0);
}

TEST(SynthMsResponses, IdentityIlluminant)
{
    const auto grid = default_wavelength_grid();
    const auto rgb = default_rgb_responses();
    std::array<SpectralCurve, 7> ones;
    for (auto& s : ones)
        s = SpectralCurve{grid, std::vector<double>(grid.size(), 1.0)};
    const auto rs = synth_ms_responses(rgb, ones);
    ASSERT_EQ(rs.curves.size(), 21u);
    EXPECT_TRUE(rs.selected.empty());
    for (int j = 0; j < 7; ++j)
        for (int i = 0; i < 3; ++i) {
            EXPECT_EQ(rs.curves[std::size_t(j * 3 + i)].values, rgb[std::size_t(i)].values);
            EXPECT_EQ(rs.provenance[std::size_t(j * 3 + i)], std::make_pair(i, j));
        }
}

TEST(SynthMsResponses, SupportIntersection)
{
    const auto grid = default_wavelength_grid();
    auto rgb = default_rgb_responses();
    auto spds = default_box_spds();
    rgb[1] = indicator(grid, 500, 550);
    spds[1] = indicator(grid, 540, 600);
    const auto rs = synth_ms_responses(rgb, spds);
    EXPECT_EQ(rs.curves[1 * 3 + 1].values, indicator(grid, 540, 550).values);
}

TEST(SynthMsResponses, MatchesPointwiseProduct)
{
    const auto grid = default_wavelength_grid();
    std::array<SpectralCurve, 3> rgb{gaussian(grid, 470, 25), gaussian(grid, 530, 35),
                                     gaussian(grid, 620, 40)};
    std::array<SpectralCurve, 7> spds;
    for (int j = 0; j < 7; ++j)
        spds[std::size_t(j)] = gaussian(grid, 400 + 50 * j, 30, 0.5 + 0.1 * j);
    const auto rs = synth_ms_responses(rgb, spds);
    for (int j = 0; j < 7; ++j)
        for (int i = 0; i < 3; ++i)
            for (std::size_t g = 0; g < grid.size(); ++g)
                EXPECT_DOUBLE_EQ(rs.curves[std::size_t(j * 3 + i)].values[g],
                                 rgb[std::size_t(i)].values[g] * spds[std::size_t(j)].values[g]);
}

TEST(SynthMsResponses, GridMismatch)
{
    auto rgb = default_rgb_responses();
    const auto spds = default_box_spds();
    rgb[0] = SpectralCurve{{400, 500}, {1, 1}};
    EXPECT_THROW(synth_ms_responses(rgb, spds), ConfigError);
}

TEST(SelectChannels, SeparableCase)
{
    const auto grid = default_wavelength_grid();
    std::vector<SpectralCurve> curves;
    std::vector<int> big;
    for (int k = 0; k < 21; ++k) {
        const bool small = k % 2 == 1 && k < 18;  // 9 low-integral curves
        if (!small)
            big.push_back(k);
        curves.push_back(gaussian(grid, 400 + 15 * k, 10, 1.0));
        const double a = curves.back().area();
        for (auto& v : curves.back().values)
            v *= (small ? 0.1 : 1.0) / a;
    }
    const auto sel = select_channels(set_from(curves));
    EXPECT_EQ(sel, selection_oracle(curves));
    EXPECT_EQ(sel.size(), 16u);
    for (int k : big)
        EXPECT_TRUE(std::binary_search(sel.begin(), sel.end(), k)) << k;
}

TEST(SelectChannels, IdenticalCurvesTieBreak)
{
    const auto grid = default_wavelength_grid();
    const std::vector<SpectralCurve> curves(21, gaussian(grid, 550, 40));
    std::vector<int> expected(16);
    for (int k = 0; k < 16; ++k)
        expected[std::size_t(k)] = k;
    EXPECT_EQ(select_channels(set_from(curves)), expected);
}

TEST(SelectChannels, MatchesRuleOracleOnRandomSets)
{
    const auto grid = default_wavelength_grid();
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        Rng rng(seed);
        std::vector<SpectralCurve> curves;
        for (int k = 0; k < 21; ++k)
            curves.push_back(gaussian(grid, rng.uniform(390, 750), rng.uniform(10, 60),
                                      rng.uniform(0.1, 1.0)));
        EXPECT_EQ(select_channels(set_from(curves)), selection_oracle(curves)) << "seed " << seed;
    }
}

TEST(SelectChannels, PermutationEquivariant)
{
    // Fine grid and continuous peaks keep separations free of exact ties, which
    // the lower-index rule would otherwise resolve by position.
    std::vector<double> grid;
    for (int k = 0; k <= 760; ++k)
        grid.push_back(380.0 + 0.5 * k);
    int checked = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        Rng rng(seed);
        std::vector<SpectralCurve> curves;
        for (int k = 0; k < 21; ++k)
            curves.push_back(gaussian(grid, rng.uniform(390, 750), rng.uniform(10, 60),
                                      rng.uniform(0.1, 1.0)));
        std::vector<int> perm(21);
        std::iota(perm.begin(), perm.end(), 0);
        for (int k = 20; k > 0; --k)
            std::swap(perm[std::size_t(k)], perm[std::size_t(rng.below(k + 1))]);
        std::vector<SpectralCurve> permuted(21);
        for (int k = 0; k < 21; ++k)
            permuted[std::size_t(perm[std::size_t(k)])] = curves[std::size_t(k)];
        bool tie = false;
        selection_oracle(curves, &tie);
        if (tie)
            continue;  // index tie-breaks are deliberately position dependent
        ++checked;
        std::vector<int> mapped;
        for (int k : select_channels(set_from(curves)))
            mapped.push_back(perm[std::size_t(k)]);
        std::sort(mapped.begin(), mapped.end());
        EXPECT_EQ(select_channels(set_from(permuted)), mapped) << "seed " << seed;
    }
    EXPECT_GE(checked, 10);
}

TEST(SelectChannels, DefaultSetIsDistinctAndSorted)
{
    const auto rs = default_ms_responses();
    ASSERT_EQ(rs.selected.size(), 16u);
    EXPECT_TRUE(std::is_sorted(rs.selected.begin(), rs.selected.end()));
    EXPECT_EQ(std::adjacent_find(rs.selected.begin(), rs.selected.end()), rs.selected.end());
}

TEST(CalibrateNoise, ExactLine)
{
    std::vector<NoiseSample> samples;
    for (int c = 0; c < 3; ++c)
        for (int k = 0; k < 8; ++k) {
            const double m = 0.05 + 0.1 * k;
            samples.push_back({c, m, 0.01 * m + 1e-4});
        }
    const auto model = calibrate_noise(samples);
    ASSERT_EQ(model.entries(), 3u);
    for (int c = 0; c < 3; ++c) {
        EXPECT_NEAR(model.beta1[std::size_t(c)], 0.01, 1e-10);
        EXPECT_NEAR(model.beta2[std::size_t(c)], 1e-4, 1e-10);
    }
}

TEST(CalibrateNoise, ZeroVarianceAndClamping)
{
    std::vector<NoiseSample> zero{{0, 0.1, 0.0}, {0, 0.5, 0.0}, {0, 0.9, 0.0}};
    const auto z = calibrate_noise(zero);
    EXPECT_EQ(z.beta1[0], 0.0);
    EXPECT_EQ(z.beta2[0], 0.0);
    std::vector<NoiseSample> falling{{0, 0.1, 0.02}, {0, 0.5, 0.01}, {0, 0.9, 0.0}};
    const auto f = calibrate_noise(falling);
    EXPECT_GE(f.beta1[0], 0.0);
    EXPECT_GE(f.beta2[0], 0.0);
}

TEST(CalibrateNoise, DegenerateMeans)
{
    std::vector<NoiseSample> same{{0, 0.3, 0.01}, {0, 0.3, 0.02}};
    EXPECT_THROW(calibrate_noise(same), CalibrationError);
    EXPECT_THROW(calibrate_noise({}), CalibrationError);
}

TEST(CalibrateNoise, MonteCarloRecoveryAt1e4And1e5)
{
    const auto truth = NoiseModel::uniform(0.01, 1e-4);
    // Dark patch ladder: the offset is only identifiable where it is a sizeable
    // share of the variance.
    std::vector<double> levels;
    for (int k = 0; k < 64; ++k)
        levels.push_back(0.05 * k / 63.0);
    const auto fit4 = calibrate_noise(simulate_noise_patches(truth, 1, levels, 10000, 3));
    EXPECT_NEAR(fit4.beta1[0], 0.01, 0.05 * 0.01);
    EXPECT_NEAR(fit4.beta2[0], 1e-4, 0.05 * 1e-4);
    const auto fit5 = calibrate_noise(simulate_noise_patches(truth, 1, levels, 100000, 4));
    EXPECT_NEAR(fit5.beta1[0], 0.01, 0.02 * 0.01);
    EXPECT_NEAR(fit5.beta2[0], 1e-4, 0.02 * 1e-4);
}

TEST(CalibrateNoise, ResidualsReported)
{
    std::vector<NoiseSample> samples{{0, 0.1, 0.002}, {0, 0.5, 0.006}, {0, 0.9, 0.009}};
    const auto fit = calibrate_noise_with_residuals(samples);
    ASSERT_EQ(fit.rms_residual.size(), 1u);
    double ss = 0;
    for (const auto& s : samples) {
        const double r = s.variance - (fit.model.beta1[0] * s.mean + fit.model.beta2[0]);
        ss += r * r;
    }
    EXPECT_NEAR(fit.rms_residual[0], std::sqrt(ss / 3.0), 1e-12);
}

TEST(SynthNoise, ZeroModelIsBitIdentical)
{
    const auto img = msdc::testing::random_image(16, 16, 4, 1);
    EXPECT_EQ(synth_noise(img, NoiseModel::uniform(0, 0), 99), img);
}

TEST(SynthNoise, EmpiricalVariance)
{
    const SpectralImage img(256, 256, 1, 0.25f);
    const auto out = synth_noise(img, NoiseModel::uniform(0.04, 0.0), 5);
    double mean = 0, var = 0;
    for (float v : out.data())
        mean += v;
    mean /= double(out.size());
    for (float v : out.data())
        var += (v - mean) * (v - mean);
    var /= double(out.size() - 1);
    EXPECT_GT(var, 0.01 * 0.95);
    EXPECT_LT(var, 0.01 * 1.05);
    // Mean preserved within 3 standard errors (clamping at 0 is ~6 sigma away).
    EXPECT_NEAR(mean, 0.25, 3.0 * std::sqrt(0.01 / double(out.size())));
}

TEST(SynthNoise, DeterministicAndSeedSensitive)
{
    const auto img = msdc::testing::random_image(32, 32, 3, 2);
    const auto model = NoiseModel::uniform(1e-3, 1e-5);
    EXPECT_EQ(synth_noise(img, model, 7), synth_noise(img, model, 7));
    EXPECT_NE(synth_noise(img, model, 7), synth_noise(img, model, 8));
    EXPECT_NE(synth_noise(img, model, 7, 1), synth_noise(img, model, 7, 2));
    const auto dark = synth_noise(SpectralImage(8, 8, 1, 0.0f), NoiseModel::uniform(0, 0.1), 1);
    for (float v : dark.data())
        EXPECT_GE(v, 0.0f);
}

TEST(SynthNoise, ChannelCountChecked)
{
    NoiseModel two{{0.1, 0.1}, {0.0, 0.0}, ""};
    EXPECT_THROW(synth_noise(SpectralImage(4, 4, 3), two, 1), ConfigError);
}

TEST(Quadruplet, NoiselessUnshiftedRemosaicsGroundTruth)
{
    const SceneRenderer renderer;
    const auto scene = make_texture_scene(32, 32, 3, renderer);
    const auto q = synth_quadruplet(scene.ms, scene.rgb, NoiseModel::uniform(0, 0), {1, 0.0, 5});
    EXPECT_EQ(q.ms_mosaic.plane, apply_mosaic(scene.ms, MosaicPattern::msfa16()).plane);
    EXPECT_EQ(q.rgb_mosaic.plane, apply_mosaic(scene.rgb, MosaicPattern::bayer_grbg()).plane);
    EXPECT_EQ(q.ms_gt, scene.ms);
    EXPECT_EQ(q.rgb_gt, scene.rgb);
    EXPECT_EQ(q.ms_target, scene.ms);
}

TEST(Quadruplet, Scenario2Shapes)
{
    const SceneRenderer renderer;
    const auto scene = make_texture_scene(64, 64, 4, renderer);
    const auto q = synth_quadruplet(scene.ms, scene.rgb, NoiseModel::uniform(1e-4, 1e-6), {2, 2.0, 5});
    EXPECT_EQ(q.ms_mosaic.height(), 16);
    EXPECT_EQ(q.ms_mosaic.width(), 16);
    EXPECT_EQ(q.ms_gt.height(), 16);
    EXPECT_EQ(q.rgb_mosaic.height(), 64);
    EXPECT_EQ(q.ms_target, scene.ms);
    EXPECT_EQ(q.scenario, 2);
}

TEST(Quadruplet, MatchesManualComposition)
{
    const SceneRenderer renderer;
    const auto scene = make_texture_scene(64, 64, 6, renderer);
    const auto noise = NoiseModel::uniform(5e-4, 5e-6);
    const auto q = synth_quadruplet(scene.ms, scene.rgb, noise, {2, 1.5, 11});
    const auto ms = apply_mosaic(synth_noise(box_downsample(scene.ms, 4), noise, 11, kMsNoiseStream),
                                 MosaicPattern::msfa16());
    EXPECT_EQ(q.ms_mosaic.plane, ms.plane);
    const auto rgb_view = translate_horizontal(scene.rgb, 1.5);
    const auto rgb = apply_mosaic(synth_noise(rgb_view, noise, 11, kRgbNoiseStream),
                                  MosaicPattern::bayer_grbg());
    EXPECT_EQ(q.rgb_mosaic.plane, rgb.plane);
    EXPECT_EQ(q.rgb_gt, rgb_view);
}

TEST(Quadruplet, NoiseLowersInterpolationQuality)
{
    const SceneRenderer renderer;
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
        const auto scene = make_texture_scene(48, 48, seed, renderer);
        const auto clean = synth_quadruplet(scene.ms, scene.rgb, NoiseModel::uniform(0, 0), {1, 0.0, seed});
        const auto noisy =
            synth_quadruplet(scene.ms, scene.rgb, NoiseModel::uniform(5e-4, 5e-6), {1, 0.0, seed});
        EXPECT_GT(psnr(demosaic_interp(clean.ms_mosaic), scene.ms),
                  psnr(demosaic_interp(noisy.ms_mosaic), scene.ms));
    }
}

TEST(Quadruplet, ExpandRgbNoise)
{
    NoiseModel rgb{{0.1, 0.2, 0.3}, {1.0, 2.0, 3.0}, "x"};
    const auto ms = expand_rgb_noise_to_ms(rgb, {2, 0, 1});
    EXPECT_EQ(ms.beta1, (std::vector<double>{0.3, 0.1, 0.2}));
    EXPECT_EQ(ms.beta2, (std::vector<double>{3.0, 1.0, 2.0}));
}

TEST(ShippedCurves, MatchDefaultsAndGiveTheSameSelection)
{
    const std::string dir = MSDC_FIXTURES_DIR;
    const auto rgb = default_rgb_responses();
    const auto spds = default_box_spds();
    std::array<SpectralCurve, 3> rgb_csv;
    std::array<SpectralCurve, 7> spd_csv;
    const char* names[] = {"r", "g", "b"};
    for (int i = 0; i < 3; ++i) {
        rgb_csv[std::size_t(i)] = load_curve_csv(dir + "/rgb_" + names[i] + ".csv");
        ASSERT_TRUE(rgb_csv[std::size_t(i)].same_grid(rgb[std::size_t(i)]));
        for (std::size_t k = 0; k < rgb[std::size_t(i)].values.size(); ++k)
            EXPECT_NEAR(rgb_csv[std::size_t(i)].values[k], rgb[std::size_t(i)].values[k], 1e-9);
    }
    for (int j = 0; j < 7; ++j) {
        spd_csv[std::size_t(j)] = load_curve_csv(dir + "/spd_" + std::to_string(j) + ".csv");
        EXPECT_EQ(spd_csv[std::size_t(j)].values, spds[std::size_t(j)].values);
    }
    EXPECT_EQ(select_channels(synth_ms_responses(rgb_csv, spd_csv)),
              default_ms_responses().selected);
}
