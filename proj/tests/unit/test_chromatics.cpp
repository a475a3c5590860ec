#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>

#include "msdc/color.hpp"
#include "msdc/error.hpp"
#include "msdc/metrics.hpp"
#include "msdc/rng.hpp"
#include "msdc/scene.hpp"
#include "support/fixtures.hpp"

using namespace msdc;

namespace {

Eigen::MatrixXd random_matrix(int rows, int cols, std::uint64_t seed, double lo = 0.0, double hi = 1.0)
{
    Rng rng(seed);
    Eigen::MatrixXd m(rows, cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c)
            m(r, c) = rng.uniform(lo, hi);
    return m;
}

}  // namespace

TEST(FitColorMatrix, RecoversNoiselessTruth)
{
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const Eigen::MatrixXd a = random_matrix(140, 16, seed);
        const Eigen::MatrixXd truth = random_matrix(16, 3, seed + 100, -1.0, 1.0);
        const auto fit = fit_color_matrix(a, a * truth);
        EXPECT_LE((fit.entries - truth).cwiseAbs().maxCoeff(), 1e-6);
        EXPECT_EQ(fit.patch_count, 140);
    }
}

TEST(FitColorMatrix, EmbeddedIdentity)
{
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(30, 16);
    const Eigen::MatrixXd r = random_matrix(30, 3, 9);
    a.leftCols(3) = r;
    const auto fit = fit_color_matrix(a, r);
    EXPECT_LE((fit.entries.topRows(3) - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff(), 1e-6);
    EXPECT_LE(fit.entries.bottomRows(13).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(FitColorMatrix, NoisyResidualNoWorseThanTruth)
{
    const Eigen::MatrixXd a = random_matrix(140, 16, 3);
    const Eigen::MatrixXd truth = random_matrix(16, 3, 4, -1.0, 1.0);
    const Eigen::MatrixXd b = a * truth + 0.01 * random_matrix(140, 3, 5, -1.0, 1.0);
    const auto fit = fit_color_matrix(a, b);
    EXPECT_LE(fit.residual, color_residual(a, b, truth) + 1e-12);
    EXPECT_NEAR(fit.residual, color_residual(a, b, fit.entries), 1e-12);
}

TEST(FitColorMatrix, RankDeficiencyNamesColumns)
{
    Eigen::MatrixXd a = random_matrix(40, 16, 6);
    a.col(7) = 2.0 * a.col(3);
    try {
        fit_color_matrix(a, random_matrix(40, 3, 7));
        FAIL() << "expected CalibrationError";
    } catch (const CalibrationError& e) {
        const std::string what = e.what();
        const std::string cols = what.substr(what.find("columns:") + 8);
        EXPECT_TRUE(cols == " 3" || cols == " 7") << what;
    }
    EXPECT_THROW(fit_color_matrix(random_matrix(10, 16, 1), random_matrix(10, 3, 2)), CalibrationError);
}

TEST(ProxyRgb, ZeroMatrixAndBasis)
{
    const auto img = msdc::testing::random_image(4, 4, 16, 1);
    EXPECT_EQ(ms_to_proxy_rgb(img, ColorMatrix{}), SpectralImage(4, 4, 3));

    ColorMatrix m;
    m.entries = random_matrix(16, 3, 2, -1.0, 1.0);
    for (int k = 0; k < 16; ++k) {
        SpectralImage e(1, 1, 16);
        e.at(0, 0, k) = 1.0f;
        const auto out = ms_to_proxy_rgb(e, m);
        for (int c = 0; c < 3; ++c)
            EXPECT_NEAR(out.at(0, 0, c), std::max(0.0, m.entries(k, c)), 1e-7);
    }
    EXPECT_THROW(ms_to_proxy_rgb(SpectralImage(2, 2, 3), m), DimensionError);
}

TEST(ProxyRgb, MatchesDotProductOracle)
{
    const auto img = msdc::testing::random_image(12, 10, 16, 3);
    ColorMatrix m;
    m.entries = random_matrix(16, 3, 4, -0.3, 1.0);
    const auto out = ms_to_proxy_rgb(img, m);
    for (int y = 0; y < 12; ++y)
        for (int x = 0; x < 10; ++x)
            for (int c = 0; c < 3; ++c) {
                double s = 0;
                for (int k = 0; k < 16; ++k)
                    s += double(img.at(y, x, k)) * m.entries(k, c);
                EXPECT_NEAR(out.at(y, x, c), std::max(0.0, s), 1e-6);
            }
}

TEST(ProxyRgb, LinearForNonNegativeResults)
{
    const auto x = msdc::testing::random_image(6, 6, 16, 5);
    const auto y = msdc::testing::random_image(6, 6, 16, 6);
    ColorMatrix m;
    m.entries = random_matrix(16, 3, 7);
    SpectralImage mix(6, 6, 16);
    for (std::size_t i = 0; i < mix.size(); ++i)
        mix.data()[i] = 0.3f * x.data()[i] + 0.5f * y.data()[i];
    const auto fx = ms_to_proxy_rgb(x, m), fy = ms_to_proxy_rgb(y, m), fm = ms_to_proxy_rgb(mix, m);
    for (std::size_t i = 0; i < fm.size(); ++i)
        EXPECT_NEAR(fm.data()[i], 0.3f * fx.data()[i] + 0.5f * fy.data()[i], 1e-5);
}

TEST(ProxyRgb, CalibratedMatrixBeatsChannelAveraging)
{
    const SceneRenderer renderer;
    const auto patches = make_color_patches(140, 77, renderer);
    const auto fit = fit_color_matrix(patches.ms, patches.rgb);
    ColorMatrix avg;
    avg.entries.setConstant(1.0 / 16.0);
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        const auto scene = make_texture_scene(32, 32, seed, renderer);
        EXPECT_LT(sam(ms_to_proxy_rgb(scene.ms, fit), scene.rgb),
                  sam(ms_to_proxy_rgb(scene.ms, avg), scene.rgb));
    }
}

TEST(SrgbPreview, NeutralMetadataIsClampedIdentity)
{
    auto img = msdc::testing::random_image(5, 5, 3, 8, -0.2, 1.2);
    CameraMeta meta;
    meta.gamma = 1.0;
    const auto out = to_srgb_preview(img, meta);
    for (std::size_t i = 0; i < img.size(); ++i)
        EXPECT_FLOAT_EQ(out.data()[i], std::clamp(img.data()[i], 0.0f, 1.0f));
}

TEST(SrgbPreview, GrayClosedForm)
{
    const auto out = to_srgb_preview(SpectralImage(4, 4, 3, 0.25f), CameraMeta{});
    for (float v : out.data())
        EXPECT_NEAR(v, std::pow(0.25, 1.0 / 2.2), 1e-6);
    EXPECT_NEAR(std::pow(0.25, 1.0 / 2.2), 0.533, 1e-3);
    const auto fallback = to_srgb_preview(SpectralImage(4, 4, 3, 0.25f), std::nullopt);
    EXPECT_EQ(fallback, out);
}

TEST(SrgbPreview, MatchesScalarPipeline)
{
    const auto img = msdc::testing::random_image(6, 7, 3, 9);
    CameraMeta meta;
    meta.white_balance = {1.8, 1.0, 1.4};
    meta.ccm << 1.5, -0.3, -0.2, -0.2, 1.4, -0.2, -0.1, -0.4, 1.5;
    meta.gamma = 2.4;
    const auto out = to_srgb_preview(img, meta);
    for (int y = 0; y < 6; ++y)
        for (int x = 0; x < 7; ++x)
            for (int r = 0; r < 3; ++r) {
                double s = 0;
                for (int c = 0; c < 3; ++c)
                    s += meta.ccm(r, c) * img.at(y, x, c) * meta.white_balance[std::size_t(c)];
                s = std::min(1.0, std::max(0.0, s));
                EXPECT_NEAR(out.at(y, x, r), std::pow(s, 1.0 / 2.4), 1e-6);
            }
}

TEST(ColorMatrixIo, JsonRoundTrip)
{
    ColorMatrix m;
    m.entries = random_matrix(16, 3, 10, -1, 1);
    m.residual = 0.125;
    m.patch_count = 140;
    const auto path = std::filesystem::temp_directory_path() / "msdc_color_matrix_test.json";
    save_color_matrix(path, m);
    const auto back = load_color_matrix(path);
    EXPECT_EQ(back.entries, m.entries);
    EXPECT_EQ(back.residual, m.residual);
    EXPECT_EQ(back.patch_count, 140);
}
