#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "msdc/image.hpp"
#include "msdc/noise.hpp"
#include "msdc/spectral.hpp"

namespace msdc {

/// Projects reflectance spectra onto the 16 selected MS responses and the three
/// RGB responses. Each channel is normalized so that a perfect white reflector
/// reads `white_level`.
class SceneRenderer {
public:
    SceneRenderer(const MsResponseSet& ms, const std::array<SpectralCurve, 3>& rgb,
                  double white_level = 0.9);
    /// Default responses and selection.
    SceneRenderer();

    std::array<double, 16> ms_response(const std::vector<double>& reflectance) const;
    std::array<double, 3> rgb_response(const std::vector<double>& reflectance) const;
    const std::vector<double>& grid() const noexcept { return grid_; }

    /// Smooth random reflectance in [0.02, 1] on the renderer's grid.
    std::vector<double> random_reflectance(std::uint64_t seed) const;

private:
    std::vector<double> grid_;
    std::vector<std::vector<double>> ms_;   // 16 normalized curves
    std::vector<std::vector<double>> rgb_;  // 3 normalized curves
};

/// Aligned MS / RGB ground truths of one synthetic scene.
struct ScenePair {
    SpectralImage ms;   // H x W x 16
    SpectralImage rgb;  // H x W x 3
};

/// Procedural textured scene: a handful of random materials laid out as
/// rectangles, discs, gratings, checkerboards and thin lines, rendered at 2x
/// and box-filtered, under smooth multiplicative shading.
ScenePair make_texture_scene(int height, int width, std::uint64_t seed,
                             const SceneRenderer& renderer);

/// Color-chart style patch means for color-matrix calibration.
struct PatchTable {
    Eigen::MatrixXd ms;   // K x 16
    Eigen::MatrixXd rgb;  // K x 3
};
PatchTable make_color_patches(int count, std::uint64_t seed, const SceneRenderer& renderer);

/// Monte-Carlo homogeneous patches: for each intensity and channel, `draws`
/// values I + N(0, beta1 I + beta2) (unclamped) summarized as (mean, unbiased variance).
std::vector<NoiseSample> simulate_noise_patches(const NoiseModel& model, int channels,
                                                const std::vector<double>& intensities,
                                                int draws, std::uint64_t seed);

}  // namespace msdc
