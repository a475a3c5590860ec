#pragma once

#include <array>
#include <filesystem>
#include <optional>

#include <Eigen/Dense>

#include "msdc/image.hpp"

namespace msdc {

/// 16 x 3 MS-to-RGB conversion: rgb_row = ms_row * entries.
struct ColorMatrix {
    Eigen::Matrix<double, 16, 3> entries = Eigen::Matrix<double, 16, 3>::Zero();
    double residual = 0.0;  // Frobenius norm of A * C - B on the calibration patches
    int patch_count = 0;
};

/// White balance, 3x3 color correction and display gamma.
struct CameraMeta {
    std::array<double, 3> white_balance{1.0, 1.0, 1.0};
    Eigen::Matrix3d ccm = Eigen::Matrix3d::Identity();
    double gamma = 2.2;
};

/// Ridge used to condition the normal equations.
inline constexpr double kColorRidge = 1e-8;

/// Least-squares C minimizing ||A C - B||_F via (A^T A + ridge I) C = A^T B.
///
/// Identically-zero columns of A (channels absent from every patch) receive zero
/// rows in C. Linear dependence among the remaining columns is a CalibrationError
/// listing the columns a pivoted QR could not resolve.
ColorMatrix fit_color_matrix(const Eigen::MatrixXd& ms_patches, const Eigen::MatrixXd& rgb_patches);

/// Frobenius residual ||A C - B||_F for an arbitrary matrix.
double color_residual(const Eigen::MatrixXd& ms_patches, const Eigen::MatrixXd& rgb_patches,
                      const Eigen::Matrix<double, 16, 3>& entries);

/// Per-pixel 16-vector times C, negative results clamped to 0.
SpectralImage ms_to_proxy_rgb(const SpectralImage& img, const ColorMatrix& matrix);

/// Gray-world metadata: gains equalizing channel means, identity ccm, gamma 2.2.
CameraMeta gray_world_meta(const SpectralImage& rgb);

/// clamp01((img * wb) ccm^T)^(1 / gamma). Falls back to gray_world_meta when
/// no metadata is supplied.
SpectralImage to_srgb_preview(const SpectralImage& img, const std::optional<CameraMeta>& meta);

/// JSON persistence: {"rows": 16 x 3, "residual": r, "patch_count": k}.
void save_color_matrix(const std::filesystem::path& path, const ColorMatrix& matrix);
ColorMatrix load_color_matrix(const std::filesystem::path& path);

}  // namespace msdc
