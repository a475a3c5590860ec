#include "msdc/color.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "msdc/error.hpp"
#include "msdc/msi_io.hpp"

namespace msdc {

double color_residual(const Eigen::MatrixXd& ms_patches, const Eigen::MatrixXd& rgb_patches,
                      const Eigen::Matrix<double, 16, 3>& entries)
{
    return (ms_patches * entries - rgb_patches).norm();
}

ColorMatrix fit_color_matrix(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b)
{
    if (a.cols() != 16 || b.cols() != 3)
        throw DimensionError("fit_color_matrix: expects K x 16 and K x 3 patch matrices");
    if (a.rows() != b.rows())
        throw DimensionError("fit_color_matrix: patch counts differ");
    if (a.rows() < 16)
        throw CalibrationError("fit_color_matrix: need at least 16 patches, got " +
                               std::to_string(a.rows()));
    if (!a.allFinite() || !b.allFinite())
        throw CalibrationError("fit_color_matrix: non-finite patch values");

    std::vector<int> active;
    for (int c = 0; c < 16; ++c)
        if (a.col(c).cwiseAbs().maxCoeff() > 0.0)
            active.push_back(c);
    if (active.empty())
        throw CalibrationError("fit_color_matrix: every MS column is zero");

    Eigen::MatrixXd sub(a.rows(), Eigen::Index(active.size()));
    for (std::size_t k = 0; k < active.size(); ++k)
        sub.col(Eigen::Index(k)) = a.col(active[k]);

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(sub);
    qr.setThreshold(1e-10);
    if (qr.rank() < sub.cols()) {
        std::ostringstream msg;
        msg << "fit_color_matrix: rank-deficient MS patches (rank " << qr.rank() << " of "
            << sub.cols() << " active columns); dependent columns:";
        for (Eigen::Index k = qr.rank(); k < sub.cols(); ++k)
            msg << ' ' << active[std::size_t(qr.colsPermutation().indices()(k))];
        throw CalibrationError(msg.str());
    }

    const Eigen::MatrixXd gram =
        sub.transpose() * sub +
        kColorRidge * Eigen::MatrixXd::Identity(sub.cols(), sub.cols());
    const Eigen::MatrixXd solution = gram.ldlt().solve(sub.transpose() * b);

    ColorMatrix out;
    for (std::size_t k = 0; k < active.size(); ++k)
        out.entries.row(active[k]) = solution.row(Eigen::Index(k));
    if (!out.entries.allFinite())
        throw NumericalError("fit_color_matrix: non-finite solution");
    out.residual = color_residual(a, b, out.entries);
    out.patch_count = int(a.rows());
    return out;
}

SpectralImage ms_to_proxy_rgb(const SpectralImage& img, const ColorMatrix& matrix)
{
    if (img.channels() != 16)
        throw DimensionError("ms_to_proxy_rgb: expects 16 channels, got " + img.shape_string());
    SpectralImage out(img.height(), img.width(), 3);
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x) {
            const float* p = img.pixel(y, x);
            float* q = out.pixel(y, x);
            for (int o = 0; o < 3; ++o) {
                double acc = 0.0;
                for (int k = 0; k < 16; ++k)
                    acc += double(p[k]) * matrix.entries(k, o);
                q[o] = float(std::max(0.0, acc));
            }
        }
    return out;
}

CameraMeta gray_world_meta(const SpectralImage& rgb)
{
    if (rgb.channels() != 3)
        throw DimensionError("gray_world_meta: expects 3 channels");
    std::array<double, 3> mean{};
    for (std::size_t i = 0; i < rgb.pixel_count(); ++i)
        for (int c = 0; c < 3; ++c)
            mean[std::size_t(c)] += rgb.data()[i * 3 + std::size_t(c)];
    const double gray = (mean[0] + mean[1] + mean[2]) / 3.0;
    CameraMeta meta;
    for (std::size_t c = 0; c < 3; ++c)
        meta.white_balance[c] = mean[c] > 0.0 ? gray / mean[c] : 1.0;
    return meta;
}

SpectralImage to_srgb_preview(const SpectralImage& img, const std::optional<CameraMeta>& meta)
{
    if (img.channels() != 3)
        throw DimensionError("to_srgb_preview: expects 3 channels, got " + img.shape_string());
    const CameraMeta m = meta ? *meta : gray_world_meta(img);
    for (double g : m.white_balance)
        if (!(g > 0.0))
            throw ConfigError("to_srgb_preview: white-balance gains must be positive");
    if (!(m.gamma > 0.0))
        throw ConfigError("to_srgb_preview: gamma must be positive");
    const double inv_gamma = 1.0 / m.gamma;
    SpectralImage out(img.height(), img.width(), 3);
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x) {
            const float* p = img.pixel(y, x);
            const Eigen::Vector3d balanced(p[0] * m.white_balance[0], p[1] * m.white_balance[1],
                                           p[2] * m.white_balance[2]);
            const Eigen::Vector3d corrected = m.ccm * balanced;
            float* q = out.pixel(y, x);
            for (int c = 0; c < 3; ++c)
                q[c] = float(std::pow(std::clamp(corrected(c), 0.0, 1.0), inv_gamma));
        }
    return out;
}

void save_color_matrix(const std::filesystem::path& path, const ColorMatrix& matrix)
{
    nlohmann::json rows = nlohmann::json::array();
    for (int r = 0; r < 16; ++r)
        rows.push_back({matrix.entries(r, 0), matrix.entries(r, 1), matrix.entries(r, 2)});
    nlohmann::json j{{"rows", rows}, {"residual", matrix.residual},
                     {"patch_count", matrix.patch_count}};
    write_file_atomic(path, j.dump(2) + "\n");
}

ColorMatrix load_color_matrix(const std::filesystem::path& path)
{
    try {
        const auto j = nlohmann::json::parse(read_file(path));
        const auto& rows = j.at("rows");
        if (!rows.is_array() || rows.size() != 16)
            throw IntegrityError(path.string() + ": color matrix needs 16 rows");
        ColorMatrix m;
        for (int r = 0; r < 16; ++r) {
            const auto& row = rows.at(std::size_t(r));
            if (!row.is_array() || row.size() != 3)
                throw IntegrityError(path.string() + ": row " + std::to_string(r) +
                                     " needs 3 entries");
            for (int c = 0; c < 3; ++c)
                m.entries(r, c) = row.at(std::size_t(c)).get<double>();
        }
        m.residual = j.value("residual", 0.0);
        m.patch_count = j.value("patch_count", 0);
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw IntegrityError(path.string() + ": " + e.what());
    }
}

}  // namespace msdc
