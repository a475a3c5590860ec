#pragma once

#include <array>
#include <filesystem>
#include <utility>
#include <vector>

namespace msdc {

/// Sampled spectral curve (responsivity or power) on an ascending uniform grid.
struct SpectralCurve {
    std::vector<double> wavelengths;  // nm
    std::vector<double> values;       // >= 0

    /// Throws ConfigError on length mismatch, non-ascending grid or negative values.
    void validate() const;
    bool same_grid(const SpectralCurve& other) const;
    /// Trapezoidal integral over the grid.
    double area() const;
    /// Wavelength of the first maximum.
    double peak_wavelength() const;
};

/// Default grid: 380..760 nm in 5 nm steps (77 samples).
std::vector<double> default_wavelength_grid();

/// Combined sensor + CFA response for R, G, B: Gaussians peaking at
/// 610 / 540 / 460 nm with sigma 30 nm.
std::array<SpectralCurve, 3> default_rgb_responses();

/// Seven 55 nm-wide box SPDs tiling the default grid.
std::array<SpectralCurve, 7> default_box_spds();

/// Reads "wavelength_nm,value" lines. Blank lines and lines starting with '#'
/// are skipped; a non-numeric first line is treated as a header.
SpectralCurve load_curve_csv(const std::filesystem::path& path);
void save_curve_csv(const std::filesystem::path& path, const SpectralCurve& curve);

/// The 21 products of RGB responses with illumination SPDs.
struct MsResponseSet {
    std::vector<SpectralCurve> curves;              // 21, ordered j-major then i
    std::vector<std::pair<int, int>> provenance;    // (rgb channel i, spd j)
    std::vector<int> selected;                      // 16 curve indices once selected
};

/// curve(i, j) = rgb_i * spd_j pointwise, stored at index j * 3 + i.
/// Throws ConfigError if the grids differ.
MsResponseSet synth_ms_responses(const std::array<SpectralCurve, 3>& rgb,
                                 const std::array<SpectralCurve, 7>& spds);

/// Picks 16 of the 21 curves: the 12 with the largest area, then 4 of the rest
/// by greedy max-min separation of peak wavelength from everything already
/// chosen (ties go to the lower curve index). Returned in ascending index order.
std::vector<int> select_channels(const MsResponseSet& responses);

/// Convenience: default responses with the selection filled in.
MsResponseSet default_ms_responses();

}  // namespace msdc
