#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "msdc/image.hpp"

namespace msdc {

// MSI raster layout (little-endian):
//   "MSIF" | u32 version (=1) | u32 height | u32 width | u32 channels |
//   height * width * channels float32, row-major, channel-interleaved.

inline constexpr char kMsiMagic[4] = {'M', 'S', 'I', 'F'};
inline constexpr unsigned kMsiVersion = 1;
inline constexpr std::size_t kMsiHeaderBytes = 20;

std::string encode_msi(const SpectralImage& img);
/// Throws IntegrityError naming the byte offset of the first inconsistency.
SpectralImage decode_msi(const std::string& bytes);

void write_msi(const std::filesystem::path& path, const SpectralImage& img);
SpectralImage read_msi(const std::filesystem::path& path);

/// Optional `<name>.json` sidecar next to an MSI file.
struct MsiSidecar {
    std::string pattern;  // "bayer_grbg", "msfa16", ... or empty
    double white_level = 1.0;
    std::string notes;
};

std::filesystem::path sidecar_path(const std::filesystem::path& msi_path);
void write_sidecar(const std::filesystem::path& msi_path, const MsiSidecar& sidecar);
std::optional<MsiSidecar> read_sidecar(const std::filesystem::path& msi_path);

/// Writes to `<path>.tmp` and renames over the destination.
void write_file_atomic(const std::filesystem::path& path, const std::string& bytes);
std::string read_file(const std::filesystem::path& path);

}  // namespace msdc
