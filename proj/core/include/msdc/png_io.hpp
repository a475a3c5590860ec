#pragma once

#include <filesystem>

#include "msdc/image.hpp"

namespace msdc {

/// 8-bit PNG export for previews. Accepts 1- or 3-channel images; values are
/// clamped to [0, 1] and rounded.
void write_png(const std::filesystem::path& path, const SpectralImage& img);

}  // namespace msdc
