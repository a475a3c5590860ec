#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "msdc/dataset.hpp"
#include "msdc/noise.hpp"

namespace msdc::cli {

namespace fs = std::filesystem;
using nlohmann::json;

/// Parsed JSON document that throws ConfigError (with the file name) on bad syntax.
json read_json(const fs::path& path);
void write_json(const fs::path& path, const json& j);

/// Rejects keys outside `known`, naming `where` in the message.
void check_keys(const json& j, const std::vector<std::string>& known, const std::string& where);

/// Numeric CSV rows. Blank lines and '#' comments are skipped; a first line that
/// does not parse as numbers is taken as a header. Malformed rows raise an
/// IntegrityError of the form "<file>:<line>: ...".
std::vector<std::vector<double>> read_numeric_csv(const fs::path& path, std::size_t columns);

json noise_to_json(const NoiseModel& model);
NoiseModel noise_from_json(const json& j, const std::string& where);

/// Quadruplet directory layout written by `simulate`.
inline constexpr const char* kMsMosaic = "ms_mosaic.msi";
inline constexpr const char* kRgbMosaic = "rgb_mosaic.msi";
inline constexpr const char* kMsGt = "ms_gt.msi";
inline constexpr const char* kRgbGt = "rgb_gt.msi";
inline constexpr const char* kMsTarget = "ms_target.msi";  // scenario 2 only
inline constexpr const char* kManifest = "manifest.json";

void save_quadruplet(const fs::path& dir, const DatasetQuadruplet& q);
DatasetQuadruplet load_quadruplet(const fs::path& dir);

/// Resolves `p` against `base` unless it is already absolute.
fs::path resolve(const fs::path& base, const fs::path& p);

}  // namespace msdc::cli
