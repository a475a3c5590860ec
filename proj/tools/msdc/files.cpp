#include "files.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

#include "msdc/error.hpp"
#include "msdc/msi_io.hpp"

namespace msdc::cli {

json read_json(const fs::path& path)
{
    const std::string text = read_file(path);
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

void write_json(const fs::path& path, const json& j)
{
    write_file_atomic(path, j.dump(2) + "\n");
}

void check_keys(const json& j, const std::vector<std::string>& known, const std::string& where)
{
    if (!j.is_object())
        throw ConfigError(where + ": expected a JSON object");
    for (const auto& [key, value] : j.items())
        if (std::find(known.begin(), known.end(), key) == known.end())
            throw ConfigError(where + ": unknown key '" + key + "'");
}

namespace {

bool parse_row(const std::string& line, std::vector<double>& out)
{
    out.clear();
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        const auto first = cell.find_first_not_of(" \t\r");
        const auto last = cell.find_last_not_of(" \t\r");
        if (first == std::string::npos)
            return false;
        const char* b = cell.data() + first;
        const char* e = cell.data() + last + 1;
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(b, e, v);
        if (ec != std::errc{} || ptr != e)
            return false;
        out.push_back(v);
    }
    return !out.empty();
}

}  // namespace

std::vector<std::vector<double>> read_numeric_csv(const fs::path& path, std::size_t columns)
{
    std::istringstream in(read_file(path));
    std::vector<std::vector<double>> rows;
    std::string line;
    std::vector<double> row;
    bool first = true;
    for (int number = 1; std::getline(in, line); ++number) {
        const auto start = line.find_first_not_of(" \t\r");
        if (start == std::string::npos || line[start] == '#')
            continue;
        const bool ok = parse_row(line, row);
        if (!ok && first) {
            first = false;
            continue;
        }
        first = false;
        const std::string at = path.string() + ":" + std::to_string(number) + ": ";
        if (!ok)
            throw IntegrityError(at + "expected numeric fields");
        if (row.size() != columns)
            throw IntegrityError(at + "expected " + std::to_string(columns) + " fields, got " +
                                 std::to_string(row.size()));
        rows.push_back(row);
    }
    if (rows.empty())
        throw IntegrityError(path.string() + ": no data rows");
    return rows;
}

json noise_to_json(const NoiseModel& model)
{
    return {{"beta1", model.beta1}, {"beta2", model.beta2}, {"iso_tag", model.iso_tag}};
}

NoiseModel noise_from_json(const json& j, const std::string& where)
{
    check_keys(j, {"beta1", "beta2", "iso_tag", "rms_residual"}, where);
    NoiseModel m;
    try {
        m.beta1 = j.at("beta1").get<std::vector<double>>();
        m.beta2 = j.at("beta2").get<std::vector<double>>();
        m.iso_tag = j.value("iso_tag", std::string{});
    } catch (const json::exception& e) {
        throw ConfigError(where + ": " + e.what());
    }
    if (m.beta1.empty() || m.beta1.size() != m.beta2.size())
        throw ConfigError(where + ": beta1 and beta2 must be non-empty and of equal length");
    for (std::size_t i = 0; i < m.beta1.size(); ++i)
        if (!(m.beta1[i] >= 0.0) || !(m.beta2[i] >= 0.0))
            throw ConfigError(where + ": noise coefficients must be non-negative");
    return m;
}

namespace {

void write_raster(const fs::path& path, const SpectralImage& img, const std::string& pattern)
{
    write_msi(path, img);
    write_sidecar(path, {pattern, 1.0, {}});
}

MosaicImage read_mosaic(const fs::path& path)
{
    MosaicImage m;
    m.plane = read_msi(path);
    const auto side = read_sidecar(path);
    if (!side || side->pattern.empty())
        throw IntegrityError(path.string() + ": missing mosaic pattern sidecar");
    m.pattern = MosaicPattern::from_name(side->pattern);
    if (m.plane.channels() != 1)
        throw DimensionError(path.string() + ": a mosaic must have one channel");
    return m;
}

}  // namespace

void save_quadruplet(const fs::path& dir, const DatasetQuadruplet& q)
{
    fs::create_directories(dir);
    write_raster(dir / kMsMosaic, q.ms_mosaic.plane, q.ms_mosaic.pattern.name);
    write_raster(dir / kRgbMosaic, q.rgb_mosaic.plane, q.rgb_mosaic.pattern.name);
    write_raster(dir / kMsGt, q.ms_gt, {});
    write_raster(dir / kRgbGt, q.rgb_gt, {});
    if (q.scenario == 2)
        write_raster(dir / kMsTarget, q.ms_target, {});
}

DatasetQuadruplet load_quadruplet(const fs::path& dir)
{
    const json manifest = read_json(dir / kManifest);
    DatasetQuadruplet q;
    try {
        q.scenario = manifest.at("scenario").get<int>();
        q.baseline_px = manifest.at("shift_px").get<double>();
    } catch (const json::exception& e) {
        throw ConfigError((dir / kManifest).string() + ": " + e.what());
    }
    q.ms_mosaic = read_mosaic(dir / kMsMosaic);
    q.rgb_mosaic = read_mosaic(dir / kRgbMosaic);
    q.ms_gt = read_msi(dir / kMsGt);
    q.rgb_gt = read_msi(dir / kRgbGt);
    q.ms_target = q.scenario == 2 ? read_msi(dir / kMsTarget) : q.ms_gt;
    return q;
}

fs::path resolve(const fs::path& base, const fs::path& p)
{
    return p.is_absolute() ? p : base / p;
}

}  // namespace msdc::cli
