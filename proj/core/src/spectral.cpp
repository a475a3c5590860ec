#include "msdc/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include "msdc/error.hpp"
#include "msdc/msi_io.hpp"

namespace msdc {

void SpectralCurve::validate() const
{
    if (wavelengths.size() != values.size())
        throw ConfigError("spectral curve: wavelength and value counts differ");
    if (wavelengths.size() < 2)
        throw ConfigError("spectral curve: needs at least two samples");
    for (std::size_t i = 1; i < wavelengths.size(); ++i)
        if (!(wavelengths[i] > wavelengths[i - 1]))
            throw ConfigError("spectral curve: wavelengths must be ascending");
    for (double v : values)
        if (!(v >= 0.0))
            throw ConfigError("spectral curve: negative or NaN value");
}

bool SpectralCurve::same_grid(const SpectralCurve& other) const
{
    if (wavelengths.size() != other.wavelengths.size())
        return false;
    for (std::size_t i = 0; i < wavelengths.size(); ++i)
        if (std::abs(wavelengths[i] - other.wavelengths[i]) > 1e-9)
            return false;
    return true;
}

double SpectralCurve::area() const
{
    double sum = 0.0;
    for (std::size_t i = 1; i < values.size(); ++i)
        sum += 0.5 * (values[i] + values[i - 1]) * (wavelengths[i] - wavelengths[i - 1]);
    return sum;
}

double SpectralCurve::peak_wavelength() const
{
    const auto it = std::max_element(values.begin(), values.end());
    return wavelengths[std::size_t(it - values.begin())];
}

std::vector<double> default_wavelength_grid()
{
    std::vector<double> grid;
    for (int nm = 380; nm <= 760; nm += 5)
        grid.push_back(nm);
    return grid;
}

std::array<SpectralCurve, 3> default_rgb_responses()
{
    const auto grid = default_wavelength_grid();
    constexpr std::array<double, 3> peaks = {610.0, 540.0, 460.0};
    constexpr double sigma = 30.0;
    std::array<SpectralCurve, 3> out;
    for (std::size_t i = 0; i < 3; ++i) {
        out[i].wavelengths = grid;
        for (double nm : grid) {
            const double d = (nm - peaks[i]) / sigma;
            out[i].values.push_back(std::exp(-0.5 * d * d));
        }
    }
    return out;
}

std::array<SpectralCurve, 7> default_box_spds()
{
    const auto grid = default_wavelength_grid();
    std::array<SpectralCurve, 7> out;
    for (std::size_t j = 0; j < 7; ++j) {
        const double lo = 380.0 + 55.0 * double(j);
        const double hi = lo + 55.0;
        out[j].wavelengths = grid;
        for (double nm : grid)
            out[j].values.push_back(nm >= lo && nm < hi ? 1.0 : 0.0);
    }
    return out;
}

SpectralCurve load_curve_csv(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open " + path.string());
    SpectralCurve curve;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#')
            continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ss(line);
        double nm = 0.0, v = 0.0;
        if (!(ss >> nm >> v)) {
            if (line_no == 1)
                continue;  // header
            throw IntegrityError(path.string() + ":" + std::to_string(line_no) +
                                 ": expected 'wavelength_nm,value'");
        }
        curve.wavelengths.push_back(nm);
        curve.values.push_back(v);
    }
    curve.validate();
    return curve;
}

void save_curve_csv(const std::filesystem::path& path, const SpectralCurve& curve)
{
    std::ostringstream ss;
    ss << "wavelength_nm,value\n";
    ss.precision(10);
    for (std::size_t i = 0; i < curve.values.size(); ++i)
        ss << curve.wavelengths[i] << ',' << curve.values[i] << '\n';
    write_file_atomic(path, ss.str());
}

MsResponseSet synth_ms_responses(const std::array<SpectralCurve, 3>& rgb,
                                 const std::array<SpectralCurve, 7>& spds)
{
    for (const auto& c : rgb)
        c.validate();
    for (const auto& s : spds) {
        s.validate();
        if (!s.same_grid(rgb[0]))
            throw ConfigError("synth_ms_responses: SPD grid differs from RGB response grid");
    }
    for (const auto& c : rgb)
        if (!c.same_grid(rgb[0]))
            throw ConfigError("synth_ms_responses: RGB response grids differ");

    MsResponseSet out;
    for (int j = 0; j < 7; ++j)
        for (int i = 0; i < 3; ++i) {
            SpectralCurve c;
            c.wavelengths = rgb[std::size_t(i)].wavelengths;
            c.values.resize(c.wavelengths.size());
            for (std::size_t n = 0; n < c.values.size(); ++n)
                c.values[n] = rgb[std::size_t(i)].values[n] * spds[std::size_t(j)].values[n];
            out.curves.push_back(std::move(c));
            out.provenance.emplace_back(i, j);
        }
    return out;
}

std::vector<int> select_channels(const MsResponseSet& responses)
{
    constexpr int kTotal = 21;
    constexpr int kByArea = 12;
    constexpr int kSelected = 16;
    if (responses.curves.size() != std::size_t(kTotal))
        throw ConfigError("select_channels: expected 21 curves, got " +
                          std::to_string(responses.curves.size()));

    std::vector<double> areas;
    std::vector<double> peaks;
    for (const auto& c : responses.curves) {
        areas.push_back(c.area());
        peaks.push_back(c.peak_wavelength());
    }

    std::vector<int> order(kTotal);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return areas[std::size_t(a)] > areas[std::size_t(b)];
    });

    std::vector<int> chosen(order.begin(), order.begin() + kByArea);
    std::vector<int> rest(order.begin() + kByArea, order.end());
    std::sort(rest.begin(), rest.end());

    while (int(chosen.size()) < kSelected) {
        int best = -1;
        double best_sep = -1.0;
        for (int cand : rest) {
            if (std::find(chosen.begin(), chosen.end(), cand) != chosen.end())
                continue;
            double sep = std::numeric_limits<double>::infinity();
            for (int s : chosen)
                sep = std::min(sep, std::abs(peaks[std::size_t(cand)] - peaks[std::size_t(s)]));
            if (sep > best_sep) {  // strict: ties keep the lower index
                best_sep = sep;
                best = cand;
            }
        }
        chosen.push_back(best);
    }
    std::sort(chosen.begin(), chosen.end());
    return chosen;
}

MsResponseSet default_ms_responses()
{
    auto set = synth_ms_responses(default_rgb_responses(), default_box_spds());
    set.selected = select_channels(set);
    return set;
}

}  // namespace msdc
