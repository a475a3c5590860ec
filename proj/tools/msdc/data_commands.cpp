#include <array>
#include <cstdio>
#include <iomanip>
#include <sstream>

#include "commands.hpp"
#include "files.hpp"
#include "msdc/color.hpp"
#include "msdc/error.hpp"
#include "msdc/msi_io.hpp"
#include "msdc/scene.hpp"
#include "msdc/spectral.hpp"

namespace msdc::cli {

namespace {

/// Default responses, or rgb_{r,g,b}.csv and spd_{0..6}.csv from `dir`.
SceneRenderer make_renderer(const std::string& dir)
{
    if (dir.empty())
        return SceneRenderer{};
    std::array<SpectralCurve, 3> rgb;
    const char* names[] = {"r", "g", "b"};
    for (int i = 0; i < 3; ++i)
        rgb[std::size_t(i)] = load_curve_csv(fs::path(dir) / ("rgb_" + std::string(names[i]) + ".csv"));
    std::array<SpectralCurve, 7> spds;
    for (int j = 0; j < 7; ++j)
        spds[std::size_t(j)] = load_curve_csv(fs::path(dir) / ("spd_" + std::to_string(j) + ".csv"));
    MsResponseSet set = synth_ms_responses(rgb, spds);
    set.selected = select_channels(set);
    return SceneRenderer(set, rgb);
}

}  // namespace

int run_scene(const SceneArgs& a)
{
    if (a.size < 32)
        throw ConfigError("scene: --size must be at least 32");
    const SceneRenderer renderer = make_renderer(a.curves);
    const ScenePair scene = make_texture_scene(a.size, a.size, a.seed, renderer);
    fs::create_directories(a.out);
    write_msi(fs::path(a.out) / "ms.msi", scene.ms);
    write_msi(fs::path(a.out) / "rgb.msi", scene.rgb);
    std::printf("wrote %s/{ms,rgb}.msi (%dx%d)\n", a.out.c_str(), a.size, a.size);
    return 0;
}

int run_patches(const PatchesArgs& a)
{
    std::ostringstream os;
    os << std::setprecision(17);
    if (a.kind == "color") {
        if (a.count < 16)
            throw ConfigError("patches: color calibration needs at least 16 patches");
        const PatchTable t = make_color_patches(a.count, a.seed, make_renderer(a.curves));
        for (int c = 0; c < 16; ++c)
            os << "ms" << c << ',';
        os << "r,g,b\n";
        for (int k = 0; k < a.count; ++k) {
            for (int c = 0; c < 16; ++c)
                os << t.ms(k, c) << ',';
            os << t.rgb(k, 0) << ',' << t.rgb(k, 1) << ',' << t.rgb(k, 2) << '\n';
        }
    } else if (a.kind == "noise") {
        if (a.count < 2 || a.channels < 1)
            throw ConfigError("patches: noise needs at least two levels and one channel");
        std::vector<double> levels;
        for (int i = 0; i < a.count; ++i)
            levels.push_back(a.max_level * i / (a.count - 1));
        const auto samples = simulate_noise_patches(NoiseModel::uniform(a.beta1, a.beta2),
                                                    a.channels, levels, a.draws, a.seed);
        os << "channel,mean,variance\n";
        for (const auto& s : samples)
            os << s.channel << ',' << s.mean << ',' << s.variance << '\n';
    } else {
        throw ConfigError("patches: --kind must be 'color' or 'noise'");
    }
    write_file_atomic(a.out, os.str());
    return 0;
}

namespace {

NoiseModel ms_view_noise(const NoiseModel& n)
{
    if (n.entries() != 3)
        return n;
    const MsResponseSet set = default_ms_responses();
    std::vector<int> source;
    for (int idx : set.selected)
        source.push_back(set.provenance[std::size_t(idx)].first);
    return expand_rgb_noise_to_ms(n, source);
}

NoiseModel rgb_view_noise(const NoiseModel& n)
{
    if (n.entries() != 1 && n.entries() != 3)
        throw ConfigError("simulate: a noise model with " + std::to_string(n.entries()) +
                          " entries cannot cover the RGB view (use 1 or 3)");
    return n;
}

}  // namespace

int run_simulate(const SimulateArgs& args)
{
    SimulateArgs a = args;
    NoiseModel noise = NoiseModel::uniform(a.beta1, a.beta2);
    if (!a.manifest.empty()) {
        const json m = read_json(a.manifest);
        check_keys(m, {"scenario", "seed", "shift_px", "noise", "inputs"}, a.manifest);
        try {
            a.scenario = m.at("scenario").get<int>();
            a.seed = m.at("seed").get<std::uint64_t>();
            a.shift_px = m.at("shift_px").get<double>();
            check_keys(m.at("inputs"), {"ms_gt", "rgb_gt"}, a.manifest + " inputs");
            const fs::path base = fs::path(a.manifest).parent_path();
            a.ms_gt = resolve(base, m.at("inputs").at("ms_gt").get<std::string>()).string();
            a.rgb_gt = resolve(base, m.at("inputs").at("rgb_gt").get<std::string>()).string();
        } catch (const json::exception& e) {
            throw ConfigError(a.manifest + ": " + e.what());
        }
        noise = noise_from_json(m.at("noise"), a.manifest + " noise");
    } else if (!a.noise_file.empty()) {
        noise = noise_from_json(read_json(a.noise_file), a.noise_file);
    }
    if (a.ms_gt.empty() || a.rgb_gt.empty())
        throw ConfigError("simulate: --ms-gt and --rgb-gt (or --from-manifest) are required");
    for (const auto& p : {a.ms_gt, a.rgb_gt})
        if (!fs::exists(p))
            throw IoError("simulate: input " + p + " does not exist");

    const SpectralImage ms = read_msi(a.ms_gt);
    const SpectralImage rgb = read_msi(a.rgb_gt);
    const DatasetQuadruplet q = synth_quadruplet(ms, rgb, ms_view_noise(noise),
                                                 rgb_view_noise(noise),
                                                 {a.scenario, a.shift_px, a.seed});
    save_quadruplet(a.out, q);

    json noise_json = noise_to_json(noise);
    noise_json.erase("iso_tag");
    const json manifest = {
        {"scenario", a.scenario},
        {"seed", a.seed},
        {"shift_px", a.shift_px},
        {"noise", noise_json},
        {"inputs",
         {{"ms_gt", fs::absolute(a.ms_gt).lexically_normal().string()},
          {"rgb_gt", fs::absolute(a.rgb_gt).lexically_normal().string()}}},
    };
    write_json(fs::path(a.out) / kManifest, manifest);
    std::printf("wrote quadruplet to %s (scenario %d, MS %dx%d, RGB %dx%d)\n", a.out.c_str(),
                a.scenario, q.ms_mosaic.height(), q.ms_mosaic.width(), q.rgb_mosaic.height(),
                q.rgb_mosaic.width());
    return 0;
}

int run_calibrate_noise(const CalibrateArgs& a)
{
    const auto rows = read_numeric_csv(a.input, 3);
    std::vector<NoiseSample> samples;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const double ch = rows[i][0];
        if (ch < 0 || ch != double(int(ch)))
            throw IntegrityError(a.input + ": data row " + std::to_string(i + 1) +
                                 ": channel must be a non-negative integer");
        samples.push_back({int(ch), rows[i][1], rows[i][2]});
    }
    const NoiseFit fit = calibrate_noise_with_residuals(samples);
    json j = noise_to_json(fit.model);
    j["rms_residual"] = fit.rms_residual;
    write_json(a.out, j);
    for (std::size_t c = 0; c < fit.model.entries(); ++c)
        std::printf("channel %zu beta1 %.9g beta2 %.9g residual %.17g\n", c, fit.model.beta1[c],
                    fit.model.beta2[c], fit.rms_residual[c]);
    return 0;
}

int run_calibrate_color(const CalibrateArgs& a)
{
    const auto rows = read_numeric_csv(a.input, 19);
    Eigen::MatrixXd ms(Eigen::Index(rows.size()), 16), rgb(Eigen::Index(rows.size()), 3);
    for (std::size_t k = 0; k < rows.size(); ++k) {
        for (int c = 0; c < 16; ++c)
            ms(Eigen::Index(k), c) = rows[k][std::size_t(c)];
        for (int c = 0; c < 3; ++c)
            rgb(Eigen::Index(k), c) = rows[k][std::size_t(16 + c)];
    }
    const ColorMatrix cm = fit_color_matrix(ms, rgb);
    save_color_matrix(a.out, cm);
    std::printf("patches %d residual %.17g\n", cm.patch_count, cm.residual);
    return 0;
}

}  // namespace msdc::cli
