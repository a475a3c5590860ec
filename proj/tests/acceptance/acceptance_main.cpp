// Acceptance gate: runs every criterion and prints one PASS/FAIL line each.
// Usage: acceptance [criterion numbers...]   (default: all)

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <string>

#include "msdc/color.hpp"
#include "msdc/flow.hpp"
#include "msdc/metrics.hpp"
#include "msdc/msi_io.hpp"
#include "msdc/pipeline/benchmark.hpp"
#include "msdc/pipeline/trainer.hpp"
#include "msdc/resample.hpp"
#include "msdc/scene.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"
#include "support/suites.hpp"

using namespace msdc;
using namespace msdc::pipeline;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

Outcome gradient_checks()
{
    const auto t0 = Clock::now();
    const auto cases = msdc::testing::gradient_suite(1);
    const double elapsed = seconds_since(t0);
    bool ok = elapsed < 60.0;
    std::string worst;
    double worst_err = 0.0;
    for (const auto& c : cases) {
        std::printf("  gradient %-28s rel err %.3e\n", c.name.c_str(), c.error);
        ok = ok && c.error < 1e-3;
        if (c.error >= worst_err) {
            worst_err = c.error;
            worst = c.name;
        }
    }
    return {ok, std::to_string(cases.size()) + " checks, worst " + worst + " " +
                    fmt("%.2e", worst_err) + " (< 1e-3), " + fmt("%.1f", elapsed) + " s (< 60 s)"};
}

Outcome deformable_degeneration()
{
    const double err = msdc::testing::deformable_degeneration_error(20, 1);
    return {err <= 1e-6, "max-abs " + fmt("%.2e", err) + " over 20 fixtures (<= 1e-6)"};
}

Outcome noise_calibration()
{
    const auto truth = NoiseModel::uniform(0.01, 1e-4);
    std::vector<double> levels;
    for (int k = 0; k < 64; ++k)
        levels.push_back(0.05 * k / 63.0);
    const int channels = 16;
    const auto fit = calibrate_noise(simulate_noise_patches(truth, channels, levels, 10000, 11));
    double e1 = 0.0, e2 = 0.0;
    for (int c = 0; c < channels; ++c) {
        e1 = std::max(e1, std::abs(fit.beta1[std::size_t(c)] - 0.01) / 0.01);
        e2 = std::max(e2, std::abs(fit.beta2[std::size_t(c)] - 1e-4) / 1e-4);
    }
    return {e1 <= 0.05 && e2 <= 0.05,
            "worst relative error over 16 channels: beta1 " + fmt("%.2f%%", 100 * e1) +
                ", beta2 " + fmt("%.2f%%", 100 * e2) + " (<= 5%)"};
}

Outcome color_matrix()
{
    Rng rng(21);
    Eigen::MatrixXd a(140, 16);
    Eigen::Matrix<double, 16, 3> truth;
    for (int i = 0; i < a.size(); ++i)
        a.data()[i] = rng.uniform(0.0, 1.0);
    for (int i = 0; i < truth.size(); ++i)
        truth.data()[i] = rng.uniform(-1.0, 1.0);
    const ColorMatrix cm = fit_color_matrix(a, a * truth);
    const double err = (cm.entries - truth).cwiseAbs().maxCoeff();
    return {err <= 1e-6, "max-abs " + fmt("%.2e", err) + " (<= 1e-6)"};
}

Outcome flow_recovery()
{
    const int margin = 16;
    double worst = 0.0;
    std::string parts;
    for (const double shift : {3.0, 1.5})
        for (std::uint64_t seed = 1; seed <= 3; ++seed) {
            const auto src = msdc::testing::textured_image(96, 96, 3, seed + (shift < 2 ? 3 : 0));
            const auto f = estimate_flow(src, translate_horizontal(src, shift));
            double mae = 0.0;
            int n = 0;
            for (int y = margin; y < f.height - margin; ++y)
                for (int x = margin; x < f.width - margin; ++x, ++n)
                    mae += std::abs(f.u_at(y, x) - shift);
            mae /= n;
            worst = std::max(worst, mae);
            parts += (parts.empty() ? "" : ", ") + fmt("%.1f px", shift) + fmt(" %.3f", mae);
        }
    return {worst <= 0.3, "interior MAE " + parts + " (<= 0.3)"};
}

Outcome table_direction()
{
    const auto t0 = Clock::now();
    const ToyBenchmark bench = make_toy_benchmark({});
    ModelConfig mc;
    TrainConfig tc;  // 2000 iterations per stage
    ModelBundle<float> base(mc);
    base.color_matrix = bench.color_matrix;
    train_stage1(base, bench.train, tc);
    const fs::path ckpt = fs::temp_directory_path() / "msdc_acceptance_stage1.ckpt";
    save_model(ckpt, base, 1, tc.iterations);
    std::printf("  stage 1 trained in %.0f s; interpolation baseline %.3f dB\n", seconds_since(t0),
                evaluate_baseline(bench.test).psnr);

    std::map<Guidance, double> psnr;
    for (const Guidance g : {Guidance::none, Guidance::image_unaligned, Guidance::image_warped,
                             Guidance::sal}) {
        ModelConfig c = mc;
        c.guidance = g;
        ModelBundle<float> m(c);
        load_model_into(ckpt, m);
        m.color_matrix = bench.color_matrix;
        TrainConfig t2 = tc;
        t2.stage = 2;
        const auto logs = train_stage2(m, bench.train, t2);
        const MetricsReport r = evaluate_model(m, bench.test);
        psnr[g] = r.psnr;
        std::printf("  %-16s test PSNR %.3f dB, SAM %.3f deg, final loss %.3e (%.0f s)\n",
                    to_string(g).c_str(), r.psnr, r.sam, logs.back().loss, seconds_since(t0));
        std::fflush(stdout);
    }
    fs::remove(ckpt);
    const double elapsed = seconds_since(t0);
    const double none = psnr[Guidance::none], unal = psnr[Guidance::image_unaligned],
                 warp = psnr[Guidance::image_warped], sal = psnr[Guidance::sal];
    const bool order = none <= unal && unal <= warp && warp <= sal;
    const bool gap = sal - none >= 0.3;
    return {order && gap && elapsed <= 1800.0,
            "PSNR none " + fmt("%.3f", none) + " / unaligned " + fmt("%.3f", unal) + " / warped " +
                fmt("%.3f", warp) + " / SAL " + fmt("%.3f", sal) + (order ? " (ordered)" : " (NOT ordered)") +
                ", SAL - none " + fmt("%.3f", sal - none) + " dB (>= 0.3), " +
                fmt("%.0f", elapsed) + " s (<= 1800 s)"};
}

Outcome scenario2_direction()
{
    const auto t0 = Clock::now();
    ToyBenchmarkConfig bc;
    bc.scenario = 2;
    const ToyBenchmark bench = make_toy_benchmark(bc);
    ModelConfig mc;
    mc.scenario = 2;
    ModelBundle<float> m(mc);
    m.color_matrix = bench.color_matrix;
    TrainConfig tc;
    tc.scenario = 2;
    train_stage1(m, bench.train, tc);
    tc.stage = 2;
    train_stage2(m, bench.train, tc);
    const MetricsReport model = evaluate_model(m, bench.test);
    const MetricsReport baseline = evaluate_baseline(bench.test);
    const double gain = model.psnr - baseline.psnr;
    return {gain >= 1.0 && model.sam < baseline.sam,
            "PSNR " + fmt("%.3f", model.psnr) + " vs baseline " + fmt("%.3f", baseline.psnr) +
                " (gain " + fmt("%.3f", gain) + " dB, >= 1.0), SAM " + fmt("%.3f", model.sam) +
                " vs " + fmt("%.3f", baseline.sam) + ", " + fmt("%.0f", seconds_since(t0)) + " s"};
}

int shell(const fs::path& cwd, const std::string& args)
{
    const std::string cmd = "cd '" + cwd.string() + "' && '" MSDC_CLI_PATH "' " + args +
                            " >> '" + (cwd / "cli.log").string() + "' 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Outcome cli_determinism()
{
    const fs::path root = fs::temp_directory_path() / ("msdc_acceptance_cli_" + std::to_string(::getpid()));
    fs::remove_all(root);
    const char* steps[] = {
        "scene --out gt --size 64 --seed 3",
        "simulate --ms-gt gt/ms.msi --rgb-gt gt/rgb.msi --out q --scenario 1 --seed 7 --shift 4 "
        "--beta1 5e-4 --beta2 5e-6",
        "patches --kind color --out color.csv --seed 2",
        "calibrate-color --patches color.csv --out cm.json",
        "train --config train.json --out run",
        "infer --run run --data q --out pred.msi",
        "eval --pred pred.msi --data q --out metrics.json",
    };
    for (const char* name : {"a", "b"}) {
        const fs::path dir = root / name;
        fs::create_directories(dir);
        std::ofstream(dir / "train.json") << R"({
  "train_data": ["q"], "color_matrix": "cm.json",
  "model": {"width": 8, "blocks": 1, "levels": 3, "seed": 9},
  "stage1": {"iterations": 50, "batch_size": 2, "patch_size": 32},
  "stage2": {"iterations": 50, "batch_size": 2, "patch_size": 32},
  "seed": 5
})";
        for (const char* s : steps)
            if (const int code = shell(dir, s); code != 0) {
                fs::remove_all(root);
                return {false, std::string("'msdc ") + s + "' exited with " + std::to_string(code)};
            }
    }
    const char* compared[] = {"q/ms_mosaic.msi", "q/rgb_mosaic.msi", "q/ms_gt.msi",
                              "q/rgb_gt.msi", "run/checkpoints/stage2_iter50.ckpt",
                              "run/logs/metrics.jsonl", "pred.msi", "metrics.json"};
    std::string mismatched;
    for (const char* f : compared)
        if (read_file(root / "a" / f) != read_file(root / "b" / f))
            mismatched += std::string(" ") + f;
    const std::string metrics = read_file(root / "a" / "metrics.json");
    fs::remove_all(root);
    if (!mismatched.empty())
        return {false, "differs:" + mismatched};
    const auto r = MetricsReport::from_json(metrics);
    const bool finite = std::isfinite(r.psnr) && std::isfinite(r.sam) && std::isfinite(r.ssim);
    return {finite, std::to_string(std::size(compared)) +
                        " artifacts byte-identical across two runs; PSNR " + fmt("%.3f", r.psnr)};
}

Outcome metric_oracles()
{
    double worst = 0.0;
    for (std::uint64_t s = 0; s < 10; ++s) {
        const auto a = msdc::testing::random_image(24, 20, 16, 100 + s);
        const auto b = msdc::testing::random_image(24, 20, 16, 200 + s);
        worst = std::max({worst, std::abs(psnr(a, b) - msdc::testing::oracle_psnr(a, b)),
                          std::abs(ssim(a, b) - msdc::testing::oracle_ssim(a, b)),
                          std::abs(sam(a, b) - msdc::testing::oracle_sam(a, b))});
    }
    return {worst <= 1e-6, "max deviation " + fmt("%.2e", worst) + " over 10 pairs (<= 1e-6)"};
}

}  // namespace

int main(int argc, char** argv)
{
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
        {"gradient suite", gradient_checks},
        {"deformable degeneration", deformable_degeneration},
        {"noise calibration oracle", noise_calibration},
        {"color-matrix oracle", color_matrix},
        {"flow recovery", flow_recovery},
        {"guidance ordering on the toy benchmark", table_direction},
        {"4x scenario beats interpolation", scenario2_direction},
        {"CLI determinism", cli_determinism},
        {"metric oracles", metric_oracles},
    };
    std::set<int> selected;
    for (int i = 1; i < argc; ++i)
        selected.insert(std::atoi(argv[i]));

    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int id = int(i) + 1;
        if (!selected.empty() && !selected.count(id))
            continue;
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += !o.pass;
        std::printf("criterion %d %s: %s: %s\n", id, o.pass ? "PASS" : "FAIL", criteria[i].first,
                    o.detail.c_str());
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
