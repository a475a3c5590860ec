#include <cstdio>
#include <exception>
#include <functional>

#include <omp.h>

#include <CLI11.hpp>

#include "commands.hpp"
#include "msdc/error.hpp"
#include "msdc/parallel.hpp"

using namespace msdc::cli;

int main(int argc, char** argv)
{
    CLI::App app{"Multispectral demosaicing with RGB guidance"};
    app.require_subcommand(1);
    std::function<int()> action;

    SceneArgs scene;
    auto* sc = app.add_subcommand("scene", "Render an aligned synthetic MS/RGB ground-truth pair");
    sc->add_option("--out", scene.out, "Output directory (ms.msi, rgb.msi)")->required();
    sc->add_option("--size", scene.size, "Side length in pixels");
    sc->add_option("--seed", scene.seed, "Scene seed");
    sc->add_option("--curves", scene.curves, "Directory of response/SPD CSV curves");
    sc->callback([&] { action = [&] { return run_scene(scene); }; });

    PatchesArgs patches;
    auto* pa = app.add_subcommand("patches", "Write synthetic calibration patch statistics as CSV");
    pa->add_option("--kind", patches.kind, "color or noise")
        ->required()
        ->check(CLI::IsMember({"color", "noise"}));
    pa->add_option("--out", patches.out, "Output CSV")->required();
    pa->add_option("--count", patches.count, "Color patches, or noise intensity levels");
    pa->add_option("--channels", patches.channels, "Noise: channel count");
    pa->add_option("--draws", patches.draws, "Noise: draws per patch");
    pa->add_option("--beta1", patches.beta1, "Noise: signal-dependent variance slope");
    pa->add_option("--beta2", patches.beta2, "Noise: signal-independent variance");
    pa->add_option("--max-level", patches.max_level, "Noise: brightest patch level");
    pa->add_option("--seed", patches.seed, "Seed");
    pa->add_option("--curves", patches.curves, "Color: directory of response/SPD CSV curves");
    pa->callback([&] { action = [&] { return run_patches(patches); }; });

    SimulateArgs sim;
    auto* si = app.add_subcommand("simulate", "Synthesize a dataset quadruplet from ground truths");
    si->add_option("--ms-gt", sim.ms_gt, "16-channel ground-truth MSI");
    si->add_option("--rgb-gt", sim.rgb_gt, "3-channel ground-truth MSI");
    si->add_option("--out", sim.out, "Output directory")->required();
    si->add_option("--scenario", sim.scenario, "1: same resolution, 2: MS at 1/4")
        ->check(CLI::IsMember({1, 2}));
    si->add_option("--seed", sim.seed, "Noise seed");
    si->add_option("--shift", sim.shift_px, "Horizontal RGB shift in pixels");
    si->add_option("--beta1", sim.beta1, "Noise variance slope (all channels)");
    si->add_option("--beta2", sim.beta2, "Noise variance floor (all channels)");
    auto* noise_opt = si->add_option("--noise", sim.noise_file, "Noise JSON from calibrate-noise");
    si->add_option("--from-manifest", sim.manifest, "Replay a manifest.json")
        ->excludes(noise_opt);
    si->callback([&] { action = [&] { return run_simulate(sim); }; });

    CalibrateArgs cal_noise;
    auto* cn = app.add_subcommand("calibrate-noise", "Fit variance = beta1 * I + beta2 per channel");
    cn->add_option("--samples", cal_noise.input, "CSV: channel,mean,variance")->required();
    cn->add_option("--out", cal_noise.out, "Output noise.json")->required();
    cn->callback([&] { action = [&] { return run_calibrate_noise(cal_noise); }; });

    CalibrateArgs cal_color;
    auto* cc = app.add_subcommand("calibrate-color", "Fit the 16x3 MS-to-RGB color matrix");
    cc->add_option("--patches", cal_color.input, "CSV: 16 MS means then R,G,B")->required();
    cc->add_option("--out", cal_color.out, "Output color_matrix.json")->required();
    cc->callback([&] { action = [&] { return run_calibrate_color(cal_color); }; });

    TrainArgs train;
    auto* tr = app.add_subcommand("train", "Run both training stages");
    tr->add_option("--config", train.config, "Run configuration JSON")->required();
    tr->add_option("--out", train.out, "Run directory")->required();
    tr->callback([&] { action = [&] { return run_train(train); }; });

    InferArgs infer;
    auto* in = app.add_subcommand("infer", "Reconstruct the MS image of a quadruplet");
    in->add_option("--run", infer.run, "Run directory (latest checkpoint)");
    in->add_option("--checkpoint", infer.checkpoint, "Explicit checkpoint");
    in->add_option("--color-matrix", infer.color_matrix, "Color matrix JSON");
    in->add_option("--data", infer.data, "Quadruplet directory")->required();
    in->add_option("--out", infer.out, "Output MSI")->required();
    in->add_option("--preview", infer.preview, "sRGB PNG preview (default: <out>.png)");
    in->callback([&] { action = [&] { return run_infer(infer); }; });

    EvalArgs eval;
    auto* ev = app.add_subcommand("eval", "PSNR / SSIM / SAM of a prediction");
    ev->add_option("--pred", eval.pred, "Predicted MSI")->required();
    ev->add_option("--gt", eval.gt, "Reference MSI");
    ev->add_option("--data", eval.data, "Quadruplet directory (uses its MS target)");
    ev->add_option("--out", eval.out, "Metrics JSON");
    ev->callback([&] { action = [&] { return run_eval(eval); }; });

    FlowArgs flow;
    auto* fl = app.add_subcommand("flow", "Estimate the disparity between two views");
    fl->add_option("--src", flow.src, "Source MSI (3 or 16 channels)")->required();
    fl->add_option("--dst", flow.dst, "Destination RGB MSI")->required();
    fl->add_option("--color-matrix", flow.color_matrix, "Needed for a 16-channel source");
    fl->add_option("--out", flow.out, "Flow MSI (u, v)")->required();
    fl->add_option("--png", flow.png, "Color-wheel PNG (default: <out>.png)");
    fl->callback([&] { action = [&] { return run_flow(flow); }; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    omp_set_num_threads(msdc::worker_threads());
    try {
        return action();
    } catch (const msdc::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return msdc::exit_code_for(e.kind());
    } catch (const std::filesystem::filesystem_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 4;
    }
}
