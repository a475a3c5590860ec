#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace msdc::cli {

struct SceneArgs {
    std::string out, curves;
    int size = 128;
    std::uint64_t seed = 1;
};

struct PatchesArgs {
    std::string kind;  // "color" or "noise"
    std::string out, curves;
    int count = 140;   // color patches, or intensity levels for noise
    int channels = 16;
    int draws = 10000;
    double beta1 = 0.01;
    double beta2 = 1e-4;
    double max_level = 0.05;
    std::uint64_t seed = 1;
};

struct SimulateArgs {
    std::string ms_gt, rgb_gt, out, noise_file, manifest;
    int scenario = 1;
    std::uint64_t seed = 0;
    double shift_px = 0.0;
    double beta1 = 0.0;
    double beta2 = 0.0;
};

struct CalibrateArgs {
    std::string input, out;
};

struct TrainArgs {
    std::string config, out;
};

struct InferArgs {
    std::string run, checkpoint, color_matrix, data, out, preview;
};

struct EvalArgs {
    std::string pred, gt, data, out;
};

struct FlowArgs {
    std::string src, dst, color_matrix, out, png;
};

int run_scene(const SceneArgs& a);
int run_patches(const PatchesArgs& a);
int run_simulate(const SimulateArgs& a);
int run_calibrate_noise(const CalibrateArgs& a);
int run_calibrate_color(const CalibrateArgs& a);
int run_train(const TrainArgs& a);
int run_infer(const InferArgs& a);
int run_eval(const EvalArgs& a);
int run_flow(const FlowArgs& a);

}  // namespace msdc::cli
