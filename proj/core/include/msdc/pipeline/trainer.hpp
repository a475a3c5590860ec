#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "msdc/pipeline/model.hpp"

namespace msdc::pipeline {

struct TrainConfig {
    int stage = 1;
    int iterations = 2000;
    int batch_size = 4;
    int patch_size = 64;  // full-resolution side length
    double lr = 1e-3;
    std::uint64_t seed = 1;
    int scenario = 1;

    /// Patch divisible by 4 (MSFA tile) and 2^L; in scenario 2 the quarter-size
    /// MS patch must satisfy the same. Throws ConfigError otherwise.
    void validate(int levels) const;
};

struct IterationLog {
    int iter = 0;
    double loss = 0.0;      // stage 1: L_MS + L_RGB, stage 2: L_fusion
    double ms_loss = 0.0;   // stage 1 only
    double rgb_loss = 0.0;  // stage 1 only
};

using TrainCallback = std::function<void(const IterationLog&)>;

/// Trains D_MS (plus the upsampler in scenario 2) and D_RGB with Adam on their
/// own L2 losses. Marks the model as stage-1 trained.
std::vector<IterationLog> train_stage1(ModelBundle<float>& m,
                                       const std::vector<DatasetQuadruplet>& data,
                                       const TrainConfig& cfg, const TrainCallback& on_iter = {});

/// Trains the SAL kernels and F with the demosaicing side frozen. Demosaiced
/// views, features and flow are computed once per sample and cached.
std::vector<IterationLog> train_stage2(ModelBundle<float>& m,
                                       const std::vector<DatasetQuadruplet>& data,
                                       const TrainConfig& cfg, const TrainCallback& on_iter = {});

}  // namespace msdc::pipeline
