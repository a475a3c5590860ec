#pragma once

#include <cstdint>
#include <vector>

#include "msdc/pipeline/evaluate.hpp"
#include "msdc/pipeline/model.hpp"

namespace msdc::pipeline {

/// Moderate-gain heteroscedastic noise (sigma ~ 1.6% at mid-gray).
NoiseModel iso400_like_noise();

/// Seeded shifted-texture benchmark: procedural scenes whose RGB view is
/// translated horizontally, noised and mosaicked.
struct ToyBenchmarkConfig {
    int scenes = 8;
    int train_scenes = 6;  // the remainder is held out for testing
    int size = 128;        // full-resolution side length
    double shift_px = 4.0;
    int scenario = 1;
    std::uint64_t seed = 2024;
    int color_patches = 140;
};

struct ToyBenchmark {
    std::vector<DatasetQuadruplet> train, test;
    ColorMatrix color_matrix;  // fitted on rendered color-chart patches
};

ToyBenchmark make_toy_benchmark(const ToyBenchmarkConfig& cfg);

/// Per-metric mean over samples of evaluate(reconstruct(q), q.ms_target).
MetricsReport evaluate_model(const ModelBundle<float>& m, const std::vector<DatasetQuadruplet>& data);

/// Same for the interpolation baseline.
MetricsReport evaluate_baseline(const std::vector<DatasetQuadruplet>& data);

}  // namespace msdc::pipeline
