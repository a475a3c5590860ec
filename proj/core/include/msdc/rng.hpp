#pragma once

#include <array>
#include <cstdint>
#include <random>

namespace msdc {

/// Philox4x32-10 counter-based generator. Output depends only on (key, counter),
/// so per-pixel draws are reproducible regardless of evaluation order.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key) noexcept;

/// Standard normal draw for (seed, stream, index) via Box-Muller on a Philox block.
double philox_normal(std::uint64_t seed, std::uint32_t stream, std::uint64_t index) noexcept;

/// Sequential generator with platform-independent real-valued draws
/// (std distributions are implementation-defined).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }
    /// Uniform in [0, 1).
    double uniform() { return double(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    /// Uniform integer in [0, n).
    int below(int n) { return int(uniform() * n); }
    double normal();

private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace msdc
