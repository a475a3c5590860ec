#include "msdc/rng.hpp"

#include <cmath>
#include <numbers>

namespace msdc {

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key) noexcept
{
    constexpr std::uint32_t kMul0 = 0xD2511F53u;
    constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
    constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
    constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
    for (int round = 0; round < 10; ++round) {
        const std::uint64_t p0 = std::uint64_t(kMul0) * ctr[0];
        const std::uint64_t p1 = std::uint64_t(kMul1) * ctr[2];
        ctr = {std::uint32_t(p1 >> 32) ^ ctr[1] ^ key[0], std::uint32_t(p1),
               std::uint32_t(p0 >> 32) ^ ctr[3] ^ key[1], std::uint32_t(p0)};
        key[0] += kWeyl0;
        key[1] += kWeyl1;
    }
    return ctr;
}

double philox_normal(std::uint64_t seed, std::uint32_t stream, std::uint64_t index) noexcept
{
    const auto r = philox4x32({std::uint32_t(index), std::uint32_t(index >> 32), stream, 0u},
                              {std::uint32_t(seed), std::uint32_t(seed >> 32)});
    const std::uint64_t a = (std::uint64_t(r[0]) << 21) ^ (std::uint64_t(r[1]) >> 11);
    const std::uint64_t b = (std::uint64_t(r[2]) << 21) ^ (std::uint64_t(r[3]) >> 11);
    const double u1 = (double(a & ((1ull << 53) - 1)) + 1.0) * 0x1.0p-53;  // (0, 1]
    const double u2 = double(b & ((1ull << 53) - 1)) * 0x1.0p-53;          // [0, 1)
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double Rng::normal()
{
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u1;
    do {
        u1 = uniform();
    } while (u1 <= 0.0);
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * std::numbers::pi * u2);
    has_spare_ = true;
    return r * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace msdc
