#include "msdc/resample.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "msdc/error.hpp"

namespace msdc {

SpectralImage box_downsample(const SpectralImage& img, int factor)
{
    if (factor <= 0)
        throw DimensionError("box_downsample: factor must be positive");
    if (img.height() % factor != 0 || img.width() % factor != 0)
        throw DimensionError("box_downsample: " + img.shape_string() +
                             " not divisible by " + std::to_string(factor));
    const int oh = img.height() / factor;
    const int ow = img.width() / factor;
    const int ch = img.channels();
    const double norm = 1.0 / double(factor * factor);
    SpectralImage out(oh, ow, ch);
    std::vector<double> acc(static_cast<std::size_t>(ch));
    for (int y = 0; y < oh; ++y)
        for (int x = 0; x < ow; ++x) {
            std::fill(acc.begin(), acc.end(), 0.0);
            for (int dy = 0; dy < factor; ++dy)
                for (int dx = 0; dx < factor; ++dx) {
                    const float* p = img.pixel(y * factor + dy, x * factor + dx);
                    for (int c = 0; c < ch; ++c)
                        acc[std::size_t(c)] += p[c];
                }
            float* q = out.pixel(y, x);
            for (int c = 0; c < ch; ++c)
                q[c] = float(acc[std::size_t(c)] * norm);
        }
    return out;
}

namespace {

double keys(double t)
{
    constexpr double a = -0.5;
    t = std::abs(t);
    if (t <= 1.0)
        return ((a + 2.0) * t - (a + 3.0)) * t * t + 1.0;
    if (t < 2.0)
        return ((a * t - 5.0 * a) * t + 8.0 * a) * t - 4.0 * a;
    return 0.0;
}

struct Taps {
    std::array<int, 4> index;
    std::array<double, 4> weight;
};

std::vector<Taps> cubic_taps(int in_size, int factor)
{
    std::vector<Taps> taps(std::size_t(in_size * factor));
    for (int o = 0; o < in_size * factor; ++o) {
        const double src = (o + 0.5) / factor - 0.5;
        const int base = int(std::floor(src));
        Taps& t = taps[std::size_t(o)];
        for (int k = 0; k < 4; ++k) {
            const int i = base - 1 + k;
            t.index[std::size_t(k)] = std::clamp(i, 0, in_size - 1);
            t.weight[std::size_t(k)] = keys(src - i);
        }
    }
    return taps;
}

}  // namespace

SpectralImage bicubic_upsample(const SpectralImage& img, int factor)
{
    if (factor <= 0)
        throw DimensionError("bicubic_upsample: factor must be positive");
    const int h = img.height();
    const int w = img.width();
    const int ch = img.channels();
    const auto ty = cubic_taps(h, factor);
    const auto tx = cubic_taps(w, factor);

    // Horizontal pass into double precision, then vertical.
    std::vector<double> rows(std::size_t(h) * std::size_t(w * factor) * std::size_t(ch), 0.0);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w * factor; ++x) {
            const Taps& t = tx[std::size_t(x)];
            double* dst = &rows[(std::size_t(y) * std::size_t(w * factor) + std::size_t(x)) *
                                std::size_t(ch)];
            for (int k = 0; k < 4; ++k) {
                const float* src = img.pixel(y, t.index[std::size_t(k)]);
                for (int c = 0; c < ch; ++c)
                    dst[c] += t.weight[std::size_t(k)] * src[c];
            }
        }
    SpectralImage out(h * factor, w * factor, ch);
    for (int y = 0; y < h * factor; ++y) {
        const Taps& t = ty[std::size_t(y)];
        for (int x = 0; x < w * factor; ++x) {
            float* dst = out.pixel(y, x);
            for (int c = 0; c < ch; ++c) {
                double acc = 0.0;
                for (int k = 0; k < 4; ++k)
                    acc += t.weight[std::size_t(k)] *
                           rows[(std::size_t(t.index[std::size_t(k)]) * std::size_t(w * factor) +
                                 std::size_t(x)) *
                                    std::size_t(ch) +
                                std::size_t(c)];
                dst[c] = float(acc);
            }
        }
    }
    return out;
}

SpectralImage translate_horizontal(const SpectralImage& img, double shift)
{
    const int w = img.width();
    const int ch = img.channels();
    SpectralImage out(img.height(), w, ch);
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < w; ++x) {
            const double sx = std::clamp(x - shift, 0.0, double(w - 1));
            const int x0 = std::min(int(std::floor(sx)), w - 1);
            const int x1 = std::min(x0 + 1, w - 1);
            const double a = sx - x0;
            const float* p0 = img.pixel(y, x0);
            const float* p1 = img.pixel(y, x1);
            float* q = out.pixel(y, x);
            for (int c = 0; c < ch; ++c)
                q[c] = float((1.0 - a) * p0[c] + a * p1[c]);
        }
    return out;
}

}  // namespace msdc
