#include "msdc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "msdc/error.hpp"

namespace msdc {

namespace {

void require_same_shape(const SpectralImage& a, const SpectralImage& b, const char* op)
{
    if (!a.same_shape(b))
        throw DimensionError(std::string(op) + ": shape mismatch " + a.shape_string() + " vs " +
                             b.shape_string());
    if (a.empty())
        throw DimensionError(std::string(op) + ": empty image");
}

double psnr_from_mse(double mse)
{
    if (mse == 0.0)
        return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(1.0 / mse);
}

constexpr int kSsimWindow = 11;
constexpr double kSsimSigma = 1.5;

std::vector<double> gaussian_window()
{
    std::vector<double> g(kSsimWindow);
    const int r = kSsimWindow / 2;
    double sum = 0.0;
    for (int i = 0; i < kSsimWindow; ++i) {
        const double d = i - r;
        g[std::size_t(i)] = std::exp(-d * d / (2.0 * kSsimSigma * kSsimSigma));
        sum += g[std::size_t(i)];
    }
    for (auto& v : g)
        v /= sum;
    return g;
}

// "Valid" separable filtering of one channel plane.
std::vector<double> filter_valid(const std::vector<double>& src, int h, int w,
                                 const std::vector<double>& g)
{
    const int n = int(g.size());
    const int ow = w - n + 1;
    const int oh = h - n + 1;
    std::vector<double> tmp(std::size_t(h) * std::size_t(ow));
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < ow; ++x) {
            double acc = 0.0;
            for (int k = 0; k < n; ++k)
                acc += g[std::size_t(k)] * src[std::size_t(y * w + x + k)];
            tmp[std::size_t(y * ow + x)] = acc;
        }
    std::vector<double> out(std::size_t(oh) * std::size_t(ow));
    for (int y = 0; y < oh; ++y)
        for (int x = 0; x < ow; ++x) {
            double acc = 0.0;
            for (int k = 0; k < n; ++k)
                acc += g[std::size_t(k)] * tmp[std::size_t((y + k) * ow + x)];
            out[std::size_t(y * ow + x)] = acc;
        }
    return out;
}

}  // namespace

double psnr(const SpectralImage& a, const SpectralImage& b)
{
    require_same_shape(a, b, "psnr");
    const auto da = a.data();
    const auto db = b.data();
    double sum = 0.0;
    for (std::size_t i = 0; i < da.size(); ++i) {
        const double d = double(da[i]) - double(db[i]);
        sum += d * d;
    }
    return psnr_from_mse(sum / double(da.size()));
}

std::vector<double> psnr_per_channel(const SpectralImage& a, const SpectralImage& b)
{
    require_same_shape(a, b, "psnr_per_channel");
    const int ch = a.channels();
    std::vector<double> sums(static_cast<std::size_t>(ch), 0.0);
    const auto da = a.data();
    const auto db = b.data();
    for (std::size_t i = 0; i < da.size(); ++i) {
        const double d = double(da[i]) - double(db[i]);
        sums[i % std::size_t(ch)] += d * d;
    }
    std::vector<double> out;
    for (double s : sums)
        out.push_back(psnr_from_mse(s / double(a.pixel_count())));
    return out;
}

double ssim(const SpectralImage& a, const SpectralImage& b)
{
    require_same_shape(a, b, "ssim");
    if (a.height() < kSsimWindow || a.width() < kSsimWindow)
        throw DimensionError("ssim: image " + a.shape_string() + " smaller than the 11x11 window");
    constexpr double c1 = 0.01 * 0.01;
    constexpr double c2 = 0.03 * 0.03;
    const auto g = gaussian_window();
    const int h = a.height();
    const int w = a.width();
    const std::size_t n = a.pixel_count();

    double total = 0.0;
    std::vector<double> x(n), y(n), xx(n), yy(n), xy(n);
    for (int c = 0; c < a.channels(); ++c) {
        for (std::size_t i = 0; i < n; ++i) {
            const double va = a.data()[i * std::size_t(a.channels()) + std::size_t(c)];
            const double vb = b.data()[i * std::size_t(b.channels()) + std::size_t(c)];
            x[i] = va;
            y[i] = vb;
            xx[i] = va * va;
            yy[i] = vb * vb;
            xy[i] = va * vb;
        }
        const auto mx = filter_valid(x, h, w, g);
        const auto my = filter_valid(y, h, w, g);
        const auto sxx = filter_valid(xx, h, w, g);
        const auto syy = filter_valid(yy, h, w, g);
        const auto sxy = filter_valid(xy, h, w, g);
        double sum = 0.0;
        for (std::size_t i = 0; i < mx.size(); ++i) {
            const double vx = sxx[i] - mx[i] * mx[i];
            const double vy = syy[i] - my[i] * my[i];
            const double cxy = sxy[i] - mx[i] * my[i];
            sum += ((2.0 * mx[i] * my[i] + c1) * (2.0 * cxy + c2)) /
                   ((mx[i] * mx[i] + my[i] * my[i] + c1) * (vx + vy + c2));
        }
        total += sum / double(mx.size());
    }
    return total / double(a.channels());
}

double sam(const SpectralImage& a, const SpectralImage& b)
{
    require_same_shape(a, b, "sam");
    if (a.channels() < 2)
        throw DimensionError("sam: needs at least 2 channels");
    const int ch = a.channels();
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t p = 0; p < a.pixel_count(); ++p) {
        const float* pa = a.data().data() + p * std::size_t(ch);
        const float* pb = b.data().data() + p * std::size_t(ch);
        double na = 0.0, nb = 0.0;
        for (int c = 0; c < ch; ++c) {
            na += double(pa[c]) * pa[c];
            nb += double(pb[c]) * pb[c];
        }
        na = std::sqrt(na);
        nb = std::sqrt(nb);
        if (na < 1e-8 || nb < 1e-8)
            continue;
        // 2 atan2(|a^ - b^|, |a^ + b^|) equals acos(a^ . b^) but stays exact for
        // (nearly) parallel spectra, where acos loses half the digits.
        double diff = 0.0, plus = 0.0;
        for (int c = 0; c < ch; ++c) {
            const double ua = pa[c] / na, ub = pb[c] / nb;
            diff += (ua - ub) * (ua - ub);
            plus += (ua + ub) * (ua + ub);
        }
        sum += 2.0 * std::atan2(std::sqrt(diff), std::sqrt(plus));
        ++count;
    }
    if (count == 0)
        return 0.0;
    return sum / double(count) * 180.0 / std::numbers::pi;
}

}  // namespace msdc
