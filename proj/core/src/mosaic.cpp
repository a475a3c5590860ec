#include "msdc/mosaic.hpp"

#include <cmath>
#include <vector>

#include "msdc/error.hpp"

namespace msdc {

MosaicImage apply_mosaic(const SpectralImage& img, const MosaicPattern& pattern)
{
    pattern.validate();
    if (img.channels() != pattern.channel_count)
        throw ConfigError("apply_mosaic: image has " + std::to_string(img.channels()) +
                          " channels, pattern '" + pattern.name + "' expects " +
                          std::to_string(pattern.channel_count));
    MosaicImage out{SpectralImage(img.height(), img.width(), 1), pattern};
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x)
            out.plane.at(y, x, 0) = img.at(y, x, pattern.channel_at(y, x));
    return out;
}

namespace {

// Tent of half-width `period`: weights 1 - |d| / period for |d| < period.
std::vector<double> tent(int period)
{
    std::vector<double> k(static_cast<std::size_t>(2 * period - 1));
    for (int d = -(period - 1); d <= period - 1; ++d)
        k[std::size_t(d + period - 1)] = 1.0 - std::abs(d) / double(period);
    return k;
}

// Separable zero-padded correlation of an H x W plane.
std::vector<double> filter_separable(const std::vector<double>& src, int h, int w,
                                     const std::vector<double>& ky,
                                     const std::vector<double>& kx)
{
    const int ry = int(ky.size()) / 2;
    const int rx = int(kx.size()) / 2;
    std::vector<double> tmp(src.size(), 0.0);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int d = -rx; d <= rx; ++d) {
                const int xx = x + d;
                if (xx >= 0 && xx < w)
                    acc += kx[std::size_t(d + rx)] * src[std::size_t(y * w + xx)];
            }
            tmp[std::size_t(y * w + x)] = acc;
        }
    std::vector<double> out(src.size(), 0.0);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int d = -ry; d <= ry; ++d) {
                const int yy = y + d;
                if (yy >= 0 && yy < h)
                    acc += ky[std::size_t(d + ry)] * tmp[std::size_t(yy * w + x)];
            }
            out[std::size_t(y * w + x)] = acc;
        }
    return out;
}

}  // namespace

SpectralImage demosaic_interp(const MosaicImage& mosaic)
{
    const MosaicPattern& pat = mosaic.pattern;
    pat.validate();
    const int h = mosaic.height();
    const int w = mosaic.width();
    const auto ky = tent(pat.tile_h);
    const auto kx = tent(pat.tile_w);

    SpectralImage out(h, w, pat.channel_count);
    std::vector<double> values(std::size_t(h) * std::size_t(w));
    std::vector<double> mask(values.size());
    for (int c = 0; c < pat.channel_count; ++c) {
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                const bool hit = pat.channel_at(y, x) == c;
                const std::size_t i = std::size_t(y * w + x);
                mask[i] = hit ? 1.0 : 0.0;
                values[i] = hit ? double(mosaic.plane.at(y, x, 0)) : 0.0;
            }
        const auto num = filter_separable(values, h, w, ky, kx);
        const auto den = filter_separable(mask, h, w, ky, kx);
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                const std::size_t i = std::size_t(y * w + x);
                float v;
                if (mask[i] > 0.0)
                    v = mosaic.plane.at(y, x, 0);
                else if (den[i] > 1e-12)
                    v = float(num[i] / den[i]);
                else
                    v = 0.0f;  // channel absent from the neighbourhood (image smaller than a tile)
                out.at(y, x, c) = v;
            }
    }
    return out;
}

}  // namespace msdc
