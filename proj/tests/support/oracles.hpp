#pragma once

// Literal scalar-loop transcriptions of the image metrics, written without
// reference to the library implementation.

#include <cmath>
#include <limits>
#include <vector>

#include "msdc/image.hpp"

namespace msdc::testing {

inline double oracle_psnr(const SpectralImage& a, const SpectralImage& b)
{
    long double se = 0.0L;
    long count = 0;
    for (int y = 0; y < a.height(); ++y)
        for (int x = 0; x < a.width(); ++x)
            for (int c = 0; c < a.channels(); ++c) {
                const long double d = (long double)a.at(y, x, c) - (long double)b.at(y, x, c);
                se += d * d;
                ++count;
            }
    const double mse = double(se / count);
    if (mse == 0.0)
        return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(1.0 / mse);
}

inline double oracle_ssim(const SpectralImage& a, const SpectralImage& b)
{
    const double c1 = 0.0001, c2 = 0.0009;
    double weights[11][11];
    double wsum = 0.0;
    for (int i = 0; i < 11; ++i)
        for (int j = 0; j < 11; ++j) {
            weights[i][j] = std::exp(-((i - 5) * (i - 5) + (j - 5) * (j - 5)) / (2.0 * 1.5 * 1.5));
            wsum += weights[i][j];
        }
    double channel_total = 0.0;
    for (int c = 0; c < a.channels(); ++c) {
        double sum = 0.0;
        int windows = 0;
        for (int y = 0; y + 11 <= a.height(); ++y)
            for (int x = 0; x + 11 <= a.width(); ++x) {
                double mx = 0, my = 0, sxx = 0, syy = 0, sxy = 0;
                for (int i = 0; i < 11; ++i)
                    for (int j = 0; j < 11; ++j) {
                        const double wgt = weights[i][j] / wsum;
                        const double p = a.at(y + i, x + j, c), q = b.at(y + i, x + j, c);
                        mx += wgt * p;
                        my += wgt * q;
                        sxx += wgt * p * p;
                        syy += wgt * q * q;
                        sxy += wgt * p * q;
                    }
                const double vx = sxx - mx * mx, vy = syy - my * my, cov = sxy - mx * my;
                sum += (2 * mx * my + c1) * (2 * cov + c2) /
                       ((mx * mx + my * my + c1) * (vx + vy + c2));
                ++windows;
            }
        channel_total += sum / windows;
    }
    return channel_total / a.channels();
}

inline double oracle_sam(const SpectralImage& a, const SpectralImage& b)
{
    const double pi = std::acos(-1.0);
    double total = 0.0;
    int counted = 0;
    for (int y = 0; y < a.height(); ++y)
        for (int x = 0; x < a.width(); ++x) {
            double dot = 0, na = 0, nb = 0;
            for (int c = 0; c < a.channels(); ++c) {
                dot += double(a.at(y, x, c)) * b.at(y, x, c);
                na += double(a.at(y, x, c)) * a.at(y, x, c);
                nb += double(b.at(y, x, c)) * b.at(y, x, c);
            }
            na = std::sqrt(na);
            nb = std::sqrt(nb);
            if (na < 1e-8 || nb < 1e-8)
                continue;
            double cosine = dot / (na * nb);
            cosine = std::max(-1.0, std::min(1.0, cosine));
            total += std::acos(cosine) * 180.0 / pi;
            ++counted;
        }
    return counted ? total / counted : 0.0;
}

}  // namespace msdc::testing
