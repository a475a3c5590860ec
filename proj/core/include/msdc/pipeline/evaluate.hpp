#pragma once

#include <string>
#include <vector>

#include "msdc/image.hpp"

namespace msdc::pipeline {

struct MetricsReport {
    double psnr = 0.0;  // +inf for identical images
    double ssim = 0.0;
    double sam = 0.0;   // degrees
    std::vector<double> psnr_per_channel;

    /// Non-finite values are written as the strings "inf" / "-inf" / "nan";
    /// finite values round-trip exactly.
    std::string to_json() const;
    static MetricsReport from_json(const std::string& text);
    friend bool operator==(const MetricsReport&, const MetricsReport&) = default;
};

MetricsReport evaluate(const SpectralImage& pred, const SpectralImage& gt);

}  // namespace msdc::pipeline
