#include "msdc/pipeline/evaluate.hpp"

#include <cmath>
#include <limits>

#include "json.hpp"
#include "msdc/error.hpp"
#include "msdc/metrics.hpp"

namespace msdc::pipeline {

using nlohmann::json;

namespace {

json encode(double v)
{
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    return v;
}

double decode(const json& j)
{
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "inf")
            return std::numeric_limits<double>::infinity();
        if (s == "-inf")
            return -std::numeric_limits<double>::infinity();
        if (s == "nan")
            return std::numeric_limits<double>::quiet_NaN();
        throw ConfigError("metrics: unexpected value '" + s + "'");
    }
    return j.get<double>();
}

}  // namespace

std::string MetricsReport::to_json() const
{
    json per = json::array();
    for (double v : psnr_per_channel)
        per.push_back(encode(v));
    return json{{"psnr", encode(psnr)}, {"ssim", encode(ssim)}, {"sam", encode(sam)},
                {"psnr_per_channel", per}}
        .dump(2);
}

MetricsReport MetricsReport::from_json(const std::string& text)
{
    MetricsReport r;
    try {
        const json j = json::parse(text);
        r.psnr = decode(j.at("psnr"));
        r.ssim = decode(j.at("ssim"));
        r.sam = decode(j.at("sam"));
        for (const auto& v : j.at("psnr_per_channel"))
            r.psnr_per_channel.push_back(decode(v));
    } catch (const json::exception& e) {
        throw ConfigError(std::string("metrics: ") + e.what());
    }
    return r;
}

MetricsReport evaluate(const SpectralImage& pred, const SpectralImage& gt)
{
    if (!pred.same_shape(gt))
        throw DimensionError("evaluate: " + pred.shape_string() + " vs " + gt.shape_string());
    return {psnr(pred, gt), ssim(pred, gt), sam(pred, gt), psnr_per_channel(pred, gt)};
}

}  // namespace msdc::pipeline
