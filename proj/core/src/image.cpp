#include "msdc/image.hpp"

#include <algorithm>
#include <cmath>

#include "msdc/error.hpp"

namespace msdc {

SpectralImage::SpectralImage(int height, int width, int channels, float fill)
    : height_(height), width_(width), channels_(channels)
{
    if (height < 0 || width < 0 || channels < 0)
        throw DimensionError("negative image dimension");
    data_.assign(std::size_t(height) * std::size_t(width) * std::size_t(channels), fill);
}

SpectralImage::SpectralImage(int height, int width, int channels, std::vector<float> data)
    : height_(height), width_(width), channels_(channels), data_(std::move(data))
{
    if (data_.size() != std::size_t(height) * std::size_t(width) * std::size_t(channels))
        throw DimensionError("image data length does not match " + shape_string());
}

bool SpectralImage::same_shape(const SpectralImage& other) const noexcept
{
    return height_ == other.height_ && width_ == other.width_ && channels_ == other.channels_;
}

std::string SpectralImage::shape_string() const
{
    return std::to_string(height_) + "x" + std::to_string(width_) + "x" +
           std::to_string(channels_);
}

bool SpectralImage::all_finite() const noexcept
{
    return std::all_of(data_.begin(), data_.end(), [](float v) { return std::isfinite(v); });
}

SpectralImage SpectralImage::channel(int c) const
{
    if (c < 0 || c >= channels_)
        throw DimensionError("channel index out of range");
    SpectralImage out(height_, width_, 1);
    for (std::size_t i = 0; i < pixel_count(); ++i)
        out.data_[i] = data_[i * std::size_t(channels_) + std::size_t(c)];
    return out;
}

SpectralImage SpectralImage::crop(int y0, int x0, int height, int width) const
{
    if (y0 < 0 || x0 < 0 || height < 0 || width < 0 || y0 + height > height_ ||
        x0 + width > width_)
        throw DimensionError("crop rectangle outside " + shape_string());
    SpectralImage out(height, width, channels_);
    const std::size_t row = std::size_t(width) * std::size_t(channels_);
    for (int y = 0; y < height; ++y)
        std::copy_n(pixel(y0 + y, x0), row, out.pixel(y, 0));
    return out;
}

void MosaicPattern::validate() const
{
    if (tile_h <= 0 || tile_w <= 0)
        throw ConfigError("mosaic tile must be non-empty");
    if (assignment.size() != std::size_t(tile_h * tile_w))
        throw ConfigError("mosaic assignment size does not match tile");
    for (int c : assignment)
        if (c < 0 || c >= channel_count)
            throw ConfigError("mosaic assignment references channel " + std::to_string(c) +
                              " of " + std::to_string(channel_count));
}

MosaicPattern MosaicPattern::bayer_grbg()
{
    return {"bayer_grbg", 2, 2, 3, {1, 0, 2, 1}};
}

MosaicPattern MosaicPattern::msfa16()
{
    std::vector<int> layout(16);
    for (int i = 0; i < 16; ++i)
        layout[std::size_t(i)] = i;
    return {"msfa16", 4, 4, 16, std::move(layout)};
}

MosaicPattern MosaicPattern::msfa16(const std::vector<int>& layout)
{
    if (layout.size() != 16)
        throw ConfigError("MSFA layout needs 16 entries");
    std::vector<int> sorted = layout;
    std::sort(sorted.begin(), sorted.end());
    for (int i = 0; i < 16; ++i)
        if (sorted[std::size_t(i)] != i)
            throw ConfigError("MSFA layout must be a permutation of 0..15");
    return {"msfa16_custom", 4, 4, 16, layout};
}

MosaicPattern MosaicPattern::from_name(const std::string& name)
{
    if (name == "bayer_grbg")
        return bayer_grbg();
    if (name == "msfa16")
        return msfa16();
    throw ConfigError("unknown mosaic pattern '" + name + "'");
}

}  // namespace msdc
