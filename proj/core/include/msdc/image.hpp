#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace msdc {

/// Dense H x W x N float raster, row-major with interleaved channels.
/// Values are normalized so that the sensor white level maps to 1.0.
class SpectralImage {
public:
    SpectralImage() = default;
    SpectralImage(int height, int width, int channels, float fill = 0.0f);
    SpectralImage(int height, int width, int channels, std::vector<float> data);

    int height() const noexcept { return height_; }
    int width() const noexcept { return width_; }
    int channels() const noexcept { return channels_; }
    std::size_t pixel_count() const noexcept { return std::size_t(height_) * std::size_t(width_); }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    float& at(int y, int x, int c) { return data_[index(y, x, c)]; }
    float at(int y, int x, int c) const { return data_[index(y, x, c)]; }

    float* pixel(int y, int x) { return data_.data() + index(y, x, 0); }
    const float* pixel(int y, int x) const { return data_.data() + index(y, x, 0); }

    std::span<float> data() noexcept { return data_; }
    std::span<const float> data() const noexcept { return data_; }

    bool same_shape(const SpectralImage& other) const noexcept;
    std::string shape_string() const;

    /// True when every sample is finite.
    bool all_finite() const noexcept;

    /// Copy of a single channel as a 1-channel image.
    SpectralImage channel(int c) const;
    /// Rectangular crop; the rectangle must lie inside the image.
    SpectralImage crop(int y0, int x0, int height, int width) const;

    friend bool operator==(const SpectralImage&, const SpectralImage&) = default;

private:
    std::size_t index(int y, int x, int c) const noexcept
    {
        return (std::size_t(y) * std::size_t(width_) + std::size_t(x)) * std::size_t(channels_) +
               std::size_t(c);
    }

    int height_ = 0;
    int width_ = 0;
    int channels_ = 0;
    std::vector<float> data_;
};

/// Periodic tile mapping pixel coordinates to spectral-channel indices.
struct MosaicPattern {
    std::string name;
    int tile_h = 0;
    int tile_w = 0;
    int channel_count = 0;
    std::vector<int> assignment;  // tile_h x tile_w, row-major

    int channel_at(int y, int x) const noexcept
    {
        return assignment[std::size_t((y % tile_h) * tile_w + (x % tile_w))];
    }

    /// Throws ConfigError when an index is out of range or the grid is malformed.
    void validate() const;

    /// 2x2 [[G,R],[B,G]] over channels R=0, G=1, B=2.
    static MosaicPattern bayer_grbg();
    /// 4x4 tile with channel k at row-major tile position k.
    static MosaicPattern msfa16();
    /// 4x4 tile from an explicit layout; must be a bijection onto 0..15.
    static MosaicPattern msfa16(const std::vector<int>& layout);
    /// Looks a preset up by its sidecar name ("bayer_grbg", "msfa16").
    static MosaicPattern from_name(const std::string& name);

    friend bool operator==(const MosaicPattern&, const MosaicPattern&) = default;
};

/// Single-channel raw raster together with the pattern that produced it.
struct MosaicImage {
    SpectralImage plane;  // H x W x 1
    MosaicPattern pattern;

    int height() const noexcept { return plane.height(); }
    int width() const noexcept { return plane.width(); }
};

}  // namespace msdc
