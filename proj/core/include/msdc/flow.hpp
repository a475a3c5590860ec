#pragma once

#include <vector>

#include "msdc/image.hpp"

namespace msdc {

/// Per-pixel displacement from a reference frame into a target frame:
/// pixel p of the reference corresponds to p + (u, v) in the target.
struct FlowField {
    int height = 0;
    int width = 0;
    std::vector<float> u;
    std::vector<float> v;

    FlowField() = default;
    FlowField(int h, int w) : height(h), width(w), u(std::size_t(h) * w), v(std::size_t(h) * w) {}

    float& u_at(int y, int x) { return u[std::size_t(y) * width + x]; }
    float& v_at(int y, int x) { return v[std::size_t(y) * width + x]; }
    float u_at(int y, int x) const { return u[std::size_t(y) * width + x]; }
    float v_at(int y, int x) const { return v[std::size_t(y) * width + x]; }

    /// 2-channel image (u, v) for MSI persistence.
    SpectralImage to_image() const;
    static FlowField from_image(const SpectralImage& img);
};

struct FlowParams {
    int window = 9;        // zero-mean SSD window (odd)
    int radius = 4;        // integer search radius per level
    int median = 5;        // median filter size applied once per level
    int min_size = 32;     // smallest supported image side
    int coarsest_side = 16;
    bool subpixel = true;  // parabolic refinement on the finest level
};

/// Pluggable disparity estimator; the pipeline only depends on this interface.
class FlowEstimator {
public:
    virtual ~FlowEstimator() = default;
    virtual FlowField estimate(const SpectralImage& src, const SpectralImage& dst) const = 0;
};

/// Coarse-to-fine block matcher with floor(log2(min(H, W) / 16)) pyramid levels.
class BlockMatchingFlow final : public FlowEstimator {
public:
    explicit BlockMatchingFlow(FlowParams params = {}) : params_(params) {}
    FlowField estimate(const SpectralImage& src, const SpectralImage& dst) const override;
    const FlowParams& params() const noexcept { return params_; }

private:
    FlowParams params_;
};

/// Flow from src to dst (src pixel p matches dst at p + w(p)).
/// Throws DimensionError for mismatched shapes or images under min_size.
FlowField estimate_flow(const SpectralImage& src, const SpectralImage& dst,
                        const FlowParams& params = {});

/// out(p) = bilinear sample of img at p + w(p), clamped to the border.
SpectralImage warp_backward(const SpectralImage& img, const FlowField& flow);

/// Average-pools the flow by `factor` and divides the displacements by `factor`.
FlowField downscale_flow(const FlowField& flow, int factor);

/// Standard optical-flow color wheel rendering (hue = direction, saturation =
/// magnitude / max_magnitude). max_magnitude <= 0 uses the field's maximum.
SpectralImage flow_to_color(const FlowField& flow, double max_magnitude = 0.0);

}  // namespace msdc
