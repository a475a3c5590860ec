#include "msdc/flow.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "msdc/error.hpp"

namespace msdc {

SpectralImage FlowField::to_image() const
{
    SpectralImage img(height, width, 2);
    for (std::size_t i = 0; i < u.size(); ++i) {
        img.data()[2 * i] = u[i];
        img.data()[2 * i + 1] = v[i];
    }
    return img;
}

FlowField FlowField::from_image(const SpectralImage& img)
{
    if (img.channels() != 2)
        throw DimensionError("flow image must have 2 channels, got " + img.shape_string());
    FlowField f(img.height(), img.width());
    for (std::size_t i = 0; i < f.u.size(); ++i) {
        f.u[i] = img.data()[2 * i];
        f.v[i] = img.data()[2 * i + 1];
    }
    return f;
}

namespace {

// Planar multi-channel image used inside the matcher.
struct Planes {
    int h = 0, w = 0, c = 0;
    std::vector<float> data;  // c planes of h * w

    float at(int ch, int y, int x) const { return data[(std::size_t(ch) * h + y) * w + x]; }
    float clamped(int ch, int y, int x) const
    {
        return at(ch, std::clamp(y, 0, h - 1), std::clamp(x, 0, w - 1));
    }
};

Planes to_planes(const SpectralImage& img)
{
    Planes p{img.height(), img.width(), img.channels(), {}};
    p.data.resize(img.size());
    for (int y = 0; y < p.h; ++y)
        for (int x = 0; x < p.w; ++x)
            for (int c = 0; c < p.c; ++c)
                p.data[(std::size_t(c) * p.h + y) * p.w + x] = img.at(y, x, c);
    return p;
}

Planes half(const Planes& in)
{
    Planes out{in.h / 2, in.w / 2, in.c, {}};
    out.data.resize(std::size_t(out.h) * out.w * out.c);
    for (int c = 0; c < in.c; ++c)
        for (int y = 0; y < out.h; ++y)
            for (int x = 0; x < out.w; ++x)
                out.data[(std::size_t(c) * out.h + y) * out.w + x] =
                    0.25f * (in.at(c, 2 * y, 2 * x) + in.at(c, 2 * y, 2 * x + 1) +
                             in.at(c, 2 * y + 1, 2 * x) + in.at(c, 2 * y + 1, 2 * x + 1));
    return out;
}

// Zero-mean SSD between the window around (y, x) in a and the window around
// (y + dv, x + du) in b, summed over channels.
double zssd(const Planes& a, const Planes& b, int y, int x, int du, int dv, int r)
{
    double total = 0.0;
    for (int c = 0; c < a.c; ++c) {
        double s = 0.0, s2 = 0.0;
        int n = 0;
        for (int yy = std::max(0, y - r); yy <= std::min(a.h - 1, y + r); ++yy)
            for (int xx = std::max(0, x - r); xx <= std::min(a.w - 1, x + r); ++xx) {
                const double d = double(a.at(c, yy, xx)) - b.clamped(c, yy + dv, xx + du);
                s += d;
                s2 += d * d;
                ++n;
            }
        total += s2 - s * s / n;
    }
    return total;
}

std::vector<int> median_filter(const std::vector<int>& in, int h, int w, int size)
{
    const int r = size / 2;
    std::vector<int> out(in.size());
    std::vector<int> buf;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            buf.clear();
            for (int yy = std::max(0, y - r); yy <= std::min(h - 1, y + r); ++yy)
                for (int xx = std::max(0, x - r); xx <= std::min(w - 1, x + r); ++xx)
                    buf.push_back(in[std::size_t(yy) * w + xx]);
            auto mid = buf.begin() + std::ptrdiff_t(buf.size() / 2);
            std::nth_element(buf.begin(), mid, buf.end());
            out[std::size_t(y) * w + x] = *mid;
        }
    return out;
}

// Candidate displacements ordered by distance from the prior so that ties keep
// the smallest correction.
std::vector<std::array<int, 2>> search_order(int radius)
{
    std::vector<std::array<int, 2>> order;
    for (int dv = -radius; dv <= radius; ++dv)
        for (int du = -radius; du <= radius; ++du)
            order.push_back({du, dv});
    std::stable_sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
        return a[0] * a[0] + a[1] * a[1] < b[0] * b[0] + b[1] * b[1];
    });
    return order;
}

double parabola_offset(double cm, double c0, double cp)
{
    const double denom = cm - 2.0 * c0 + cp;
    if (!(denom > 0.0))
        return 0.0;
    return std::clamp(0.5 * (cm - cp) / denom, -0.5, 0.5);
}

// Minimum of the quadratic surface through the 3x3 cost neighbourhood of the
// integer match (du, dv). The cross term keeps one axis' residual from biasing
// the other on oriented texture; falls back to per-axis parabolas when the
// surface is not convex.
std::array<double, 2> quadratic_offset(const Planes& a, const Planes& b, int y, int x, int du, int dv,
                                       int r)
{
    double c[3][3];
    for (int j = 0; j < 3; ++j)
        for (int i = 0; i < 3; ++i)
            c[j][i] = zssd(a, b, y, x, du + i - 1, dv + j - 1, r);
    const double gx = 0.5 * (c[1][2] - c[1][0]);
    const double gy = 0.5 * (c[2][1] - c[0][1]);
    const double hxx = c[1][2] - 2.0 * c[1][1] + c[1][0];
    const double hyy = c[2][1] - 2.0 * c[1][1] + c[0][1];
    const double hxy = 0.25 * (c[2][2] - c[2][0] - c[0][2] + c[0][0]);
    const double det = hxx * hyy - hxy * hxy;
    if (hxx > 0.0 && det > 1e-12 * hxx * hyy) {
        const double ox = -(hyy * gx - hxy * gy) / det;
        const double oy = -(hxx * gy - hxy * gx) / det;
        return {std::clamp(ox, -0.5, 0.5), std::clamp(oy, -0.5, 0.5)};
    }
    return {parabola_offset(c[1][0], c[1][1], c[1][2]), parabola_offset(c[0][1], c[1][1], c[2][1])};
}

}  // namespace

FlowField BlockMatchingFlow::estimate(const SpectralImage& src, const SpectralImage& dst) const
{
    if (!src.same_shape(dst))
        throw DimensionError("estimate_flow: shape mismatch " + src.shape_string() + " vs " +
                             dst.shape_string());
    const int min_side = std::min(src.height(), src.width());
    if (min_side < params_.min_size)
        throw DimensionError("estimate_flow: unsupported size " + src.shape_string() +
                             " (minimum side " + std::to_string(params_.min_size) + ")");
    const int levels = std::max(
        1, int(std::floor(std::log2(double(min_side) / double(params_.coarsest_side)))));
    const int r = params_.window / 2;

    std::vector<Planes> pa{to_planes(src)}, pb{to_planes(dst)};
    for (int l = 1; l < levels; ++l) {
        pa.push_back(half(pa.back()));
        pb.push_back(half(pb.back()));
    }

    const auto order = search_order(params_.radius);
    std::vector<int> du, dv;  // integer flow at the current level
    int ph = 0, pw = 0;
    for (int l = levels - 1; l >= 0; --l) {
        const Planes& a = pa[std::size_t(l)];
        const Planes& b = pb[std::size_t(l)];
        std::vector<int> prior_u(std::size_t(a.h) * a.w, 0), prior_v(prior_u.size(), 0);
        if (!du.empty())
            for (int y = 0; y < a.h; ++y)
                for (int x = 0; x < a.w; ++x) {
                    const std::size_t src_i =
                        std::size_t(std::min(y / 2, ph - 1)) * pw + std::min(x / 2, pw - 1);
                    prior_u[std::size_t(y) * a.w + x] = 2 * du[src_i];
                    prior_v[std::size_t(y) * a.w + x] = 2 * dv[src_i];
                }

        std::vector<int> best_u(prior_u.size()), best_v(prior_u.size());
#pragma omp parallel for schedule(static)
        for (int y = 0; y < a.h; ++y)
            for (int x = 0; x < a.w; ++x) {
                const std::size_t i = std::size_t(y) * a.w + x;
                double best = std::numeric_limits<double>::infinity();
                int bu = prior_u[i], bv = prior_v[i];
                for (const auto& d : order) {
                    const int cu = prior_u[i] + d[0];
                    const int cv = prior_v[i] + d[1];
                    const double cost = zssd(a, b, y, x, cu, cv, r);
                    if (cost < best) {
                        best = cost;
                        bu = cu;
                        bv = cv;
                    }
                }
                best_u[i] = bu;
                best_v[i] = bv;
            }
        if (params_.median > 1) {
            best_u = median_filter(best_u, a.h, a.w, params_.median);
            best_v = median_filter(best_v, a.h, a.w, params_.median);
        }
        du = std::move(best_u);
        dv = std::move(best_v);
        ph = a.h;
        pw = a.w;
    }

    FlowField flow(src.height(), src.width());
    const Planes& a = pa[0];
    const Planes& b = pb[0];
#pragma omp parallel for schedule(static)
    for (int y = 0; y < a.h; ++y)
        for (int x = 0; x < a.w; ++x) {
            const std::size_t i = std::size_t(y) * a.w + x;
            double fu = du[i], fv = dv[i];
            if (params_.subpixel) {
                // Forward and reverse fits: texture-induced asymmetry of the cost
                // surface enters both with the same sign and cancels.
                const int qy = std::clamp(y + dv[i], 0, a.h - 1);
                const int qx = std::clamp(x + du[i], 0, a.w - 1);
                const auto fwd = quadratic_offset(a, b, y, x, du[i], dv[i], r);
                const auto rev = quadratic_offset(b, a, qy, qx, -du[i], -dv[i], r);
                fu += 0.5 * (fwd[0] - rev[0]);
                fv += 0.5 * (fwd[1] - rev[1]);
            }
            flow.u[i] = float(fu);
            flow.v[i] = float(fv);
        }
    return flow;
}

FlowField estimate_flow(const SpectralImage& src, const SpectralImage& dst,
                        const FlowParams& params)
{
    return BlockMatchingFlow(params).estimate(src, dst);
}

SpectralImage warp_backward(const SpectralImage& img, const FlowField& flow)
{
    if (flow.height != img.height() || flow.width != img.width())
        throw DimensionError("warp_backward: flow size does not match " + img.shape_string());
    const int h = img.height(), w = img.width(), ch = img.channels();
    SpectralImage out(h, w, ch);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const double sx = std::clamp(x + double(flow.u_at(y, x)), 0.0, double(w - 1));
            const double sy = std::clamp(y + double(flow.v_at(y, x)), 0.0, double(h - 1));
            const int x0 = std::min(int(sx), w - 1), y0 = std::min(int(sy), h - 1);
            const int x1 = std::min(x0 + 1, w - 1), y1 = std::min(y0 + 1, h - 1);
            const double ax = sx - x0, ay = sy - y0;
            const float* p00 = img.pixel(y0, x0);
            const float* p01 = img.pixel(y0, x1);
            const float* p10 = img.pixel(y1, x0);
            const float* p11 = img.pixel(y1, x1);
            float* q = out.pixel(y, x);
            for (int c = 0; c < ch; ++c)
                q[c] = float((1 - ay) * ((1 - ax) * p00[c] + ax * p01[c]) +
                             ay * ((1 - ax) * p10[c] + ax * p11[c]));
        }
    return out;
}

FlowField downscale_flow(const FlowField& flow, int factor)
{
    if (factor <= 0 || flow.height % factor != 0 || flow.width % factor != 0)
        throw DimensionError("downscale_flow: size not divisible by " + std::to_string(factor));
    if (factor == 1)
        return flow;
    FlowField out(flow.height / factor, flow.width / factor);
    const double norm = 1.0 / (double(factor) * factor * factor);
    for (int y = 0; y < out.height; ++y)
        for (int x = 0; x < out.width; ++x) {
            double su = 0.0, sv = 0.0;
            for (int dy = 0; dy < factor; ++dy)
                for (int dx = 0; dx < factor; ++dx) {
                    su += flow.u_at(y * factor + dy, x * factor + dx);
                    sv += flow.v_at(y * factor + dy, x * factor + dx);
                }
            out.u_at(y, x) = float(su * norm);
            out.v_at(y, x) = float(sv * norm);
        }
    return out;
}

namespace {

// Color wheel with RY, YG, GC, CB, BM, MR segment lengths 15, 6, 4, 11, 13, 6.
std::vector<std::array<double, 3>> make_color_wheel()
{
    constexpr int RY = 15, YG = 6, GC = 4, CB = 11, BM = 13, MR = 6;
    std::vector<std::array<double, 3>> wheel;
    for (int i = 0; i < RY; ++i)
        wheel.push_back({255, 255.0 * i / RY, 0});
    for (int i = 0; i < YG; ++i)
        wheel.push_back({255 - 255.0 * i / YG, 255, 0});
    for (int i = 0; i < GC; ++i)
        wheel.push_back({0, 255, 255.0 * i / GC});
    for (int i = 0; i < CB; ++i)
        wheel.push_back({0, 255 - 255.0 * i / CB, 255});
    for (int i = 0; i < BM; ++i)
        wheel.push_back({255.0 * i / BM, 0, 255});
    for (int i = 0; i < MR; ++i)
        wheel.push_back({255, 0, 255 - 255.0 * i / MR});
    return wheel;
}

}  // namespace

SpectralImage flow_to_color(const FlowField& flow, double max_magnitude)
{
    static const auto wheel = make_color_wheel();
    const int ncols = int(wheel.size());
    double maxrad = max_magnitude;
    if (maxrad <= 0.0) {
        for (std::size_t i = 0; i < flow.u.size(); ++i)
            maxrad = std::max(maxrad, std::hypot(double(flow.u[i]), double(flow.v[i])));
        if (maxrad <= 0.0)
            maxrad = 1.0;
    }
    SpectralImage out(flow.height, flow.width, 3);
    for (int y = 0; y < flow.height; ++y)
        for (int x = 0; x < flow.width; ++x) {
            const double fu = flow.u_at(y, x) / maxrad;
            const double fv = flow.v_at(y, x) / maxrad;
            const double rad = std::hypot(fu, fv);
            const double a = std::atan2(-fv, -fu) / std::numbers::pi;
            const double fk = (a + 1.0) / 2.0 * (ncols - 1);
            const int k0 = int(std::floor(fk));
            const int k1 = (k0 + 1) % ncols;
            const double f = fk - k0;
            float* q = out.pixel(y, x);
            for (int c = 0; c < 3; ++c) {
                const double c0 = wheel[std::size_t(k0)][std::size_t(c)] / 255.0;
                const double c1 = wheel[std::size_t(k1)][std::size_t(c)] / 255.0;
                double col = (1 - f) * c0 + f * c1;
                col = rad <= 1.0 ? 1.0 - rad * (1.0 - col) : col * 0.75;
                q[c] = float(col);
            }
        }
    return out;
}

}  // namespace msdc
