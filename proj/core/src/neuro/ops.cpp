#include "msdc/neuro/ops.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Core>

#include "kernels.hpp"
#include "msdc/error.hpp"

namespace msdc::nn {

using detail::axpy;
using detail::dot;

namespace {

struct ConvDims {
    int ci, h, w, co, kh, kw, stride, pad, ho, wo;
};

// Valid output range [lo, hi) for tap offset k along one axis.
inline void tap_range(int k, int pad, int stride, int in, int out, int& lo, int& hi)
{
    // need 0 <= o*stride + k - pad < in
    lo = std::max(0, (pad - k + stride - 1) / stride);
    hi = std::min(out, (in + pad - k + stride - 1) / stride);
    if (pad - k < 0)
        lo = 0;
}

template <typename T>
using RowMat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using MatMap = Eigen::Map<RowMat<T>>;
template <typename T>
using ConstMatMap = Eigen::Map<const RowMat<T>>;

bool is_pointwise(const ConvDims& d)
{
    return d.kh == 1 && d.kw == 1 && d.stride == 1 && d.pad == 0;
}

// Column matrix (ci*kh*kw, ho*wo); zero where a tap falls into padding.
template <typename T>
void im2col(const T* x, T* col, const ConvDims& d)
{
    const std::size_t oplane = std::size_t(d.ho) * d.wo;
    for (int i = 0; i < d.ci; ++i) {
        const T* xp = x + std::size_t(i) * d.h * d.w;
        for (int ky = 0; ky < d.kh; ++ky) {
            int ylo, yhi;
            tap_range(ky, d.pad, d.stride, d.h, d.ho, ylo, yhi);
            for (int kx = 0; kx < d.kw; ++kx) {
                int xlo, xhi;
                tap_range(kx, d.pad, d.stride, d.w, d.wo, xlo, xhi);
                T* row = col + ((std::size_t(i) * d.kh + ky) * d.kw + kx) * oplane;
                std::fill(row, row + oplane, T(0));
                for (int y = ylo; y < yhi; ++y) {
                    const T* xr = xp + std::size_t(y * d.stride + ky - d.pad) * d.w;
                    T* dst = row + std::size_t(y) * d.wo;
                    if (d.stride == 1)
                        std::copy(xr + xlo + kx - d.pad, xr + xhi + kx - d.pad, dst + xlo);
                    else
                        for (int xx = xlo; xx < xhi; ++xx)
                            dst[xx] = xr[xx * d.stride + kx - d.pad];
                }
            }
        }
    }
}

template <typename T>
void col2im_add(const T* col, T* dx, const ConvDims& d)
{
    const std::size_t oplane = std::size_t(d.ho) * d.wo;
    for (int i = 0; i < d.ci; ++i) {
        T* dxp = dx + std::size_t(i) * d.h * d.w;
        for (int ky = 0; ky < d.kh; ++ky) {
            int ylo, yhi;
            tap_range(ky, d.pad, d.stride, d.h, d.ho, ylo, yhi);
            for (int kx = 0; kx < d.kw; ++kx) {
                int xlo, xhi;
                tap_range(kx, d.pad, d.stride, d.w, d.wo, xlo, xhi);
                const T* row = col + ((std::size_t(i) * d.kh + ky) * d.kw + kx) * oplane;
                for (int y = ylo; y < yhi; ++y) {
                    T* dr = dxp + std::size_t(y * d.stride + ky - d.pad) * d.w;
                    const T* src = row + std::size_t(y) * d.wo;
                    if (d.stride == 1)
                        axpy(dr + xlo + kx - d.pad, src + xlo, T(1), xhi - xlo);
                    else
                        for (int xx = xlo; xx < xhi; ++xx)
                            dr[xx * d.stride + kx - d.pad] += src[xx];
                }
            }
        }
    }
}

template <typename T>
void conv_forward(const T* x, const T* k, const T* bias, T* out, const ConvDims& d)
{
    const Eigen::Index K = Eigen::Index(d.ci) * d.kh * d.kw, P = Eigen::Index(d.ho) * d.wo;
    ConstMatMap<T> W(k, d.co, K);
    MatMap<T> O(out, d.co, P);
    if (is_pointwise(d)) {
        O.noalias() = W * ConstMatMap<T>(x, K, P);
    } else {
        std::vector<T> col(std::size_t(K * P));
        im2col(x, col.data(), d);
        O.noalias() = W * ConstMatMap<T>(col.data(), K, P);
    }
    if (bias)
        for (int o = 0; o < d.co; ++o)
            O.row(o).array() += bias[o];
}

template <typename T>
void conv_backward(const T* g, const T* x, const T* k, T* dx, T* dk, const ConvDims& d)
{
    const Eigen::Index K = Eigen::Index(d.ci) * d.kh * d.kw, P = Eigen::Index(d.ho) * d.wo;
    ConstMatMap<T> G(g, d.co, P);
    ConstMatMap<T> W(k, d.co, K);
    if (is_pointwise(d)) {
        if (dk)
            MatMap<T>(dk, d.co, K).noalias() += G * ConstMatMap<T>(x, K, P).transpose();
        if (dx)
            MatMap<T>(dx, K, P).noalias() += W.transpose() * G;
        return;
    }
    std::vector<T> col(std::size_t(K * P));
    if (dk) {
        im2col(x, col.data(), d);
        MatMap<T>(dk, d.co, K).noalias() += G * ConstMatMap<T>(col.data(), K, P).transpose();
    }
    if (dx) {
        MatMap<T>(col.data(), K, P).noalias() = W.transpose() * G;
        col2im_add(col.data(), dx, d);
    }
}

template <typename T>
void require_feature_map(const Tensor<T>& t, const char* op)
{
    if (t.rank() != 3)
        throw DimensionError(std::string(op) + ": expected (C,H,W), got " + t.shape_string());
}

template <typename T>
void require_same(const Tensor<T>& a, const Tensor<T>& b, const char* op)
{
    if (!a.same_shape(b))
        throw DimensionError(std::string(op) + ": shape mismatch " + a.shape_string() + " vs " +
                             b.shape_string());
}

template <typename T>
bool wants_grad(const Node<T>& n, std::size_t i)
{
    return i < n.parents.size() && n.parents[i] && n.parents[i]->requires_grad;
}

}  // namespace

template <typename T>
Var<T> conv2d(const Var<T>& x, const Var<T>& weight, const Var<T>& bias, int stride, int pad)
{
    const Tensor<T>& X = x->value;
    const Tensor<T>& K = weight->value;
    require_feature_map(X, "conv2d");
    if (K.rank() != 4 || K.dim(1) != X.channels())
        throw DimensionError("conv2d: kernel " + K.shape_string() + " does not match input " +
                             X.shape_string());
    if (bias && (bias->value.rank() != 1 || bias->value.dim(0) != K.dim(0)))
        throw DimensionError("conv2d: bias " + bias->value.shape_string() +
                             " does not match kernel " + K.shape_string());
    if (stride < 1 || pad < 0)
        throw DimensionError("conv2d: invalid stride/pad");
    ConvDims d{X.channels(), X.height(), X.width(), K.dim(0), K.dim(2), K.dim(3), stride, pad, 0,
               0};
    d.ho = (d.h + 2 * pad - d.kh) / stride + 1;
    d.wo = (d.w + 2 * pad - d.kw) / stride + 1;
    if (d.h + 2 * pad < d.kh || d.w + 2 * pad < d.kw)
        throw DimensionError("conv2d: kernel larger than padded input " + X.shape_string());

    Tensor<T> out({d.co, d.ho, d.wo});
    conv_forward(X.data(), K.data(), bias ? bias->value.data() : nullptr, out.data(), d);
    return make_node<T>(std::move(out), {x, weight, bias}, [d](Node<T>& n) {
        const T* g = n.grad.data();
        conv_backward(g, n.parents[0]->value.data(), n.parents[1]->value.data(),
                      wants_grad(n, 0) ? n.parents[0]->ensure_grad().data() : nullptr,
                      wants_grad(n, 1) ? n.parents[1]->ensure_grad().data() : nullptr, d);
        if (wants_grad(n, 2)) {
            T* db = n.parents[2]->ensure_grad().data();
            const std::size_t plane = std::size_t(d.ho) * d.wo;
            for (int o = 0; o < d.co; ++o) {
                T s = 0;
                for (std::size_t p = 0; p < plane; ++p)
                    s += g[o * plane + p];
                db[o] += s;
            }
        }
    });
}

template <typename T>
Var<T> add(const Var<T>& a, const Var<T>& b)
{
    require_same(a->value, b->value, "add");
    Tensor<T> out = a->value;
    const T* bv = b->value.data();
    for (std::size_t i = 0; i < out.numel(); ++i)
        out[i] += bv[i];
    return make_node<T>(std::move(out), {a, b}, [](Node<T>& n) {
        for (std::size_t k = 0; k < 2; ++k)
            if (wants_grad(n, k))
                axpy(n.parents[k]->ensure_grad().data(), n.grad.data(), T(1),
                     std::ptrdiff_t(n.grad.numel()));
    });
}

template <typename T>
Var<T> scale(const Var<T>& x, T factor)
{
    Tensor<T> out = x->value;
    for (auto& v : out.values())
        v *= factor;
    return make_node<T>(std::move(out), {x}, [factor](Node<T>& n) {
        axpy(n.parents[0]->ensure_grad().data(), n.grad.data(), factor,
             std::ptrdiff_t(n.grad.numel()));
    });
}

template <typename T>
Var<T> concat_channels(const std::vector<Var<T>>& parts)
{
    std::vector<Var<T>> present;
    for (const auto& p : parts)
        if (p)
            present.push_back(p);
    if (present.empty())
        throw DimensionError("concat_channels: no inputs");
    const Tensor<T>& first = present.front()->value;
    require_feature_map(first, "concat_channels");
    int total = 0;
    for (const auto& p : present) {
        require_feature_map(p->value, "concat_channels");
        if (p->value.height() != first.height() || p->value.width() != first.width())
            throw DimensionError("concat_channels: spatial mismatch " + p->value.shape_string() +
                                 " vs " + first.shape_string());
        total += p->value.channels();
    }
    Tensor<T> out({total, first.height(), first.width()});
    std::size_t at = 0;
    for (const auto& p : present) {
        std::copy(p->value.data(), p->value.data() + p->value.numel(), out.data() + at);
        at += p->value.numel();
    }
    return make_node<T>(std::move(out), present, [](Node<T>& n) {
        std::size_t at = 0;
        for (std::size_t k = 0; k < n.parents.size(); ++k) {
            const std::size_t len = n.parents[k]->value.numel();
            if (wants_grad(n, k))
                axpy(n.parents[k]->ensure_grad().data(), n.grad.data() + at, T(1),
                     std::ptrdiff_t(len));
            at += len;
        }
    });
}

template <typename T>
Var<T> simple_gate(const Var<T>& x)
{
    const Tensor<T>& X = x->value;
    require_feature_map(X, "simple_gate");
    if (X.channels() % 2 != 0)
        throw DimensionError("simple_gate: odd channel count " + X.shape_string());
    const int half = X.channels() / 2;
    Tensor<T> out({half, X.height(), X.width()});
    const std::size_t n = out.numel();
    for (std::size_t i = 0; i < n; ++i)
        out[i] = X[i] * X[i + n];
    return make_node<T>(std::move(out), {x}, [n](Node<T>& node) {
        const T* xv = node.parents[0]->value.data();
        T* dx = node.parents[0]->ensure_grad().data();
        const T* g = node.grad.data();
        for (std::size_t i = 0; i < n; ++i) {
            dx[i] += g[i] * xv[i + n];
            dx[i + n] += g[i] * xv[i];
        }
    });
}

template <typename T>
Var<T> leaky_relu(const Var<T>& x, T slope)
{
    Tensor<T> out = x->value;
    for (auto& v : out.values())
        if (v < 0)
            v *= slope;
    return make_node<T>(std::move(out), {x}, [slope](Node<T>& n) {
        const T* xv = n.parents[0]->value.data();
        T* dx = n.parents[0]->ensure_grad().data();
        const T* g = n.grad.data();
        for (std::size_t i = 0; i < n.grad.numel(); ++i)
            dx[i] += xv[i] < 0 ? slope * g[i] : g[i];
    });
}

template <typename T>
Var<T> bounded_tanh(const Var<T>& x, T bound)
{
    Tensor<T> out = x->value;
    for (auto& v : out.values())
        v = bound * std::tanh(v);
    return make_node<T>(std::move(out), {x}, [bound](Node<T>& n) {
        T* dx = n.parents[0]->ensure_grad().data();
        const T* g = n.grad.data();
        const T* y = n.value.data();
        for (std::size_t i = 0; i < n.grad.numel(); ++i)
            dx[i] += g[i] * (bound - y[i] * y[i] / bound);
    });
}

namespace {

// Index of the input element feeding output element (c, oy, ox) of a shuffle.
struct Shuffle {
    int c, h, w, r;  // output channels, input spatial size
    std::size_t source(int oc, int oy, int ox) const
    {
        const int ic = oc * r * r + (oy % r) * r + (ox % r);
        return (std::size_t(ic) * h + oy / r) * w + ox / r;
    }
};

}  // namespace

template <typename T>
Var<T> pixel_shuffle(const Var<T>& x, int r)
{
    const Tensor<T>& X = x->value;
    require_feature_map(X, "pixel_shuffle");
    if (r < 1 || X.channels() % (r * r) != 0)
        throw DimensionError("pixel_shuffle: channels of " + X.shape_string() +
                             " not divisible by r^2");
    const Shuffle s{X.channels() / (r * r), X.height(), X.width(), r};
    Tensor<T> out({s.c, s.h * r, s.w * r});
    std::size_t k = 0;
    for (int c = 0; c < s.c; ++c)
        for (int y = 0; y < s.h * r; ++y)
            for (int xx = 0; xx < s.w * r; ++xx)
                out[k++] = X[s.source(c, y, xx)];
    return make_node<T>(std::move(out), {x}, [s](Node<T>& n) {
        T* dx = n.parents[0]->ensure_grad().data();
        std::size_t k = 0;
        for (int c = 0; c < s.c; ++c)
            for (int y = 0; y < s.h * s.r; ++y)
                for (int xx = 0; xx < s.w * s.r; ++xx)
                    dx[s.source(c, y, xx)] += n.grad[k++];
    });
}

template <typename T>
Var<T> pixel_unshuffle(const Var<T>& x, int r)
{
    const Tensor<T>& X = x->value;
    require_feature_map(X, "pixel_unshuffle");
    if (r < 1 || X.height() % r != 0 || X.width() % r != 0)
        throw DimensionError("pixel_unshuffle: size of " + X.shape_string() +
                             " not divisible by r");
    const Shuffle s{X.channels(), X.height() / r, X.width() / r, r};
    Tensor<T> out({s.c * r * r, s.h, s.w});
    std::size_t k = 0;
    for (int c = 0; c < s.c; ++c)
        for (int y = 0; y < s.h * r; ++y)
            for (int xx = 0; xx < s.w * r; ++xx)
                out[s.source(c, y, xx)] = X[k++];
    return make_node<T>(std::move(out), {x}, [s](Node<T>& n) {
        T* dx = n.parents[0]->ensure_grad().data();
        std::size_t k = 0;
        for (int c = 0; c < s.c; ++c)
            for (int y = 0; y < s.h * s.r; ++y)
                for (int xx = 0; xx < s.w * s.r; ++xx)
                    dx[k++] += n.grad[s.source(c, y, xx)];
    });
}

namespace {

struct Bilinear {
    int x0, y0, x1, y1;
    double ax, ay;
};

}  // namespace

template <typename T>
Var<T> warp(const Var<T>& x, const Tensor<T>& flow)
{
    const Tensor<T>& X = x->value;
    require_feature_map(X, "warp");
    if (flow.rank() != 3 || flow.channels() != 2 || flow.height() != X.height() ||
        flow.width() != X.width())
        throw DimensionError("warp: flow " + flow.shape_string() + " does not match " +
                             X.shape_string());
    const int h = X.height(), w = X.width(), ch = X.channels();
    const std::size_t plane = X.plane();
    auto taps = std::make_shared<std::vector<Bilinear>>(plane);
    for (int y = 0; y < h; ++y)
        for (int xx = 0; xx < w; ++xx) {
            const std::size_t p = std::size_t(y) * w + xx;
            const double sx = std::clamp(xx + double(flow[p]), 0.0, double(w - 1));
            const double sy = std::clamp(y + double(flow[plane + p]), 0.0, double(h - 1));
            Bilinear b;
            b.x0 = std::min(int(sx), w - 1);
            b.y0 = std::min(int(sy), h - 1);
            b.x1 = std::min(b.x0 + 1, w - 1);
            b.y1 = std::min(b.y0 + 1, h - 1);
            b.ax = sx - b.x0;
            b.ay = sy - b.y0;
            (*taps)[p] = b;
        }
    Tensor<T> out(X.shape());
    for (int c = 0; c < ch; ++c) {
        const T* src = X.data() + c * plane;
        T* dst = out.data() + c * plane;
        for (std::size_t p = 0; p < plane; ++p) {
            const Bilinear& b = (*taps)[p];
            dst[p] = T((1 - b.ay) * ((1 - b.ax) * src[b.y0 * w + b.x0] + b.ax * src[b.y0 * w + b.x1]) +
                       b.ay * ((1 - b.ax) * src[b.y1 * w + b.x0] + b.ax * src[b.y1 * w + b.x1]));
        }
    }
    return make_node<T>(std::move(out), {x}, [taps, w, ch, plane](Node<T>& n) {
        T* dx = n.parents[0]->ensure_grad().data();
        for (int c = 0; c < ch; ++c) {
            T* d = dx + c * plane;
            const T* g = n.grad.data() + c * plane;
            for (std::size_t p = 0; p < plane; ++p) {
                const Bilinear& b = (*taps)[p];
                d[b.y0 * w + b.x0] += T((1 - b.ay) * (1 - b.ax)) * g[p];
                d[b.y0 * w + b.x1] += T((1 - b.ay) * b.ax) * g[p];
                d[b.y1 * w + b.x0] += T(b.ay * (1 - b.ax)) * g[p];
                d[b.y1 * w + b.x1] += T(b.ay * b.ax) * g[p];
            }
        }
    });
}

template <typename T>
Var<T> l2_loss(const Var<T>& pred, const Tensor<T>& target)
{
    require_same(pred->value, target, "l2_loss");
    const std::size_t n = target.numel();
    if (n == 0)
        throw DimensionError("l2_loss: empty tensors");
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = double(pred->value[i]) - double(target[i]);
        s += d * d;
    }
    Tensor<T> out({1}, T(s / double(n)));
    return make_node<T>(std::move(out), {pred}, [target, n](Node<T>& node) {
        const T* p = node.parents[0]->value.data();
        T* dp = node.parents[0]->ensure_grad().data();
        const T k = T(2) * node.grad[0] / T(n);
        for (std::size_t i = 0; i < n; ++i)
            dp[i] += k * (p[i] - target[i]);
    });
}

template <typename T>
Var<T> deformable_conv(const Var<T>& x, const Var<T>& weight, const Tensor<T>& flow,
                       const Var<T>& offsets)
{
    const Tensor<T>& X = x->value;
    const Tensor<T>& K = weight->value;
    const Tensor<T>& D = offsets->value;
    require_feature_map(X, "deformable_conv");
    const int ci = X.channels(), h = X.height(), w = X.width();
    if (K.rank() != 4 || K.dim(1) != ci || K.dim(2) != 3 || K.dim(3) != 3)
        throw DimensionError("deformable_conv: kernel " + K.shape_string() +
                             " does not match input " + X.shape_string());
    if (flow.rank() != 3 || flow.channels() != 2 || flow.height() != h || flow.width() != w)
        throw DimensionError("deformable_conv: flow " + flow.shape_string() +
                             " does not match input " + X.shape_string());
    if (D.rank() != 3 || D.channels() != 18 || D.height() != h || D.width() != w)
        throw DimensionError("deformable_conv: offsets " + D.shape_string() +
                             " must be (18," + std::to_string(h) + "," + std::to_string(w) + ")");
    const int co = K.dim(0);
    const std::size_t plane = X.plane();

    struct State {
        std::vector<int> x0, y0;
        std::vector<T> ax, ay;
        std::vector<T> columns;  // (ci, 9, plane)
    };
    auto st = std::make_shared<State>();
    st->x0.resize(9 * plane);
    st->y0.resize(9 * plane);
    st->ax.resize(9 * plane);
    st->ay.resize(9 * plane);
    for (int t = 0; t < 9; ++t) {
        const int kx = t % 3 - 1, ky = t / 3 - 1;
        for (int y = 0; y < h; ++y)
            for (int xx = 0; xx < w; ++xx) {
                const std::size_t p = std::size_t(y) * w + xx;
                const T sx = T(xx + kx) + flow[p] + D[(2 * t) * plane + p];
                const T sy = T(y + ky) + flow[plane + p] + D[(2 * t + 1) * plane + p];
                const T fx = std::floor(sx), fy = std::floor(sy);
                st->x0[t * plane + p] = int(fx);
                st->y0[t * plane + p] = int(fy);
                st->ax[t * plane + p] = sx - fx;
                st->ay[t * plane + p] = sy - fy;
            }
    }

    auto fetch = [h, w](const T* src, int yy, int xx) -> T {
        return (yy >= 0 && yy < h && xx >= 0 && xx < w) ? src[yy * w + xx] : T(0);
    };

    st->columns.assign(std::size_t(ci) * 9 * plane, T(0));
#pragma omp parallel for schedule(static)
    for (int i = 0; i < ci; ++i) {
        const T* src = X.data() + i * plane;
        for (int t = 0; t < 9; ++t) {
            T* col = st->columns.data() + (std::size_t(i) * 9 + t) * plane;
            for (std::size_t p = 0; p < plane; ++p) {
                const std::size_t q = t * plane + p;
                const int x0 = st->x0[q], y0 = st->y0[q];
                const T ax = st->ax[q], ay = st->ay[q];
                col[p] = (1 - ay) * ((1 - ax) * fetch(src, y0, x0) + ax * fetch(src, y0, x0 + 1)) +
                         ay * ((1 - ax) * fetch(src, y0 + 1, x0) + ax * fetch(src, y0 + 1, x0 + 1));
            }
        }
    }

    Tensor<T> out({co, h, w});
    const Eigen::Index taps = Eigen::Index(ci) * 9, P = Eigen::Index(plane);
    MatMap<T>(out.data(), co, P).noalias() =
        ConstMatMap<T>(K.data(), co, taps) * ConstMatMap<T>(st->columns.data(), taps, P);

    return make_node<T>(
        std::move(out), {x, weight, offsets},
        [st, ci, co, h, w, plane, fetch](Node<T>& n) {
            const Eigen::Index taps = Eigen::Index(ci) * 9, P = Eigen::Index(plane);
            ConstMatMap<T> G(n.grad.data(), co, P);
            ConstMatMap<T> S(st->columns.data(), taps, P);
            if (wants_grad(n, 1))
                MatMap<T>(n.parents[1]->ensure_grad().data(), co, taps).noalias() +=
                    G * S.transpose();
            const bool need_x = wants_grad(n, 0), need_off = wants_grad(n, 2);
            if (!need_x && !need_off)
                return;
            std::vector<T> dcol(std::size_t(taps * P));
            MatMap<T>(dcol.data(), taps, P).noalias() =
                ConstMatMap<T>(n.parents[1]->value.data(), co, taps).transpose() * G;
            const T* X = n.parents[0]->value.data();
            if (need_x) {
                T* dx = n.parents[0]->ensure_grad().data();
                auto scatter = [h, w](T* dst, int yy, int xx, T v) {
                    if (yy >= 0 && yy < h && xx >= 0 && xx < w)
                        dst[yy * w + xx] += v;
                };
#pragma omp parallel for schedule(static)
                for (int i = 0; i < ci; ++i) {
                    T* d = dx + i * plane;
                    for (int t = 0; t < 9; ++t) {
                        const T* dc = dcol.data() + (std::size_t(i) * 9 + t) * plane;
                        for (std::size_t p = 0; p < plane; ++p) {
                            const std::size_t q = t * plane + p;
                            const int x0 = st->x0[q], y0 = st->y0[q];
                            const T ax = st->ax[q], ay = st->ay[q], v = dc[p];
                            scatter(d, y0, x0, (1 - ay) * (1 - ax) * v);
                            scatter(d, y0, x0 + 1, (1 - ay) * ax * v);
                            scatter(d, y0 + 1, x0, ay * (1 - ax) * v);
                            scatter(d, y0 + 1, x0 + 1, ay * ax * v);
                        }
                    }
                }
            }
            if (need_off) {
                T* doff = n.parents[2]->ensure_grad().data();
#pragma omp parallel for schedule(static)
                for (int t = 0; t < 9; ++t) {
                    T* dxo = doff + (2 * t) * plane;
                    T* dyo = doff + (2 * t + 1) * plane;
                    for (int i = 0; i < ci; ++i) {
                        const T* src = X + i * plane;
                        const T* dc = dcol.data() + (std::size_t(i) * 9 + t) * plane;
                        for (std::size_t p = 0; p < plane; ++p) {
                            const std::size_t q = t * plane + p;
                            const int x0 = st->x0[q], y0 = st->y0[q];
                            const T ax = st->ax[q], ay = st->ay[q];
                            const T f00 = fetch(src, y0, x0), f01 = fetch(src, y0, x0 + 1);
                            const T f10 = fetch(src, y0 + 1, x0), f11 = fetch(src, y0 + 1, x0 + 1);
                            dxo[p] += dc[p] * ((1 - ay) * (f01 - f00) + ay * (f11 - f10));
                            dyo[p] += dc[p] * ((1 - ax) * (f10 - f00) + ax * (f11 - f01));
                        }
                    }
                }
            }
        });
}

#define MSDC_INSTANTIATE(T)                                                                   \
    template Var<T> conv2d<T>(const Var<T>&, const Var<T>&, const Var<T>&, int, int);         \
    template Var<T> add<T>(const Var<T>&, const Var<T>&);                                     \
    template Var<T> scale<T>(const Var<T>&, T);                                               \
    template Var<T> concat_channels<T>(const std::vector<Var<T>>&);                           \
    template Var<T> simple_gate<T>(const Var<T>&);                                            \
    template Var<T> leaky_relu<T>(const Var<T>&, T);                                          \
    template Var<T> bounded_tanh<T>(const Var<T>&, T);                                        \
    template Var<T> pixel_shuffle<T>(const Var<T>&, int);                                     \
    template Var<T> pixel_unshuffle<T>(const Var<T>&, int);                                   \
    template Var<T> warp<T>(const Var<T>&, const Tensor<T>&);                                 \
    template Var<T> l2_loss<T>(const Var<T>&, const Tensor<T>&);                              \
    template Var<T> deformable_conv<T>(const Var<T>&, const Var<T>&, const Tensor<T>&,        \
                                       const Var<T>&);

MSDC_INSTANTIATE(float)
MSDC_INSTANTIATE(double)
#undef MSDC_INSTANTIATE

}  // namespace msdc::nn
