#pragma once

#include <vector>

#include "msdc/neuro/graph.hpp"

namespace msdc::nn {

/// Cross-correlation with zero padding. x: (Ci, H, W), weight: (Co, Ci, kh, kw),
/// bias: (Co) or null.
template <typename T>
Var<T> conv2d(const Var<T>& x, const Var<T>& weight, const Var<T>& bias, int stride = 1,
              int pad = 0);

template <typename T>
Var<T> add(const Var<T>& a, const Var<T>& b);

template <typename T>
Var<T> scale(const Var<T>& x, T factor);

/// Concatenates (C_i, H, W) tensors along channels. Null entries are skipped.
template <typename T>
Var<T> concat_channels(const std::vector<Var<T>>& parts);

/// First half of the channels times the second half.
template <typename T>
Var<T> simple_gate(const Var<T>& x);

template <typename T>
Var<T> leaky_relu(const Var<T>& x, T slope = T(0.2));

/// bound * tanh(x)
template <typename T>
Var<T> bounded_tanh(const Var<T>& x, T bound);

/// (C*r*r, H, W) -> (C, rH, rW) with out[c][y*r+i][x*r+j] = in[c*r*r + i*r + j][y][x].
template <typename T>
Var<T> pixel_shuffle(const Var<T>& x, int r);

/// Inverse of pixel_shuffle.
template <typename T>
Var<T> pixel_unshuffle(const Var<T>& x, int r);

/// Bilinear backward warp out(p) = x(p + flow(p)) with edge clamping.
/// flow: (2, H, W), channel 0 horizontal, channel 1 vertical; no gradient to flow.
template <typename T>
Var<T> warp(const Var<T>& x, const Tensor<T>& flow);

/// Mean squared error; returns a scalar node.
template <typename T>
Var<T> l2_loss(const Var<T>& pred, const Tensor<T>& target);

/// Sampling-grid convolution: for every output pixel p and 3x3 tap i,
/// bilinearly samples x at p + flow(p) + i + offsets(p, i) (zero outside) and
/// contracts with weight (Co, Ci, 3, 3). offsets: (18, H, W), channel 2t is the
/// horizontal and 2t+1 the vertical displacement of tap t = ky*3 + kx.
/// Gradients flow to x, weight and offsets.
template <typename T>
Var<T> deformable_conv(const Var<T>& x, const Var<T>& weight, const Tensor<T>& flow,
                       const Var<T>& offsets);

}  // namespace msdc::nn
