#pragma once

#include <cstddef>

namespace msdc::nn::detail {

template <typename T>
inline void axpy(T* __restrict y, const T* __restrict x, T a, std::ptrdiff_t n)
{
    for (std::ptrdiff_t i = 0; i < n; ++i)
        y[i] += a * x[i];
}

// Fixed 8-lane accumulation keeps the summation order independent of the
// thread count while still vectorizing.
template <typename T>
inline T dot(const T* __restrict a, const T* __restrict b, std::ptrdiff_t n)
{
    T lanes[8] = {};
    std::ptrdiff_t i = 0;
    for (; i + 8 <= n; i += 8)
        for (int j = 0; j < 8; ++j)
            lanes[j] += a[i + j] * b[i + j];
    T tail = 0;
    for (; i < n; ++i)
        tail += a[i] * b[i];
    return ((lanes[0] + lanes[4]) + (lanes[1] + lanes[5])) +
           ((lanes[2] + lanes[6]) + (lanes[3] + lanes[7])) + tail;
}

}  // namespace msdc::nn::detail
