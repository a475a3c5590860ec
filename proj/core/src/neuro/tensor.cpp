#include "msdc/neuro/tensor.hpp"

#include <algorithm>
#include <functional>
#include <numeric>

#include "msdc/error.hpp"

namespace msdc::nn {

namespace {

std::size_t count(const std::vector<int>& shape)
{
    std::size_t n = 1;
    for (int d : shape) {
        if (d < 0)
            throw DimensionError("tensor: negative dimension");
        n *= std::size_t(d);
    }
    return n;
}

}  // namespace

template <typename T>
Tensor<T>::Tensor(std::vector<int> shape, T fill)
    : shape_(std::move(shape)), data_(count(shape_), fill)
{
}

template <typename T>
Tensor<T>::Tensor(std::vector<int> shape, std::vector<T> values)
    : shape_(std::move(shape)), data_(std::move(values))
{
    if (data_.size() != count(shape_))
        throw DimensionError("tensor: value count does not match shape " + shape_string());
}

template <typename T>
void Tensor<T>::fill(T v)
{
    std::fill(data_.begin(), data_.end(), v);
}

template <typename T>
std::string Tensor<T>::shape_string() const
{
    std::string s = "(";
    for (std::size_t i = 0; i < shape_.size(); ++i) {
        if (i)
            s += ",";
        s += std::to_string(shape_[i]);
    }
    return s + ")";
}

template <typename T>
Tensor<T> Tensor<T>::crop(int y0, int x0, int h, int w) const
{
    if (rank() != 3 || y0 < 0 || x0 < 0 || y0 + h > height() || x0 + w > width())
        throw DimensionError("tensor crop outside " + shape_string());
    Tensor out({channels(), h, w});
    for (int c = 0; c < channels(); ++c)
        for (int y = 0; y < h; ++y)
            std::copy_n(&data_[(std::size_t(c) * height() + y0 + y) * width() + x0], w,
                        &out.data_[(std::size_t(c) * h + y) * w]);
    return out;
}

template class Tensor<float>;
template class Tensor<double>;

}  // namespace msdc::nn
