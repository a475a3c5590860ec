#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace msdc::nn {

/// Dense row-major tensor. Feature maps use (channels, height, width); kernels
/// use (out_channels, in_channels, kernel_h, kernel_w).
template <typename T>
class Tensor {
public:
    Tensor() = default;
    explicit Tensor(std::vector<int> shape, T fill = T(0));
    Tensor(std::vector<int> shape, std::vector<T> values);

    const std::vector<int>& shape() const noexcept { return shape_; }
    int rank() const noexcept { return int(shape_.size()); }
    int dim(int i) const { return shape_.at(std::size_t(i)); }
    std::size_t numel() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    // (C, H, W) accessors
    int channels() const { return dim(0); }
    int height() const { return dim(1); }
    int width() const { return dim(2); }
    std::size_t plane() const { return std::size_t(dim(1)) * std::size_t(dim(2)); }

    T* data() noexcept { return data_.data(); }
    const T* data() const noexcept { return data_.data(); }
    std::span<T> values() noexcept { return data_; }
    std::span<const T> values() const noexcept { return data_; }
    T& operator[](std::size_t i) { return data_[i]; }
    T operator[](std::size_t i) const { return data_[i]; }

    T& at(int c, int y, int x) { return data_[(std::size_t(c) * dim(1) + y) * dim(2) + x]; }
    T at(int c, int y, int x) const { return data_[(std::size_t(c) * dim(1) + y) * dim(2) + x]; }

    void fill(T v);
    bool same_shape(const Tensor& other) const noexcept { return shape_ == other.shape_; }
    std::string shape_string() const;

    /// Channel-range crop of a (C, H, W) tensor.
    Tensor crop(int y0, int x0, int height, int width) const;

    template <typename U>
    Tensor<U> cast() const
    {
        return Tensor<U>(shape_, std::vector<U>(data_.begin(), data_.end()));
    }

    friend bool operator==(const Tensor&, const Tensor&) = default;

private:
    std::vector<int> shape_;
    std::vector<T> data_;
};

extern template class Tensor<float>;
extern template class Tensor<double>;

}  // namespace msdc::nn
