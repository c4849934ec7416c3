#pragma once

#include <cassert>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace bunow {

// Dense row-major tensor. Production code runs on float; gradient checks
// instantiate the same ops on double.
template <typename T>
class TensorT {
public:
    TensorT() = default;

    explicit TensorT(std::vector<int> shape) : shape_(std::move(shape)) {
        data_.assign(numel_from_shape(shape_), T{0});
    }

    TensorT(std::vector<int> shape, std::vector<T> data)
        : shape_(std::move(shape)), data_(std::move(data)) {
        if (data_.size() != numel_from_shape(shape_)) {
            throw std::invalid_argument("tensor data length does not match shape");
        }
    }

    static TensorT zeros(std::vector<int> shape) { return TensorT(std::move(shape)); }

    static TensorT full(std::vector<int> shape, T value) {
        TensorT t(std::move(shape));
        std::fill(t.data_.begin(), t.data_.end(), value);
        return t;
    }

    const std::vector<int>& shape() const { return shape_; }
    int dim(size_t i) const { return shape_.at(i); }
    size_t rank() const { return shape_.size(); }
    size_t numel() const { return data_.size(); }

    T* data() { return data_.data(); }
    const T* data() const { return data_.data(); }
    std::vector<T>& vec() { return data_; }
    const std::vector<T>& vec() const { return data_; }

    T& operator[](size_t i) { return data_[i]; }
    const T& operator[](size_t i) const { return data_[i]; }

    T& at2(int i, int j) {
        assert(rank() == 2);
        return data_[static_cast<size_t>(i) * shape_[1] + j];
    }
    const T& at2(int i, int j) const {
        assert(rank() == 2);
        return data_[static_cast<size_t>(i) * shape_[1] + j];
    }

    T& at4(int n, int c, int h, int w) {
        assert(rank() == 4);
        return data_[((static_cast<size_t>(n) * shape_[1] + c) * shape_[2] + h) * shape_[3] + w];
    }
    const T& at4(int n, int c, int h, int w) const {
        assert(rank() == 4);
        return data_[((static_cast<size_t>(n) * shape_[1] + c) * shape_[2] + h) * shape_[3] + w];
    }

    // Reinterprets the buffer with a new shape of equal element count.
    TensorT reshaped(std::vector<int> shape) const {
        if (numel_from_shape(shape) != data_.size()) {
            throw std::invalid_argument("reshape changes element count");
        }
        TensorT t;
        t.shape_ = std::move(shape);
        t.data_ = data_;
        return t;
    }

    bool all_finite() const {
        for (const T& v : data_) {
            if (!std::isfinite(static_cast<double>(v))) return false;
        }
        return true;
    }

    bool same_shape(const TensorT& other) const { return shape_ == other.shape_; }

    static size_t numel_from_shape(const std::vector<int>& shape) {
        size_t n = 1;
        for (int e : shape) {
            if (e <= 0) throw std::invalid_argument("non-positive tensor extent");
            n *= static_cast<size_t>(e);
        }
        return n;
    }

private:
    std::vector<int> shape_;
    std::vector<T> data_;
};

using Tensor = TensorT<float>;

template <typename T>
std::string shape_string(const TensorT<T>& t) {
    std::string s = "(";
    for (size_t i = 0; i < t.shape().size(); ++i) {
        if (i) s += ", ";
        s += std::to_string(t.shape()[i]);
    }
    s += ")";
    return s;
}

}  // namespace bunow
