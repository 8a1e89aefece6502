#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "texsmooth/image.hpp"

namespace texsmooth {

/// Dense N x C x H x W array (planar, row-major within a plane).
template <typename T>
class BasicTensor {
 public:
  using value_type = T;

  BasicTensor() = default;
  BasicTensor(int n, int c, int h, int w, T fill = T(0)) : n_(n), c_(c), h_(h), w_(w) {
    if (n < 0 || c < 0 || h < 0 || w < 0) throw std::invalid_argument("negative tensor dimension");
    data_.assign(static_cast<std::size_t>(n) * c * h * w, fill);
  }
  BasicTensor(int n, int c, int h, int w, std::vector<T> data)
      : n_(n), c_(c), h_(h), w_(w), data_(std::move(data)) {
    if (data_.size() != static_cast<std::size_t>(n) * c * h * w) {
      throw std::invalid_argument("tensor data length does not match dimensions");
    }
  }

  int n() const { return n_; }
  int c() const { return c_; }
  int h() const { return h_; }
  int w() const { return w_; }
  std::array<int, 4> shape() const { return {n_, c_, h_, w_}; }
  std::size_t size() const { return data_.size(); }
  std::size_t plane() const { return static_cast<std::size_t>(h_) * w_; }

  T* data() { return data_.data(); }
  const T* data() const { return data_.data(); }
  std::span<T> values() { return data_; }
  std::span<const T> values() const { return data_; }

  T& operator[](std::size_t i) { return data_[i]; }
  const T& operator[](std::size_t i) const { return data_[i]; }

  std::size_t offset(int in, int ic, int iy, int ix) const {
    return ((static_cast<std::size_t>(in) * c_ + ic) * h_ + iy) * w_ + ix;
  }
  T& at(int in, int ic, int iy, int ix) { return data_[offset(in, ic, iy, ix)]; }
  const T& at(int in, int ic, int iy, int ix) const { return data_[offset(in, ic, iy, ix)]; }

  /// Pointer to the (n, c) plane.
  T* plane_ptr(int in, int ic) { return data_.data() + offset(in, ic, 0, 0); }
  const T* plane_ptr(int in, int ic) const { return data_.data() + offset(in, ic, 0, 0); }

  bool same_shape(const BasicTensor& o) const { return shape() == o.shape(); }

  void fill(T v) { std::fill(data_.begin(), data_.end(), v); }

  template <typename U>
  BasicTensor<U> cast() const {
    return BasicTensor<U>(n_, c_, h_, w_, std::vector<U>(data_.begin(), data_.end()));
  }

  friend bool operator==(const BasicTensor&, const BasicTensor&) = default;

 private:
  int n_ = 0;
  int c_ = 0;
  int h_ = 0;
  int w_ = 0;
  std::vector<T> data_;
};

using Tensor = BasicTensor<float>;
using TensorD = BasicTensor<double>;

std::string shape_string(const std::array<int, 4>& shape);

/// Throws std::domain_error on NaN or Inf.
template <typename T>
void require_finite(const BasicTensor<T>& t, const char* what);

/// Stacks same-shaped images into an N x C x H x W tensor.
Tensor image_to_tensor(std::span<const Image> imgs);
inline Tensor image_to_tensor(const Image& img) { return image_to_tensor(std::span<const Image>(&img, 1)); }

/// Extracts batch entry `index` as an image. Values must already lie in [0,1].
Image tensor_to_image(const Tensor& t, int index);

/// Like tensor_to_image, clamping out-of-range values first.
Image tensor_to_image_clamped(const Tensor& t, int index);

}  // namespace texsmooth
