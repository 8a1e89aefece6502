#include "texsmooth/tensor.hpp"

#include <algorithm>
#include <cmath>

namespace texsmooth {

std::string shape_string(const std::array<int, 4>& s) {
  return "(" + std::to_string(s[0]) + "," + std::to_string(s[1]) + "," + std::to_string(s[2]) + "," +
         std::to_string(s[3]) + ")";
}

template <typename T>
void require_finite(const BasicTensor<T>& t, const char* what) {
  for (T v : t.values()) {
    if (!std::isfinite(v)) throw std::domain_error(std::string("non-finite value in ") + what);
  }
}

template void require_finite(const BasicTensor<float>&, const char*);
template void require_finite(const BasicTensor<double>&, const char*);

Tensor image_to_tensor(std::span<const Image> imgs) {
  if (imgs.empty()) throw std::invalid_argument("image_to_tensor needs at least one image");
  const Image& first = imgs.front();
  for (const Image& img : imgs) {
    if (!img.same_shape(first)) throw std::invalid_argument("image_to_tensor: mismatched image shapes");
  }
  const int n = static_cast<int>(imgs.size());
  Tensor t(n, first.channels(), first.height(), first.width());
  for (int i = 0; i < n; ++i) {
    const Image& img = imgs[i];
    for (int c = 0; c < img.channels(); ++c) {
      float* dst = t.plane_ptr(i, c);
      for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) *dst++ = img.at(y, x, c);
      }
    }
  }
  return t;
}

namespace {

Image to_image(const Tensor& t, int index, bool clamp) {
  if (index < 0 || index >= t.n()) throw std::invalid_argument("tensor_to_image: index out of range");
  std::vector<float> data(static_cast<std::size_t>(t.h()) * t.w() * t.c());
  for (int c = 0; c < t.c(); ++c) {
    const float* src = t.plane_ptr(index, c);
    for (std::size_t p = 0; p < t.plane(); ++p) data[p * t.c() + c] = src[p];
  }
  if (clamp) return clamp01(t.h(), t.w(), t.c(), std::move(data));
  return Image(t.h(), t.w(), t.c(), std::move(data));
}

}  // namespace

Image tensor_to_image(const Tensor& t, int index) { return to_image(t, index, false); }

Image tensor_to_image_clamped(const Tensor& t, int index) { return to_image(t, index, true); }

}  // namespace texsmooth
