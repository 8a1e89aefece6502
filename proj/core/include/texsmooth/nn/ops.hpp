#pragma once

#include <vector>

#include "texsmooth/tensor.hpp"

namespace texsmooth::nn {

/// k x k convolution with "same" zero padding (k/2 on each side).
struct ConvSpec {
  int kernel = 3;
  int in_channels = 1;
  int out_channels = 1;
  int stride = 1;

  int padding() const { return kernel / 2; }
  /// ceil(in / stride) for odd kernels.
  int out_size(int in) const { return (in + 2 * padding() - kernel) / stride + 1; }
  void validate() const;
};

template <typename T>
struct ConvGrads {
  BasicTensor<T> grad_x;
  BasicTensor<T> grad_w;
  BasicTensor<T> grad_b;
};

/// Cross-correlation. w is (out, in, k, k); b is (1, out, 1, 1).
template <typename T>
BasicTensor<T> conv2d_forward(const BasicTensor<T>& x, const ConvSpec& spec, const BasicTensor<T>& w,
                              const BasicTensor<T>& b);

template <typename T>
ConvGrads<T> conv2d_backward(const BasicTensor<T>& x, const ConvSpec& spec, const BasicTensor<T>& w,
                             const BasicTensor<T>& grad_out);

enum class Activation { kRelu, kSigmoid };

template <typename T>
BasicTensor<T> activation_forward(const BasicTensor<T>& x, Activation kind);

/// Multiplies grad_out by the pointwise derivative. ReLU takes the derivative
/// at exactly 0 as 0 and reads `input`; sigmoid reads `output`.
template <typename T>
BasicTensor<T> activation_backward(const BasicTensor<T>& input, const BasicTensor<T>& output,
                                   const BasicTensor<T>& grad_out, Activation kind);

/// Stacks along the channel axis in argument order.
template <typename T>
BasicTensor<T> concat_channels(const std::vector<const BasicTensor<T>*>& xs);

/// Inverse of concat_channels: splits `grad` into pieces of the given widths.
template <typename T>
std::vector<BasicTensor<T>> split_channels(const BasicTensor<T>& grad, const std::vector<int>& widths);

/// Per-channel bilinear resize (half-pixel centers, clamped edges).
template <typename T>
BasicTensor<T> resize_bilinear_forward(const BasicTensor<T>& x, int out_h, int out_w);

/// Exact adjoint of resize_bilinear_forward.
template <typename T>
BasicTensor<T> resize_bilinear_backward(const BasicTensor<T>& grad_out, int in_h, int in_w);

}  // namespace texsmooth::nn
