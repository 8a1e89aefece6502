#pragma once

#include <array>
#include <cstdint>

#include "texsmooth/nn/layers.hpp"
#include "texsmooth/nn/params.hpp"
#include "texsmooth/tensor.hpp"

namespace texsmooth::models {

/// Guided filtering network: RGB + structure + texture guidance (5 channels)
/// through 7x7, 5x5, 3x3 ReLU convs and a linear 5x5 conv to RGB.
struct TsafnConfig {
  std::array<int, 3> widths = {32, 16, 8};

  static constexpr std::array<int, 4> kKernels = {7, 5, 3, 5};
  static constexpr int kInputChannels = 5;
};

template <typename T>
struct TsafnGrads {
  BasicTensor<T> rgb;
  BasicTensor<T> structure;
  BasicTensor<T> texture;
};

template <typename T>
class Tsafn {
 public:
  struct Cache {
    BasicTensor<T> input;
    std::array<BasicTensor<T>, 4> pre;
    std::array<BasicTensor<T>, 3> act;
  };

  explicit Tsafn(const TsafnConfig& cfg = {}, std::uint64_t seed = 3);

  /// Raw (unclamped) RGB output.
  BasicTensor<T> forward(const BasicTensor<T>& rgb, const BasicTensor<T>& structure, const BasicTensor<T>& texture,
                         Cache* cache = nullptr) const;

  TsafnGrads<T> backward(const Cache& cache, const BasicTensor<T>& grad_out);

  const TsafnConfig& config() const { return cfg_; }
  nn::ModelParams<T>& params() { return params_; }
  const nn::ModelParams<T>& params() const { return params_; }

  template <typename U>
  Tsafn<U> cast() const {
    Tsafn<U> out(cfg_, 0);
    out.params() = params_.template cast<U>();
    return out;
  }

 private:
  TsafnConfig cfg_;
  nn::ModelParams<T> params_;
  std::array<nn::ConvLayer, 4> layers_;
};

extern template class Tsafn<float>;
extern template class Tsafn<double>;

}  // namespace texsmooth::models
