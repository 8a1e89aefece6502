#pragma once

#include <array>
#include <cstdint>

#include "texsmooth/nn/layers.hpp"
#include "texsmooth/nn/params.hpp"
#include "texsmooth/tensor.hpp"

namespace texsmooth::models {

/// Texture prediction network: four scale branches (1, 1/2, 1/4, 1/8), three
/// 3x3 ReLU convs each, upsampled back, concatenated and fused by one 3x3
/// conv with a sigmoid.
struct TpnConfig {
  std::array<int, 3> branch_widths = {8, 8, 4};

  static constexpr int kScales = 4;
  int concat_channels() const { return kScales * branch_widths[2]; }
};

template <typename T>
class Tpn {
 public:
  struct Branch {
    BasicTensor<T> input;
    std::array<BasicTensor<T>, 3> pre;
    std::array<BasicTensor<T>, 3> act;
    BasicTensor<T> upsampled;
  };
  struct Cache {
    int h = 0;
    int w = 0;
    std::array<Branch, TpnConfig::kScales> branches;
    BasicTensor<T> concat;
    BasicTensor<T> output;
  };

  explicit Tpn(const TpnConfig& cfg = {}, std::uint64_t seed = 1);

  /// x: (n,3,h,w) with h, w divisible by 8. Returns (n,1,h,w) in (0,1).
  BasicTensor<T> forward(const BasicTensor<T>& x, Cache* cache = nullptr) const;

  /// Accumulates parameter gradients; returns d loss / d x.
  BasicTensor<T> backward(const Cache& cache, const BasicTensor<T>& grad_out);

  const TpnConfig& config() const { return cfg_; }
  nn::ModelParams<T>& params() { return params_; }
  const nn::ModelParams<T>& params() const { return params_; }

  template <typename U>
  Tpn<U> cast() const {
    Tpn<U> out(cfg_, 0);
    out.params() = params_.template cast<U>();
    return out;
  }

 private:
  TpnConfig cfg_;
  nn::ModelParams<T> params_;
  std::array<std::array<nn::ConvLayer, 3>, TpnConfig::kScales> branches_;
  nn::ConvLayer fusion_;
};

extern template class Tpn<float>;
extern template class Tpn<double>;

}  // namespace texsmooth::models
