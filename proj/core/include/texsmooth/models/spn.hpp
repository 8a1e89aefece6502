#pragma once

#include <array>
#include <cstdint>

#include "texsmooth/nn/layers.hpp"
#include "texsmooth/nn/params.hpp"
#include "texsmooth/tensor.hpp"

namespace texsmooth::models {

/// Reduced HED-style edge network: three stages at 1, 1/2 and 1/4 resolution
/// (two 3x3 ReLU convs each, the first of stages 2 and 3 with stride 2), a
/// 1x1 side output per stage upsampled to the input size, and a 1x1 fusion
/// over the concatenated side logits.
struct SpnConfig {
  std::array<int, 3> widths = {8, 16, 32};

  static constexpr int kStages = 3;
};

template <typename T>
struct SpnOutput {
  BasicTensor<T> fused;
  std::array<BasicTensor<T>, SpnConfig::kStages> sides;
};

template <typename T>
class Spn {
 public:
  struct Stage {
    BasicTensor<T> pre_a, act_a, pre_b, act_b;
    BasicTensor<T> side_logit;     // at stage resolution
    BasicTensor<T> side_logit_up;  // at input resolution
  };
  struct Cache {
    BasicTensor<T> input;
    std::array<Stage, SpnConfig::kStages> stages;
    BasicTensor<T> concat;
    SpnOutput<T> out;
  };

  explicit Spn(const SpnConfig& cfg = {}, std::uint64_t seed = 2);

  /// x: (n,3,h,w) with h, w divisible by 4.
  SpnOutput<T> forward(const BasicTensor<T>& x, Cache* cache = nullptr) const;

  /// Gradients w.r.t. the fused map and each side map (post-sigmoid). Empty
  /// side tensors count as zero.
  BasicTensor<T> backward(const Cache& cache, const BasicTensor<T>& grad_fused,
                          const std::array<BasicTensor<T>, SpnConfig::kStages>& grad_sides);

  const SpnConfig& config() const { return cfg_; }
  nn::ModelParams<T>& params() { return params_; }
  const nn::ModelParams<T>& params() const { return params_; }

  template <typename U>
  Spn<U> cast() const {
    Spn<U> out(cfg_, 0);
    out.params() = params_.template cast<U>();
    return out;
  }

 private:
  SpnConfig cfg_;
  nn::ModelParams<T> params_;
  std::array<nn::ConvLayer, SpnConfig::kStages> conv_a_;
  std::array<nn::ConvLayer, SpnConfig::kStages> conv_b_;
  std::array<nn::ConvLayer, SpnConfig::kStages> side_;
  nn::ConvLayer fusion_;
};

extern template class Spn<float>;
extern template class Spn<double>;

}  // namespace texsmooth::models
