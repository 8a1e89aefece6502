#pragma once

#include <cmath>
#include <cstddef>
#include <string>

#include "texsmooth/nn/ops.hpp"
#include "texsmooth/nn/params.hpp"
#include "texsmooth/rng.hpp"

namespace texsmooth::nn {

enum class Init {
  kKaiming,  // N(0, 2 / fan_in), for ReLU layers
  kXavier,   // N(0, 2 / (fan_in + fan_out)), for sigmoid or linear outputs
};

/// Convolution bound to a weight/bias pair inside a ModelParams.
struct ConvLayer {
  ConvSpec spec;
  std::size_t weight = 0;
  std::size_t bias = 0;

  template <typename T>
  static ConvLayer create(ModelParams<T>& params, const std::string& name, const ConvSpec& spec, Init init,
                          Rng& rng) {
    spec.validate();
    BasicTensor<T> w(spec.out_channels, spec.in_channels, spec.kernel, spec.kernel);
    const double fan_in = static_cast<double>(spec.in_channels) * spec.kernel * spec.kernel;
    const double fan_out = static_cast<double>(spec.out_channels) * spec.kernel * spec.kernel;
    const double stddev = init == Init::kKaiming ? std::sqrt(2.0 / fan_in) : std::sqrt(2.0 / (fan_in + fan_out));
    for (T& v : w.values()) v = static_cast<T>(stddev * standard_normal(rng));
    ConvLayer layer;
    layer.spec = spec;
    layer.weight = params.add(name + ".w", std::move(w));
    layer.bias = params.add(name + ".b", BasicTensor<T>(1, spec.out_channels, 1, 1));
    return layer;
  }

  template <typename T>
  BasicTensor<T> forward(const ModelParams<T>& params, const BasicTensor<T>& x) const {
    return conv2d_forward(x, spec, params[weight].value, params[bias].value);
  }

  /// Accumulates parameter gradients and returns the input gradient.
  template <typename T>
  BasicTensor<T> backward(ModelParams<T>& params, const BasicTensor<T>& x, const BasicTensor<T>& grad_out) const {
    ConvGrads<T> g = conv2d_backward(x, spec, params[weight].value, grad_out);
    auto& gw = params[weight].grad;
    auto& gb = params[bias].grad;
    for (std::size_t i = 0; i < gw.size(); ++i) gw[i] += g.grad_w[i];
    for (std::size_t i = 0; i < gb.size(); ++i) gb[i] += g.grad_b[i];
    return std::move(g.grad_x);
  }
};

template <typename T>
void add_into(BasicTensor<T>& acc, const BasicTensor<T>& x) {
  for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += x[i];
}

template <typename T>
BasicTensor<T> scaled(BasicTensor<T> x, double s) {
  for (T& v : x.values()) v = static_cast<T>(v * s);
  return x;
}

}  // namespace texsmooth::nn
