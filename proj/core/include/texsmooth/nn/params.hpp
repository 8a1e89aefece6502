#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "texsmooth/tensor.hpp"

namespace texsmooth::nn {

template <typename T>
struct Parameter {
  std::string name;
  BasicTensor<T> value;
  BasicTensor<T> grad;
  BasicTensor<T> momentum;
};

/// Ordered named parameters with gradient and momentum buffers of matching shape.
template <typename T>
class ModelParams {
 public:
  /// Returns the index of the new parameter. Names must be unique.
  std::size_t add(std::string name, BasicTensor<T> init);

  std::size_t size() const { return params_.size(); }
  Parameter<T>& operator[](std::size_t i) { return params_[i]; }
  const Parameter<T>& operator[](std::size_t i) const { return params_[i]; }
  auto begin() { return params_.begin(); }
  auto end() { return params_.end(); }
  auto begin() const { return params_.begin(); }
  auto end() const { return params_.end(); }

  /// Index of `name`, or size() when absent.
  std::size_t find(const std::string& name) const;

  void zero_grad();
  void zero_momentum();
  std::size_t scalar_count() const;

  template <typename U>
  ModelParams<U> cast() const {
    ModelParams<U> out;
    for (const auto& p : params_) {
      const std::size_t i = out.add(p.name, p.value.template cast<U>());
      out[i].grad = p.grad.template cast<U>();
      out[i].momentum = p.momentum.template cast<U>();
    }
    return out;
  }

 private:
  std::vector<Parameter<T>> params_;
};

/// Classic heavy-ball momentum on every parameter:
///   v <- momentum * v + grad;  p <- p - lr * v
template <typename T>
void sgd_momentum_step(ModelParams<T>& params, double lr, double momentum);

/// Parameter-free form of the same update for a single buffer.
template <typename T>
void sgd_momentum_update(BasicTensor<T>& value, const BasicTensor<T>& grad, BasicTensor<T>& velocity, double lr,
                         double momentum);

}  // namespace texsmooth::nn
