#include "texsmooth/nn/params.hpp"

#include <stdexcept>

namespace texsmooth::nn {

template <typename T>
std::size_t ModelParams<T>::add(std::string name, BasicTensor<T> init) {
  if (find(name) != params_.size()) throw std::invalid_argument("duplicate parameter name: " + name);
  Parameter<T> p;
  p.grad = BasicTensor<T>(init.n(), init.c(), init.h(), init.w());
  p.momentum = BasicTensor<T>(init.n(), init.c(), init.h(), init.w());
  p.value = std::move(init);
  p.name = std::move(name);
  params_.push_back(std::move(p));
  return params_.size() - 1;
}

template <typename T>
std::size_t ModelParams<T>::find(const std::string& name) const {
  for (std::size_t i = 0; i < params_.size(); ++i) {
    if (params_[i].name == name) return i;
  }
  return params_.size();
}

template <typename T>
void ModelParams<T>::zero_grad() {
  for (auto& p : params_) p.grad.fill(T(0));
}

template <typename T>
void ModelParams<T>::zero_momentum() {
  for (auto& p : params_) p.momentum.fill(T(0));
}

template <typename T>
std::size_t ModelParams<T>::scalar_count() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += p.value.size();
  return n;
}

template <typename T>
void sgd_momentum_update(BasicTensor<T>& value, const BasicTensor<T>& grad, BasicTensor<T>& velocity, double lr,
                         double momentum) {
  if (!value.same_shape(grad) || !value.same_shape(velocity)) {
    throw std::invalid_argument("sgd_momentum_update: shape mismatch");
  }
  const T m = static_cast<T>(momentum);
  const T step = static_cast<T>(lr);
  for (std::size_t i = 0; i < value.size(); ++i) {
    velocity[i] = m * velocity[i] + grad[i];
    value[i] -= step * velocity[i];
  }
}

template <typename T>
void sgd_momentum_step(ModelParams<T>& params, double lr, double momentum) {
  if (!(lr >= 0.0)) throw std::invalid_argument("learning rate must be non-negative");
  if (!(momentum >= 0.0 && momentum < 1.0)) throw std::invalid_argument("momentum must lie in [0,1)");
  for (auto& p : params) sgd_momentum_update(p.value, p.grad, p.momentum, lr, momentum);
}

template class ModelParams<float>;
template class ModelParams<double>;
template void sgd_momentum_step(ModelParams<float>&, double, double);
template void sgd_momentum_step(ModelParams<double>&, double, double);
template void sgd_momentum_update(BasicTensor<float>&, const BasicTensor<float>&, BasicTensor<float>&, double,
                                  double);
template void sgd_momentum_update(BasicTensor<double>&, const BasicTensor<double>&, BasicTensor<double>&, double,
                                  double);

}  // namespace texsmooth::nn
