#include "texsmooth/nn/loss.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace texsmooth::nn {

template <typename T>
LossResult<T> mse_loss(const BasicTensor<T>& pred, const BasicTensor<T>& gt) {
  if (!pred.same_shape(gt)) {
    throw std::invalid_argument("mse_loss: shape " + shape_string(pred.shape()) + " vs " + shape_string(gt.shape()));
  }
  const double pixels = static_cast<double>(pred.n()) * pred.h() * pred.w();
  if (pixels == 0) throw std::invalid_argument("mse_loss: empty tensor");
  LossResult<T> r{0.0, BasicTensor<T>(pred.n(), pred.c(), pred.h(), pred.w())};
  double sum = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double d = static_cast<double>(pred[i]) - gt[i];
    sum += d * d;
    r.grad[i] = static_cast<T>(2.0 * d / pixels);
  }
  r.value = sum / pixels;
  return r;
}

template <typename T>
LossResult<T> weighted_bce_loss(const BasicTensor<T>& pred, const BasicTensor<T>& gt, Reduction reduction) {
  if (!pred.same_shape(gt)) {
    throw std::invalid_argument("weighted_bce_loss: shape " + shape_string(pred.shape()) + " vs " +
                                shape_string(gt.shape()));
  }
  if (pred.size() == 0) throw std::invalid_argument("weighted_bce_loss: empty tensor");
  std::size_t positives = 0;
  for (T v : gt.values()) {
    if (v == T(1)) {
      ++positives;
    } else if (v != T(0)) {
      throw std::invalid_argument("weighted_bce_loss: ground truth must be binary");
    }
  }
  const double beta = static_cast<double>(positives) / gt.size();
  const double scale = reduction == Reduction::kSum ? 1.0 : 1.0 / gt.size();

  LossResult<T> r{0.0, BasicTensor<T>(pred.n(), pred.c(), pred.h(), pred.w())};
  double sum = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double p = std::clamp(static_cast<double>(pred[i]), kBceEpsilon, 1.0 - kBceEpsilon);
    if (gt[i] == T(1)) {
      sum -= beta * std::log(p);
      r.grad[i] = static_cast<T>(-beta / p * scale);
    } else {
      sum -= (1.0 - beta) * std::log(1.0 - p);
      r.grad[i] = static_cast<T>((1.0 - beta) / (1.0 - p) * scale);
    }
  }
  r.value = sum * scale;
  return r;
}

double combined_finetune_loss(double l_d, double l_t, double l_e, const LossWeights& w) {
  return w.gamma * l_d + w.lambda * (l_t + l_e);
}

template LossResult<float> mse_loss(const BasicTensor<float>&, const BasicTensor<float>&);
template LossResult<double> mse_loss(const BasicTensor<double>&, const BasicTensor<double>&);
template LossResult<float> weighted_bce_loss(const BasicTensor<float>&, const BasicTensor<float>&, Reduction);
template LossResult<double> weighted_bce_loss(const BasicTensor<double>&, const BasicTensor<double>&, Reduction);

}  // namespace texsmooth::nn
