#pragma once

#include "texsmooth/tensor.hpp"

namespace texsmooth::nn {

template <typename T>
struct LossResult {
  double value = 0.0;
  BasicTensor<T> grad;  // d value / d pred
};

/// (1/N) sum_i ||pred_i - gt_i||^2 with N = n*h*w pixels; channels are summed
/// inside the per-pixel norm.
template <typename T>
LossResult<T> mse_loss(const BasicTensor<T>& pred, const BasicTensor<T>& gt);

enum class Reduction {
  kSum,           // plain sum over pixels
  kMeanPerPixel,  // sum divided by the element count
};

inline constexpr double kBceEpsilon = 1e-7;

/// Class-balanced binary cross entropy with beta = |E+| / |E| taken from gt:
///   -beta * sum_{gt=1} log(p) - (1 - beta) * sum_{gt=0} log(1 - p)
/// p is clamped to [eps, 1-eps]. gt must be {0,1}-valued.
template <typename T>
LossResult<T> weighted_bce_loss(const BasicTensor<T>& pred, const BasicTensor<T>& gt,
                                Reduction reduction = Reduction::kSum);

struct LossWeights {
  double gamma = 0.6;
  double lambda = 0.2;
};

/// gamma * l_d + lambda * (l_t + l_e)
double combined_finetune_loss(double l_d, double l_t, double l_e, const LossWeights& w = {});

}  // namespace texsmooth::nn
