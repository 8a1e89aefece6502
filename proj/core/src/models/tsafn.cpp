#include "texsmooth/models/tsafn.hpp"

#include <stdexcept>
#include <string>

#include "texsmooth/nn/ops.hpp"

namespace texsmooth::models {

template <typename T>
Tsafn<T>::Tsafn(const TsafnConfig& cfg, std::uint64_t seed) : cfg_(cfg) {
  Rng rng(seed);
  const std::array<int, 4> outs = {cfg.widths[0], cfg.widths[1], cfg.widths[2], 3};
  int in = TsafnConfig::kInputChannels;
  for (int l = 0; l < 4; ++l) {
    layers_[l] = nn::ConvLayer::create(params_, "tsafn.conv" + std::to_string(l),
                                       nn::ConvSpec{TsafnConfig::kKernels[l], in, outs[l], 1},
                                       l < 3 ? nn::Init::kKaiming : nn::Init::kXavier, rng);
    in = outs[l];
  }
}

template <typename T>
BasicTensor<T> Tsafn<T>::forward(const BasicTensor<T>& rgb, const BasicTensor<T>& structure,
                                 const BasicTensor<T>& texture, Cache* cache) const {
  if (rgb.c() != 3 || structure.c() != 1 || texture.c() != 1) {
    throw std::invalid_argument("tsafn: expected RGB input plus two single-channel guidance maps");
  }
  Cache local;
  Cache& c = cache ? *cache : local;
  c.input = nn::concat_channels<T>({&rgb, &structure, &texture});
  const BasicTensor<T>* in = &c.input;
  for (int l = 0; l < 3; ++l) {
    c.pre[l] = layers_[l].forward(params_, *in);
    c.act[l] = nn::activation_forward(c.pre[l], nn::Activation::kRelu);
    in = &c.act[l];
  }
  c.pre[3] = layers_[3].forward(params_, *in);
  return c.pre[3];
}

template <typename T>
TsafnGrads<T> Tsafn<T>::backward(const Cache& c, const BasicTensor<T>& grad_out) {
  if (!grad_out.same_shape(c.pre[3])) throw std::invalid_argument("tsafn backward: gradient shape mismatch");
  BasicTensor<T> g = layers_[3].backward(params_, c.act[2], grad_out);
  for (int l = 2; l >= 0; --l) {
    g = nn::activation_backward(c.pre[l], c.act[l], g, nn::Activation::kRelu);
    g = layers_[l].backward(params_, l == 0 ? c.input : c.act[l - 1], g);
  }
  auto parts = nn::split_channels(g, {3, 1, 1});
  return {std::move(parts[0]), std::move(parts[1]), std::move(parts[2])};
}

template class Tsafn<float>;
template class Tsafn<double>;

}  // namespace texsmooth::models
