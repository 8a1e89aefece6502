#include "texsmooth/models/tpn.hpp"

#include <stdexcept>
#include <string>

#include "texsmooth/nn/ops.hpp"

namespace texsmooth::models {

template <typename T>
Tpn<T>::Tpn(const TpnConfig& cfg, std::uint64_t seed) : cfg_(cfg) {
  Rng rng(seed);
  for (int s = 0; s < TpnConfig::kScales; ++s) {
    int in = 3;
    for (int l = 0; l < 3; ++l) {
      const nn::ConvSpec spec{3, in, cfg.branch_widths[l], 1};
      branches_[s][l] = nn::ConvLayer::create(
          params_, "tpn.s" + std::to_string(s) + ".conv" + std::to_string(l), spec, nn::Init::kKaiming, rng);
      in = cfg.branch_widths[l];
    }
  }
  fusion_ = nn::ConvLayer::create(params_, "tpn.fuse", nn::ConvSpec{3, cfg.concat_channels(), 1, 1},
                                  nn::Init::kXavier, rng);
}

template <typename T>
BasicTensor<T> Tpn<T>::forward(const BasicTensor<T>& x, Cache* cache) const {
  if (x.c() != 3) throw std::invalid_argument("tpn: expected 3 input channels");
  if (x.h() % 8 != 0 || x.w() % 8 != 0 || x.h() == 0 || x.w() == 0) {
    throw std::invalid_argument("tpn: input height and width must be positive multiples of 8");
  }
  Cache local;
  Cache& c = cache ? *cache : local;
  c.h = x.h();
  c.w = x.w();
  std::vector<const BasicTensor<T>*> parts;
  for (int s = 0; s < TpnConfig::kScales; ++s) {
    Branch& b = c.branches[s];
    b.input = nn::resize_bilinear_forward(x, x.h() >> s, x.w() >> s);
    const BasicTensor<T>* in = &b.input;
    for (int l = 0; l < 3; ++l) {
      b.pre[l] = branches_[s][l].forward(params_, *in);
      b.act[l] = nn::activation_forward(b.pre[l], nn::Activation::kRelu);
      in = &b.act[l];
    }
    b.upsampled = nn::resize_bilinear_forward(b.act[2], x.h(), x.w());
    parts.push_back(&b.upsampled);
  }
  c.concat = nn::concat_channels(parts);
  c.output = nn::activation_forward(fusion_.forward(params_, c.concat), nn::Activation::kSigmoid);
  return c.output;
}

template <typename T>
BasicTensor<T> Tpn<T>::backward(const Cache& c, const BasicTensor<T>& grad_out) {
  if (!grad_out.same_shape(c.output)) throw std::invalid_argument("tpn backward: gradient shape mismatch");
  const auto g_pre = nn::activation_backward(c.output, c.output, grad_out, nn::Activation::kSigmoid);
  const auto g_concat = fusion_.backward(params_, c.concat, g_pre);
  const std::vector<int> widths(TpnConfig::kScales, cfg_.branch_widths[2]);
  auto g_parts = nn::split_channels(g_concat, widths);

  BasicTensor<T> g_x(grad_out.n(), 3, c.h, c.w);
  for (int s = 0; s < TpnConfig::kScales; ++s) {
    const Branch& b = c.branches[s];
    BasicTensor<T> g = nn::resize_bilinear_backward(g_parts[s], b.act[2].h(), b.act[2].w());
    for (int l = 2; l >= 0; --l) {
      g = nn::activation_backward(b.pre[l], b.act[l], g, nn::Activation::kRelu);
      g = branches_[s][l].backward(params_, l == 0 ? b.input : b.act[l - 1], g);
    }
    nn::add_into(g_x, nn::resize_bilinear_backward(g, c.h, c.w));
  }
  return g_x;
}

template class Tpn<float>;
template class Tpn<double>;

}  // namespace texsmooth::models
