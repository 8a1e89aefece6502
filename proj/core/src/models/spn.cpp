#include "texsmooth/models/spn.hpp"

#include <stdexcept>
#include <string>

#include "texsmooth/nn/ops.hpp"

namespace texsmooth::models {

template <typename T>
Spn<T>::Spn(const SpnConfig& cfg, std::uint64_t seed) : cfg_(cfg) {
  Rng rng(seed);
  int in = 3;
  for (int m = 0; m < SpnConfig::kStages; ++m) {
    const std::string prefix = "spn.stage" + std::to_string(m);
    const int w = cfg.widths[m];
    conv_a_[m] = nn::ConvLayer::create(params_, prefix + ".conv0", nn::ConvSpec{3, in, w, m == 0 ? 1 : 2},
                                       nn::Init::kKaiming, rng);
    conv_b_[m] = nn::ConvLayer::create(params_, prefix + ".conv1", nn::ConvSpec{3, w, w, 1}, nn::Init::kKaiming, rng);
    side_[m] = nn::ConvLayer::create(params_, prefix + ".side", nn::ConvSpec{1, w, 1, 1}, nn::Init::kXavier, rng);
    in = w;
  }
  fusion_ = nn::ConvLayer::create(params_, "spn.fuse", nn::ConvSpec{1, SpnConfig::kStages, 1, 1},
                                  nn::Init::kXavier, rng);
}

template <typename T>
SpnOutput<T> Spn<T>::forward(const BasicTensor<T>& x, Cache* cache) const {
  if (x.c() != 3) throw std::invalid_argument("spn: expected 3 input channels");
  if (x.h() % 4 != 0 || x.w() % 4 != 0 || x.h() == 0 || x.w() == 0) {
    throw std::invalid_argument("spn: input height and width must be positive multiples of 4");
  }
  Cache local;
  Cache& c = cache ? *cache : local;
  c.input = x;
  const BasicTensor<T>* in = &c.input;
  std::vector<const BasicTensor<T>*> logits;
  for (int m = 0; m < SpnConfig::kStages; ++m) {
    Stage& s = c.stages[m];
    s.pre_a = conv_a_[m].forward(params_, *in);
    s.act_a = nn::activation_forward(s.pre_a, nn::Activation::kRelu);
    s.pre_b = conv_b_[m].forward(params_, s.act_a);
    s.act_b = nn::activation_forward(s.pre_b, nn::Activation::kRelu);
    s.side_logit = side_[m].forward(params_, s.act_b);
    s.side_logit_up = nn::resize_bilinear_forward(s.side_logit, x.h(), x.w());
    c.out.sides[m] = nn::activation_forward(s.side_logit_up, nn::Activation::kSigmoid);
    logits.push_back(&s.side_logit_up);
    in = &s.act_b;
  }
  c.concat = nn::concat_channels(logits);
  c.out.fused = nn::activation_forward(fusion_.forward(params_, c.concat), nn::Activation::kSigmoid);
  return c.out;
}

template <typename T>
BasicTensor<T> Spn<T>::backward(const Cache& c, const BasicTensor<T>& grad_fused,
                                const std::array<BasicTensor<T>, SpnConfig::kStages>& grad_sides) {
  if (!grad_fused.same_shape(c.out.fused)) throw std::invalid_argument("spn backward: fused gradient shape mismatch");
  const auto g_fuse_pre = nn::activation_backward(c.out.fused, c.out.fused, grad_fused, nn::Activation::kSigmoid);
  auto g_logits = nn::split_channels(fusion_.backward(params_, c.concat, g_fuse_pre),
                                     std::vector<int>(SpnConfig::kStages, 1));

  BasicTensor<T> g_next;  // gradient flowing into act_b of the current stage from the stage after it
  for (int m = SpnConfig::kStages - 1; m >= 0; --m) {
    const Stage& s = c.stages[m];
    BasicTensor<T> g_up = std::move(g_logits[m]);
    if (grad_sides[m].size() != 0) {
      if (!grad_sides[m].same_shape(c.out.sides[m])) {
        throw std::invalid_argument("spn backward: side gradient shape mismatch");
      }
      nn::add_into(g_up, nn::activation_backward(c.out.sides[m], c.out.sides[m], grad_sides[m],
                                                 nn::Activation::kSigmoid));
    }
    const auto g_side = nn::resize_bilinear_backward(g_up, s.side_logit.h(), s.side_logit.w());
    BasicTensor<T> g = side_[m].backward(params_, s.act_b, g_side);
    if (g_next.size() != 0) nn::add_into(g, g_next);
    g = nn::activation_backward(s.pre_b, s.act_b, g, nn::Activation::kRelu);
    g = conv_b_[m].backward(params_, s.act_a, g);
    g = nn::activation_backward(s.pre_a, s.act_a, g, nn::Activation::kRelu);
    g_next = conv_a_[m].backward(params_, m == 0 ? c.input : c.stages[m - 1].act_b, g);
  }
  return g_next;
}

template class Spn<float>;
template class Spn<double>;

}  // namespace texsmooth::models
