#include "texsmooth/models/gradcheck_suite.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

#include "texsmooth/models/spn.hpp"
#include "texsmooth/models/tpn.hpp"
#include "texsmooth/models/tsafn.hpp"
#include "texsmooth/nn/gradcheck.hpp"
#include "texsmooth/nn/loss.hpp"
#include "texsmooth/nn/ops.hpp"
#include "texsmooth/rng.hpp"

namespace texsmooth::models {
namespace {

using nn::GradProbe;

constexpr double kEpsConv = 1e-3;
constexpr double kEpsElementwise = 1e-5;
constexpr double kEpsNetwork = 1e-4;

TensorD random_tensor(Rng& rng, int n, int c, int h, int w, double scale = 1.0) {
  TensorD t(n, c, h, w);
  for (double& v : t.values()) v = scale * standard_normal(rng);
  return t;
}

/// Values bounded away from zero so ReLU kinks stay outside the stencil.
TensorD away_from_zero(Rng& rng, int n, int c, int h, int w) {
  TensorD t(n, c, h, w);
  for (double& v : t.values()) {
    const double z = standard_normal(rng);
    v = (z < 0 ? -1.0 : 1.0) * (0.05 + std::abs(z));
  }
  return t;
}

TensorD binary_tensor(Rng& rng, int n, int c, int h, int w) {
  TensorD t(n, c, h, w);
  for (double& v : t.values()) v = uniform01(rng) < 0.3 ? 1.0 : 0.0;
  return t;
}

/// FNV-1a over the signs of every ReLU pre-activation.
class SignPattern {
 public:
  void add(const TensorD& pre) {
    for (double v : pre.values()) {
      hash_ ^= v > 0.0 ? 1u : 0u;
      hash_ *= 1099511628211ull;
    }
  }
  std::uint64_t value() const { return hash_; }

 private:
  std::uint64_t hash_ = 1469598103934665603ull;
};

double weighted_sum(const TensorD& y, const TensorD& r) {
  double s = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) s += y[i] * r[i];
  return s;
}

/// Analytic gradients are copied so the loss closure may reuse any buffers.
struct ProbeSet {
  std::vector<std::vector<double>> analytic;
  std::vector<GradProbe> probes;

  void add(std::string name, std::span<double> values, std::span<const double> grad) {
    if (values.size() != grad.size()) throw std::logic_error("gradcheck probe size mismatch: " + name);
    analytic.emplace_back(grad.begin(), grad.end());
    probes.push_back({std::move(name), values, {}});
  }

  void add_params(nn::ModelParams<double>& params) {
    for (auto& p : params) add(p.name, p.value.values(), p.grad.values());
  }

  nn::GradCheckResult run(const std::function<double()>& loss, double eps, bool fault) {
    return run(std::function<nn::LossSample()>([&] { return nn::LossSample{loss(), 0}; }), eps, fault);
  }

  nn::GradCheckResult run(const std::function<nn::LossSample()>& loss, double eps, bool fault) {
    for (std::size_t i = 0; i < probes.size(); ++i) probes[i].analytic = analytic[i];
    if (fault && !analytic.empty() && !analytic[0].empty()) {
      analytic[0][0] = analytic[0][0] * 1.01 + 1e-3;
    }
    nn::GradCheckResult total;
    for (const GradProbe& p : probes) {
      const auto r = nn::grad_check(loss, std::span<const GradProbe>(&p, 1), eps);
      total.checked += r.checked;
      total.kink_retries += r.kink_retries;
      if (r.max_rel_error > total.max_rel_error || total.worst.empty()) {
        total.max_rel_error = r.max_rel_error;
        total.worst = r.worst;
        total.worst_analytic = r.worst_analytic;
        total.worst_numeric = r.worst_numeric;
      }
    }
    return total;
  }
};

nn::GradCheckResult check_conv(Rng& rng, bool fault) {
  const nn::ConvSpec specs[] = {{3, 2, 3, 1}, {3, 3, 2, 2}, {1, 4, 3, 1}, {7, 2, 2, 1}, {5, 2, 3, 1}};
  nn::GradCheckResult worst;
  bool first = true;
  for (const auto& spec : specs) {
    TensorD x = random_tensor(rng, 2, spec.in_channels, 7, 6);
    TensorD w = random_tensor(rng, spec.out_channels, spec.in_channels, spec.kernel, spec.kernel, 0.5);
    TensorD b = random_tensor(rng, 1, spec.out_channels, 1, 1);
    const TensorD y0 = nn::conv2d_forward(x, spec, w, b);
    const TensorD r = random_tensor(rng, y0.n(), y0.c(), y0.h(), y0.w());
    const auto g = nn::conv2d_backward(x, spec, w, r);
    ProbeSet set;
    set.add("x", x.values(), g.grad_x.values());
    set.add("w", w.values(), g.grad_w.values());
    set.add("b", b.values(), g.grad_b.values());
    auto res = set.run([&] { return weighted_sum(nn::conv2d_forward(x, spec, w, b), r); }, kEpsConv,
                       fault && first);
    first = false;
    worst.checked += res.checked;
    if (res.max_rel_error >= worst.max_rel_error) {
      worst.max_rel_error = res.max_rel_error;
      worst.worst = "k" + std::to_string(spec.kernel) + "s" + std::to_string(spec.stride) + "." + res.worst;
      worst.worst_analytic = res.worst_analytic;
      worst.worst_numeric = res.worst_numeric;
    }
  }
  return worst;
}

nn::GradCheckResult check_activation(Rng& rng, nn::Activation kind, bool fault) {
  TensorD x = away_from_zero(rng, 2, 3, 5, 4);
  const TensorD r = random_tensor(rng, 2, 3, 5, 4);
  const TensorD y = nn::activation_forward(x, kind);
  const TensorD g = nn::activation_backward(x, y, r, kind);
  ProbeSet set;
  set.add("x", x.values(), g.values());
  return set.run([&] { return weighted_sum(nn::activation_forward(x, kind), r); }, kEpsElementwise, fault);
}

nn::GradCheckResult check_concat(Rng& rng, bool fault) {
  TensorD a = random_tensor(rng, 2, 2, 4, 3);
  TensorD b = random_tensor(rng, 2, 1, 4, 3);
  TensorD c = random_tensor(rng, 2, 3, 4, 3);
  const TensorD r = random_tensor(rng, 2, 6, 4, 3);
  const auto parts = nn::split_channels(r, {2, 1, 3});
  ProbeSet set;
  set.add("a", a.values(), parts[0].values());
  set.add("b", b.values(), parts[1].values());
  set.add("c", c.values(), parts[2].values());
  return set.run([&] { return weighted_sum(nn::concat_channels<double>({&a, &b, &c}), r); }, kEpsElementwise,
                 fault);
}

nn::GradCheckResult check_resize(Rng& rng, bool fault) {
  const int sizes[][4] = {{8, 8, 1, 1}, {8, 6, 4, 3}, {2, 3, 8, 8}, {5, 7, 3, 9}};
  nn::GradCheckResult worst;
  bool first = true;
  for (const auto& s : sizes) {
    TensorD x = random_tensor(rng, 2, 2, s[0], s[1]);
    const TensorD r = random_tensor(rng, 2, 2, s[2], s[3]);
    const TensorD g = nn::resize_bilinear_backward(r, s[0], s[1]);
    ProbeSet set;
    set.add("x", x.values(), g.values());
    auto res = set.run([&] { return weighted_sum(nn::resize_bilinear_forward(x, s[2], s[3]), r); },
                       kEpsElementwise, fault && first);
    first = false;
    worst.checked += res.checked;
    if (res.max_rel_error >= worst.max_rel_error) {
      const std::size_t checked = worst.checked;
      worst = res;
      worst.checked = checked;
    }
  }
  return worst;
}

nn::GradCheckResult check_mse(Rng& rng, bool fault) {
  TensorD pred = random_tensor(rng, 2, 3, 4, 4);
  const TensorD gt = random_tensor(rng, 2, 3, 4, 4);
  const auto l = nn::mse_loss(pred, gt);
  ProbeSet set;
  set.add("pred", pred.values(), l.grad.values());
  return set.run([&] { return nn::mse_loss(pred, gt).value; }, kEpsElementwise, fault);
}

nn::GradCheckResult check_bce(Rng& rng, bool fault) {
  TensorD pred(2, 1, 5, 5);
  for (double& v : pred.values()) v = 0.05 + 0.9 * uniform01(rng);
  const TensorD gt = binary_tensor(rng, 2, 1, 5, 5);
  nn::GradCheckResult worst;
  bool first = true;
  for (nn::Reduction red : {nn::Reduction::kSum, nn::Reduction::kMeanPerPixel}) {
    const auto l = nn::weighted_bce_loss(pred, gt, red);
    ProbeSet set;
    set.add("pred", pred.values(), l.grad.values());
    auto res = set.run([&] { return nn::weighted_bce_loss(pred, gt, red).value; }, kEpsElementwise,
                       fault && first);
    first = false;
    worst.checked += res.checked;
    if (res.max_rel_error >= worst.max_rel_error) {
      const std::size_t checked = worst.checked;
      worst = res;
      worst.checked = checked;
    }
  }
  return worst;
}

nn::GradCheckResult check_tpn(Rng& rng, std::uint64_t seed, bool fault) {
  Tpn<double> net(TpnConfig{}, seed);
  TensorD x = random_tensor(rng, 1, 3, 8, 8, 0.5);
  Tpn<double>::Cache cache;
  const TensorD y = net.forward(x, &cache);
  const TensorD r = random_tensor(rng, y.n(), y.c(), y.h(), y.w());
  net.params().zero_grad();
  const TensorD gx = net.backward(cache, r);
  ProbeSet set;
  set.add("input", x.values(), gx.values());
  set.add_params(net.params());
  return set.run(
      [&] {
        Tpn<double>::Cache c;
        const double v = weighted_sum(net.forward(x, &c), r);
        SignPattern sp;
        for (const auto& b : c.branches) {
          for (const auto& pre : b.pre) sp.add(pre);
        }
        return nn::LossSample{v, sp.value()};
      },
      kEpsNetwork, fault);
}

nn::GradCheckResult check_spn(Rng& rng, std::uint64_t seed, bool fault) {
  Spn<double> net(SpnConfig{}, seed);
  TensorD x = random_tensor(rng, 1, 3, 8, 8, 0.5);
  const TensorD edges = binary_tensor(rng, 1, 1, 8, 8);
  const auto edge_loss = [&](const SpnOutput<double>& out, bool want_grad, std::array<TensorD, 3>* sides,
                             TensorD* fused) {
    auto f = nn::weighted_bce_loss(out.fused, edges, nn::Reduction::kSum);
    double total = f.value;
    if (want_grad) *fused = std::move(f.grad);
    for (int m = 0; m < SpnConfig::kStages; ++m) {
      auto s = nn::weighted_bce_loss(out.sides[m], edges, nn::Reduction::kSum);
      total += s.value;
      if (want_grad) (*sides)[m] = std::move(s.grad);
    }
    return total;
  };
  Spn<double>::Cache cache;
  const auto out = net.forward(x, &cache);
  std::array<TensorD, 3> g_sides;
  TensorD g_fused;
  edge_loss(out, true, &g_sides, &g_fused);
  net.params().zero_grad();
  const TensorD gx = net.backward(cache, g_fused, g_sides);
  ProbeSet set;
  set.add("input", x.values(), gx.values());
  set.add_params(net.params());
  return set.run(
      [&] {
        Spn<double>::Cache c;
        const double v = edge_loss(net.forward(x, &c), false, nullptr, nullptr);
        SignPattern sp;
        for (const auto& st : c.stages) {
          sp.add(st.pre_a);
          sp.add(st.pre_b);
        }
        return nn::LossSample{v, sp.value()};
      },
      kEpsNetwork, fault);
}

nn::GradCheckResult check_tsafn(Rng& rng, std::uint64_t seed, bool fault) {
  Tsafn<double> net(TsafnConfig{}, seed);
  TensorD rgb = random_tensor(rng, 1, 3, 8, 8, 0.5);
  TensorD structure = random_tensor(rng, 1, 1, 8, 8, 0.5);
  TensorD texture = random_tensor(rng, 1, 1, 8, 8, 0.5);
  const TensorD target = random_tensor(rng, 1, 3, 8, 8, 0.5);
  Tsafn<double>::Cache cache;
  const TensorD y = net.forward(rgb, structure, texture, &cache);
  net.params().zero_grad();
  const auto g = net.backward(cache, nn::mse_loss(y, target).grad);
  ProbeSet set;
  set.add("rgb", rgb.values(), g.rgb.values());
  set.add("structure", structure.values(), g.structure.values());
  set.add("texture", texture.values(), g.texture.values());
  set.add_params(net.params());
  return set.run(
      [&] {
        Tsafn<double>::Cache c;
        const double v = nn::mse_loss(net.forward(rgb, structure, texture, &c), target).value;
        SignPattern sp;
        for (int l = 0; l < 3; ++l) sp.add(c.pre[l]);
        return nn::LossSample{v, sp.value()};
      },
      kEpsNetwork, fault);
}

}  // namespace

const std::vector<std::string>& gradcheck_components() {
  static const std::vector<std::string> names = {"conv2d", "relu", "sigmoid", "concat_channels", "resize_bilinear",
                                                 "mse_loss", "weighted_bce_loss", "tpn", "spn", "tsafn"};
  return names;
}

std::vector<ComponentCheck> run_gradcheck_suite(const GradcheckOptions& opts) {
  const auto& names = gradcheck_components();
  if (!opts.inject_fault.empty() && std::find(names.begin(), names.end(), opts.inject_fault) == names.end()) {
    throw std::invalid_argument("unknown gradcheck component: " + opts.inject_fault);
  }
  std::vector<ComponentCheck> report;
  for (std::size_t i = 0; i < names.size(); ++i) {
    const std::string& name = names[i];
    const bool fault = name == opts.inject_fault;
    Rng rng(mix_seed(opts.seed, i));
    nn::GradCheckResult r;
    switch (i) {
      case 0: r = check_conv(rng, fault); break;
      case 1: r = check_activation(rng, nn::Activation::kRelu, fault); break;
      case 2: r = check_activation(rng, nn::Activation::kSigmoid, fault); break;
      case 3: r = check_concat(rng, fault); break;
      case 4: r = check_resize(rng, fault); break;
      case 5: r = check_mse(rng, fault); break;
      case 6: r = check_bce(rng, fault); break;
      case 7: r = check_tpn(rng, mix_seed(opts.seed, 100), fault); break;
      case 8: r = check_spn(rng, mix_seed(opts.seed, 101), fault); break;
      case 9: r = check_tsafn(rng, mix_seed(opts.seed, 102), fault); break;
      default: throw std::logic_error("gradcheck component without a check");
    }
    report.push_back({name, r.max_rel_error, r.checked, r.kink_retries, r.worst, r.worst_analytic, r.worst_numeric,
                      r.max_rel_error < opts.tolerance});
  }
  return report;
}

}  // namespace texsmooth::models
