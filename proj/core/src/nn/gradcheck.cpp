#include "texsmooth/nn/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace texsmooth::nn {
namespace {

constexpr int kMaxShrinks = 3;

double nudged(const std::function<LossSample()>& loss, double& slot, double value, LossSample& out) {
  slot = value;
  out = loss();
  return out.value;
}

}  // namespace

double relative_error(double analytic, double numeric) {
  const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-8});
  return std::abs(analytic - numeric) / denom;
}

GradCheckResult grad_check(const std::function<double()>& loss, std::span<const GradProbe> probes, double eps) {
  return grad_check(std::function<LossSample()>([&] { return LossSample{loss(), 0}; }), probes, eps);
}

GradCheckResult grad_check(const std::function<LossSample()>& loss, std::span<const GradProbe> probes, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("grad_check: eps must be positive");
  GradCheckResult result;
  const std::uint64_t centre = loss().pattern;
  for (const GradProbe& probe : probes) {
    if (probe.values.size() != probe.analytic.size()) {
      throw std::invalid_argument("grad_check: probe " + probe.name + " has mismatched gradient length");
    }
    for (std::size_t i = 0; i < probe.values.size(); ++i) {
      double& slot = probe.values[i];
      const double saved = slot;
      double h = eps;
      double numeric = 0.0;
      LossSample a, b;
      for (int attempt = 0;; ++attempt) {
        const double fp = nudged(loss, slot, saved + h, a);
        const double fm = nudged(loss, slot, saved - h, b);
        const bool plus_ok = a.pattern == centre;
        const bool minus_ok = b.pattern == centre;
        if (plus_ok && minus_ok) {
          numeric = (fp - fm) / (2.0 * h);
          break;
        }
        if (attempt == 0) ++result.kink_retries;
        // Second-order one-sided stencil on a side that stays on the centre's piece,
        // written in differences so equal losses give exactly zero.
        const double f0 = nudged(loss, slot, saved, a);
        if (plus_ok) {
          const double f2 = nudged(loss, slot, saved + 2.0 * h, a);
          if (a.pattern == centre) {
            numeric = (4.0 * (fp - f0) - (f2 - f0)) / (2.0 * h);
            break;
          }
        }
        if (minus_ok) {
          const double f2 = nudged(loss, slot, saved - 2.0 * h, a);
          if (a.pattern == centre) {
            numeric = (4.0 * (f0 - fm) - (f0 - f2)) / (2.0 * h);
            break;
          }
        }
        if (attempt == kMaxShrinks) {
          numeric = plus_ok ? (fp - f0) / h : (f0 - fm) / h;
          break;
        }
        h *= 0.1;
      }
      slot = saved;
      const double err = relative_error(probe.analytic[i], numeric);
      ++result.checked;
      if (err > result.max_rel_error || result.worst.empty()) {
        result.max_rel_error = err;
        result.worst = probe.name + "[" + std::to_string(i) + "]";
        result.worst_analytic = probe.analytic[i];
        result.worst_numeric = numeric;
      }
    }
  }
  return result;
}

}  // namespace texsmooth::nn
