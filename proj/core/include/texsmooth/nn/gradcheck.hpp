#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace texsmooth::nn {

/// |a - n| / max(|a|, |n|, 1e-8)
double relative_error(double analytic, double numeric);

/// One block of inputs or parameters: the live values the loss reads, and the
/// analytic gradient computed for them.
struct GradProbe {
  std::string name;
  std::span<double> values;
  std::span<const double> analytic;
};

/// A loss evaluation plus a fingerprint of its ReLU sign pattern. Equal
/// fingerprints mean the evaluations lie on the same linear piece.
struct LossSample {
  double value = 0.0;
  std::uint64_t pattern = 0;
};

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::size_t checked = 0;
  std::size_t kink_retries = 0;  // elements whose stencil crossed a kink at the base eps
  std::string worst;             // "<probe>[index]"
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
};

/// Central differences on every element of every probe. The loss is
/// re-evaluated with each element nudged by +/- eps and restored afterwards.
GradCheckResult grad_check(const std::function<double()>& loss, std::span<const GradProbe> probes, double eps);

/// As above, but when the stencil crosses a kink (fingerprints differ) a
/// second-order one-sided stencil is used on a side that stays on the centre's
/// piece; failing that, eps shrinks tenfold, up to three times.
GradCheckResult grad_check(const std::function<LossSample()>& loss, std::span<const GradProbe> probes, double eps);

}  // namespace texsmooth::nn
