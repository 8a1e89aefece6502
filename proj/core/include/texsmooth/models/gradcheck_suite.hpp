#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace texsmooth::models {

struct ComponentCheck {
  std::string component;
  double max_rel_error = 0.0;
  std::size_t checked = 0;
  std::size_t kink_retries = 0;
  std::string worst;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
  bool passed = false;
};

struct GradcheckOptions {
  double tolerance = 1e-4;
  std::uint64_t seed = 1;
  /// Negative control: the named component's analytic gradient is perturbed
  /// before comparison, so its check must fail.
  std::string inject_fault;
};

/// Component names in report order: every layer op, both losses, and the
/// three networks end to end on 8x8 inputs.
const std::vector<std::string>& gradcheck_components();

/// Double-precision central-difference checks of every component.
std::vector<ComponentCheck> run_gradcheck_suite(const GradcheckOptions& opts = {});

}  // namespace texsmooth::models
