#pragma once

#include <cstdint>
#include <random>

namespace texsmooth {

/// mt19937_64 output is fixed by the standard; the helpers below map it to
/// values without the implementation-defined std distributions, so seeded
/// runs match across standard libraries.
using Rng = std::mt19937_64;

/// splitmix64 finalizer, used to derive independent child seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

/// Uniform double in [0, 1).
double uniform01(Rng& rng);

/// Uniform double in [lo, hi).
double uniform_real(Rng& rng, double lo, double hi);

/// Uniform integer in [0, bound). bound must be > 0.
std::uint64_t uniform_index(Rng& rng, std::uint64_t bound);

/// Standard normal via Box-Muller.
double standard_normal(Rng& rng);

}  // namespace texsmooth
