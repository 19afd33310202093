#include "irg/rng.hpp"

#include <cmath>

namespace irg {

namespace {

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

// Knuth's product-of-uniforms method; O(mean) draws.
std::int64_t poisson_small(Rng& rng, double mean) {
  const double limit = std::exp(-mean);
  std::int64_t k = 0;
  double p = 1.0;
  do {
    ++k;
    p *= rng.next_double();
  } while (p > limit);
  return k - 1;
}

// Hormann (1993) PTRS transformed rejection, valid for mean >= 10.
std::int64_t poisson_ptrs(Rng& rng, double mean) {
  const double log_mean = std::log(mean);
  const double b = 0.931 + 2.53 * std::sqrt(mean);
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double v_r = 0.9277 - 3.6224 / (b - 2.0);
  for (;;) {
    const double u = rng.next_double() - 0.5;
    const double v = rng.next_double_pos();
    const double us = 0.5 - std::fabs(u);
    const double kf = std::floor((2.0 * a / us + b) * u + mean + 0.43);
    if (us >= 0.07 && v <= v_r) return static_cast<std::int64_t>(kf);
    if (kf < 0.0 || (us < 0.013 && v > us)) continue;
    const double lhs = std::log(v * inv_alpha / (a / (us * us) + b));
    const double rhs = kf * log_mean - mean - std::lgamma(kf + 1.0);
    if (lhs <= rhs) return static_cast<std::int64_t>(kf);
  }
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t master_seed, std::string_view task_id,
                          std::uint64_t index) {
  std::uint64_t h = mix64(master_seed ^ fnv1a(task_id));
  return mix64(h + 0x9E3779B97F4A7C15ULL * (index + 1));
}

std::int64_t sample_poisson(Rng& rng, double mean) {
  if (!(mean >= 0.0) || !std::isfinite(mean)) {
    throw UsageError("sample_poisson: mean must be finite and nonnegative");
  }
  if (mean == 0.0) return 0;
  if (mean < 10.0) return poisson_small(rng, mean);
  return poisson_ptrs(rng, mean);
}

}  // namespace irg
