#include "irg/projection.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace irg {

namespace {

constexpr std::int64_t kTableSize = std::int64_t{1} << 16;

// Prefix sums H(0..kTableSize) accumulated in long double, rounded once.
const std::vector<double>& harmonic_table() {
  static const std::vector<double> table = [] {
    std::vector<double> t(static_cast<std::size_t>(kTableSize) + 1);
    long double acc = 0.0L;
    t[0] = 0.0;
    for (std::int64_t k = 1; k <= kTableSize; ++k) {
      acc += 1.0L / static_cast<long double>(k);
      t[static_cast<std::size_t>(k)] = static_cast<double>(acc);
    }
    return t;
  }();
  return table;
}

constexpr double kEulerMascheroni = 0.5772156649015328606;

// Euler-Maclaurin tail for H(n), n > kTableSize; next term is 1/(252 n^6).
double harmonic_asymptotic(std::int64_t n) {
  double x = static_cast<double>(n);
  double inv = 1.0 / x;
  double inv2 = inv * inv;
  return std::log(x) + kEulerMascheroni +
         inv * (0.5 - inv * (1.0 / 12.0 - inv2 * (1.0 / 120.0)));
}

}  // namespace

double harmonic(std::int64_t n) {
  if (n < 0) throw UsageError("harmonic: n must be nonnegative");
  if (n <= kTableSize) return harmonic_table()[static_cast<std::size_t>(n)];
  return harmonic_asymptotic(n);
}

double harmonic_diff(std::int64_t i, std::int64_t n) {
  if (i < 0 || n < i) {
    throw UsageError("harmonic_diff: requires 0 <= i <= n");
  }
  if (i == n) return 0.0;
  if (n <= kTableSize) {
    const auto& t = harmonic_table();
    return t[static_cast<std::size_t>(n)] - t[static_cast<std::size_t>(i)];
  }
  if (i <= kTableSize) {
    return harmonic_asymptotic(n) - harmonic_table()[static_cast<std::size_t>(i)];
  }
  // Both beyond the table: difference of the expansions, written so that the
  // leading term is log1p of the relative gap (no large-minus-large).
  double xi = static_cast<double>(i);
  double xn = static_cast<double>(n);
  double inv_i = 1.0 / xi;
  double inv_n = 1.0 / xn;
  double lead = std::log1p(static_cast<double>(n - i) / xi);
  double corr = 0.5 * (inv_n - inv_i) -
                (inv_n * inv_n - inv_i * inv_i) / 12.0 +
                (inv_n * inv_n * inv_n * inv_n -
                 inv_i * inv_i * inv_i * inv_i) / 120.0;
  return lead + corr;
}

ProjectionContext::ProjectionContext(std::int64_t m_in) : m(m_in) {
  if (m < 1) throw UsageError("ProjectionContext: m must be >= 1");
  if (m > kMaxProjectionIndex) {
    throw UsageError(
        "ProjectionContext: m exceeds the double-precision index resolution "
        "limit " +
        std::to_string(kMaxProjectionIndex));
  }
}

double phi_m(const ProjectionContext& ctx, std::int64_t i) {
  if (i < 1 || i > ctx.m) {
    throw UsageError("phi_m: vertex index " + std::to_string(i) +
                     " outside 1.." + std::to_string(ctx.m));
  }
  return -harmonic_diff(i, ctx.m);
}

std::int64_t pi_m(const ProjectionContext& ctx, double x) {
  if (!(x <= 0.0)) {
    throw UsageError("pi_m: position must be <= 0");
  }
  if (!(x > -harmonic(ctx.m))) {
    throw UsageError("pi_m: position " + std::to_string(x) +
                     " lies below the cell of vertex 1");
  }
  // Smallest i in 1..m with x <= phi_m(i); phi_m(m) = 0 >= x guarantees
  // existence.
  std::int64_t lo = 1, hi = ctx.m;
  while (lo < hi) {
    std::int64_t mid = lo + (hi - lo) / 2;
    if (x <= phi_m(ctx, mid)) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  return lo;
}

}  // namespace irg
