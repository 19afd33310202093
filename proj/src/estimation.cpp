// Estimators and test statistics; see estimation.hpp for contracts.
#include "irg/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

namespace irg {

namespace {

void require(bool cond, const char* who, const char* what) {
  if (!cond) throw UsageError(std::string(who) + ": " + what);
}

}  // namespace

ExponentFit fit_exponent(
    const std::vector<std::pair<std::int64_t, double>>& points) {
  constexpr const char* kWho = "fit_exponent";
  require(points.size() >= 3, kWho, "requires at least 3 points");
  ExponentFit fit;
  fit.points.reserve(points.size());
  for (const auto& [n, value] : points) {
    require(n >= 1, kWho, "requires n >= 1");
    require(std::isfinite(value) && value > 0.0, kWho,
            "requires strictly positive finite values");
    fit.points.emplace_back(std::log(static_cast<double>(n)), std::log(value));
  }
  const auto count = static_cast<double>(fit.points.size());
  double mean_x = 0.0;
  double mean_y = 0.0;
  for (const auto& [x, y] : fit.points) {
    mean_x += x;
    mean_y += y;
  }
  mean_x /= count;
  mean_y /= count;
  double sxx = 0.0;
  double sxy = 0.0;
  for (const auto& [x, y] : fit.points) {
    sxx += (x - mean_x) * (x - mean_x);
    sxy += (x - mean_x) * (y - mean_y);
  }
  require(sxx > 0.0, kWho, "requires at least two distinct n");
  fit.slope = sxy / sxx;
  fit.intercept = mean_y - fit.slope * mean_x;
  double ssr = 0.0;
  for (const auto& [x, y] : fit.points) {
    const double resid = y - (fit.intercept + fit.slope * x);
    ssr += resid * resid;
  }
  fit.stderr_est = std::sqrt(ssr / (count - 2.0) / sxx);
  return fit;
}

double hill_estimator(const std::vector<double>& samples, std::int64_t k) {
  constexpr const char* kWho = "hill_estimator";
  require(k >= 2, kWho, "requires k >= 2");
  require(k < static_cast<std::int64_t>(samples.size()), kWho,
          "requires k < count(samples)");
  for (const double x : samples) {
    require(std::isfinite(x) && x > 0.0, kWho,
            "requires strictly positive finite samples");
  }
  // Only the k+1 largest order statistics matter.
  std::vector<double> top(samples);
  const auto kth = top.begin() + static_cast<std::ptrdiff_t>(k + 1);
  std::partial_sort(top.begin(), kth, top.end(), std::greater<double>());
  const double pivot = top[static_cast<std::size_t>(k)];
  double log_sum = 0.0;
  for (std::int64_t i = 0; i < k; ++i) {
    log_sum += std::log(top[static_cast<std::size_t>(i)] / pivot);
  }
  if (log_sum <= 0.0) {
    throw NumericError(
        "hill_estimator: degenerate sample, the k+1 largest values are all "
        "equal");
  }
  return static_cast<double>(k) / log_sum;
}

std::int64_t default_hill_k(std::int64_t n) {
  require(n >= 3, "default_hill_k", "requires n >= 3");
  // Tiny upward nudge so exact powers (n = c^3) do not round down an ulp.
  const auto k = static_cast<std::int64_t>(
      std::floor(std::exp((2.0 / 3.0) * std::log(static_cast<double>(n))) +
                 1e-9));
  return std::clamp<std::int64_t>(k, 2, n - 1);
}

double gw_extinction_prob(double epsilon, std::int64_t k, double tol) {
  constexpr const char* kWho = "gw_extinction_prob";
  require(std::isfinite(epsilon) && epsilon > 0.0 && epsilon <= 1.0, kWho,
          "requires epsilon in (0, 1]");
  require(k >= 1, kWho, "requires k >= 1");
  require(std::isfinite(tol) && tol > 0.0, kWho, "requires tol > 0");
  if (epsilon == 1.0 && k == 1) return 0.0;  // every s is fixed; smallest is 0
  if (epsilon * static_cast<double>(k) <= 1.0) return 1.0;  // dies a.s.
  const auto step = [&](double s) {
    return 1.0 - epsilon + epsilon * std::pow(s, static_cast<double>(k));
  };
  // Monotone iteration from 0 stays below the smallest root and converges
  // geometrically away from criticality.
  double s = 0.0;
  for (int iter = 0; iter < 200000; ++iter) {
    const double next = step(s);
    if (next - s <= tol) return next;
    s = next;
  }
  // Barely supercritical: finish by bisection on [s, 1).  step(x) > x below
  // the root and step(x) < x between the root and 1.
  double lo = s;
  double hi = std::nextafter(1.0, 0.0);
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (step(mid) > mid) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double ks_statistic(std::vector<double> a, std::vector<double> b) {
  constexpr const char* kWho = "ks_statistic";
  require(!a.empty() && !b.empty(), kWho, "requires nonempty samples");
  for (const double x : a) require(std::isfinite(x), kWho, "requires finite samples");
  for (const double x : b) require(std::isfinite(x), kWho, "requires finite samples");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const auto n = static_cast<double>(a.size());
  const auto m = static_cast<double>(b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    if (a[i] < b[j]) {
      ++i;
    } else if (b[j] < a[i]) {
      ++j;
    } else {
      const double x = a[i];
      while (i < a.size() && a[i] == x) ++i;
      while (j < b.size() && b[j] == x) ++j;
    }
    d = std::max(d, std::abs(static_cast<double>(i) / n -
                             static_cast<double>(j) / m));
  }
  return d;
}

double ks_threshold(std::int64_t n, std::int64_t m, double coefficient) {
  constexpr const char* kWho = "ks_threshold";
  require(n >= 1 && m >= 1, kWho, "requires positive sample sizes");
  require(std::isfinite(coefficient) && coefficient > 0.0, kWho,
          "requires a positive coefficient");
  const double nn = static_cast<double>(n);
  const double mm = static_cast<double>(m);
  return coefficient * std::sqrt((nn + mm) / (nn * mm));
}

double chi2_independence(std::int64_t n00, std::int64_t n01, std::int64_t n10,
                         std::int64_t n11) {
  constexpr const char* kWho = "chi2_independence";
  require(n00 >= 0 && n01 >= 0 && n10 >= 0 && n11 >= 0, kWho,
          "requires nonnegative counts");
  const double r0 = static_cast<double>(n00) + static_cast<double>(n01);
  const double r1 = static_cast<double>(n10) + static_cast<double>(n11);
  const double c0 = static_cast<double>(n00) + static_cast<double>(n10);
  const double c1 = static_cast<double>(n01) + static_cast<double>(n11);
  if (r0 == 0.0 || r1 == 0.0 || c0 == 0.0 || c1 == 0.0) {
    throw NumericError(
        "chi2_independence: a margin of the 2x2 table is empty");
  }
  const double total = r0 + r1;
  const double cross = static_cast<double>(n00) * static_cast<double>(n11) -
                       static_cast<double>(n01) * static_cast<double>(n10);
  return total * cross * cross / (r0 * r1 * c0 * c1);
}

SummaryStats summarize(std::vector<double> values) {
  constexpr const char* kWho = "summarize";
  require(!values.empty(), kWho, "requires a nonempty sample");
  for (const double x : values) {
    require(std::isfinite(x), kWho, "requires finite values");
  }
  SummaryStats stats;
  stats.count = static_cast<std::int64_t>(values.size());
  const double count = static_cast<double>(stats.count);
  double sum = 0.0;
  for (const double x : values) sum += x;
  stats.mean = sum / count;
  if (stats.count >= 2) {
    double ss = 0.0;
    for (const double x : values) ss += (x - stats.mean) * (x - stats.mean);
    stats.stderr_est = std::sqrt(ss / (count - 1.0) / count);
  }
  std::sort(values.begin(), values.end());
  stats.min = values.front();
  stats.max = values.back();
  const std::size_t half = values.size() / 2;
  stats.median = (values.size() % 2 == 1)
                     ? values[half]
                     : 0.5 * (values[half - 1] + values[half]);
  return stats;
}

}  // namespace irg
