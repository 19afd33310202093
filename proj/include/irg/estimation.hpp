// Statistical machinery: exponent regression, Hill tail-index estimation,
// deterministic Monte Carlo replication, and the extinction-probability
// solver for the embedded branching process, plus the small test statistics
// the experiment suite relies on.
#ifndef IRG_ESTIMATION_HPP
#define IRG_ESTIMATION_HPP

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <string>
#include <thread>
#include <type_traits>
#include <utility>
#include <vector>

#include "irg/common.hpp"
#include "irg/rng.hpp"

namespace irg {

// Ordinary-least-squares fit of log(value) against log(n).
struct ExponentFit {
  double slope = 0.0;
  double intercept = 0.0;
  // Residual-based standard error of the slope (0 for an exact power law).
  double stderr_est = 0.0;
  // The regression inputs, as (log n, log value) pairs in call order.
  std::vector<std::pair<double, double>> points;
};

// Fits value ~ C * n^slope by least squares in log-log coordinates.
// Requires at least 3 points, strictly positive values, n >= 1, and at
// least two distinct n.  stderr_est uses the usual residual estimate with
// (count - 2) degrees of freedom.
ExponentFit fit_exponent(
    const std::vector<std::pair<std::int64_t, double>>& points);

// Standard Hill estimate on the k largest order statistics
//   ( (1/k) sum_{i=1..k} log(x_(i) / x_(k+1)) )^{-1},
// with x_(1) >= x_(2) >= ... the sample sorted downward.  Requires
// 2 <= k < count(samples) and strictly positive samples; a degenerate
// sample whose top k+1 values are all equal raises NumericError.
double hill_estimator(const std::vector<double>& samples, std::int64_t k);

// Default order-statistic count floor(n^{2/3}), clamped to [2, n-1].
// A standard bias/variance compromise; experiments emit a sensitivity
// sweep around it.  Requires n >= 3.
std::int64_t default_hill_k(std::int64_t n);

// Extinction probability of the branching process with offspring law
// P(X = k) = epsilon, P(X = 0) = 1 - epsilon: the smallest fixed point in
// [0, 1] of s = 1 - epsilon + epsilon * s^k, found by monotone iteration
// from 0 (with a bisection fallback near criticality).  Subcritical or
// critical mean (epsilon * k <= 1) gives 1, except the deterministic
// one-child chain (epsilon = 1, k = 1) where the smallest fixed point is 0.
double gw_extinction_prob(double epsilon, std::int64_t k, double tol = 1e-14);

// Two-sample Kolmogorov-Smirnov statistic sup_x |F_a(x) - F_b(x)|.
// Both samples must be nonempty with finite entries.
double ks_statistic(std::vector<double> a, std::vector<double> b);

// Large-sample KS rejection threshold c * sqrt((n + m) / (n * m)); the
// default coefficient 1.6276 is the 1% level.
double ks_threshold(std::int64_t n, std::int64_t m, double coefficient = 1.6276);

// Pearson chi-square statistic (1 degree of freedom) for independence in
// the 2x2 table [[n00, n01], [n10, n11]]; compare against 6.635 for a 1%
// test.  An empty row or column margin raises NumericError.
double chi2_independence(std::int64_t n00, std::int64_t n01, std::int64_t n10,
                         std::int64_t n11);

struct SummaryStats {
  std::int64_t count = 0;
  double mean = 0.0;
  double stderr_est = 0.0;  // sample standard deviation / sqrt(count)
  double min = 0.0;
  double max = 0.0;
  double median = 0.0;  // midpoint average for even counts
};

// Basic location/scale summary of a nonempty, finite sample.
SummaryStats summarize(std::vector<double> values);

// A deterministic replication schedule: replica i runs with the seed
// derive_seed(master_seed, task_id, i), so the merged output depends only
// on the plan, never on execution order or worker count.
struct ReplicaPlan {
  std::uint64_t master_seed = 0;
  std::int64_t replica_count = 0;
  std::string task_id;
};

// What to do when a replica's task throws: keep the failure in the output
// (callers must then exclude failed replicas from estimates — silent
// exclusion is forbidden) or abort the whole run after it completes.
enum class FailurePolicy { collect, raise };

template <typename Record>
struct ReplicaResult {
  std::int64_t index = 0;
  bool ok = false;
  std::string error;  // exception message when ok is false
  Record record{};    // default-constructed when ok is false
};

// Runs task(index, seed) for index = 0 .. replica_count-1, possibly on
// several worker threads, and returns the results ordered by index.  The
// task must be a pure function of (index, seed) and, when workers > 1,
// safe to call concurrently; Record must be default-constructible.  With
// FailurePolicy::raise a failed replica turns into a NumericError naming
// the lowest failed index once all replicas have finished.
template <typename Task>
auto run_replicas(const ReplicaPlan& plan, Task&& task, int workers = 1,
                  FailurePolicy policy = FailurePolicy::collect)
    -> std::vector<
        ReplicaResult<std::invoke_result_t<Task&, std::int64_t, std::uint64_t>>> {
  using Record = std::invoke_result_t<Task&, std::int64_t, std::uint64_t>;
  static_assert(std::is_default_constructible_v<Record>,
                "run_replicas requires a default-constructible record type");
  if (plan.replica_count < 0) {
    throw UsageError("run_replicas: replica_count must be nonnegative");
  }
  if (workers < 1) {
    throw UsageError("run_replicas: workers must be at least 1");
  }
  const std::int64_t n = plan.replica_count;
  std::vector<ReplicaResult<Record>> out(static_cast<std::size_t>(n));
  auto body = [&](std::int64_t i) {
    auto& slot = out[static_cast<std::size_t>(i)];
    slot.index = i;
    const std::uint64_t seed = derive_seed(plan.master_seed, plan.task_id, i);
    try {
      slot.record = task(i, seed);
      slot.ok = true;
    } catch (const std::exception& e) {
      slot.ok = false;
      slot.error = e.what();
    } catch (...) {
      slot.ok = false;
      slot.error = "unknown error";
    }
  };
  const int pool_size =
      static_cast<int>(std::min<std::int64_t>(workers, std::max<std::int64_t>(n, 1)));
  if (pool_size <= 1) {
    for (std::int64_t i = 0; i < n; ++i) body(i);
  } else {
    std::atomic<std::int64_t> next{0};
    auto drain = [&] {
      for (;;) {
        const std::int64_t i = next.fetch_add(1, std::memory_order_relaxed);
        if (i >= n) return;
        body(i);
      }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(pool_size - 1));
    for (int w = 1; w < pool_size; ++w) pool.emplace_back(drain);
    drain();
    for (std::thread& t : pool) t.join();
  }
  if (policy == FailurePolicy::raise) {
    for (const auto& r : out) {
      if (!r.ok) {
        throw NumericError("run_replicas: replica " + std::to_string(r.index) +
                           " failed: " + r.error);
      }
    }
  }
  return out;
}

}  // namespace irg

#endif  // IRG_ESTIMATION_HPP
