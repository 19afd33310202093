// Sampling of the inhomogeneous random graph on {1..n} and the component /
// degree statistics read off it.
//
// Each unordered pair {i,j} is an edge independently with probability
//   p(i,j) = min(1, beta * (i v j)^(gamma-1) * (i ^ j)^(-gamma)),
// which does not depend on n.  Two samplers produce this law: a quadratic
// reference sampler and an expected O(n + |E|) skip sampler; they use
// different RNG streams, so equality is distributional, not pathwise.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "irg/model.hpp"

namespace irg {

struct GraphSample {
  std::int64_t n = 0;
  ModelParams params{};
  std::uint64_t seed = 0;
  std::string sampler_id;  // "naive" or "fast"
  // Sorted, duplicate-free, each pair with first < second, 1-based.
  std::vector<std::pair<std::int64_t, std::int64_t>> edges;
};

// min(1, beta * max(i,j)^(gamma-1) * min(i,j)^(-gamma)); symmetric.
// Errors on i == j (no self-loops) or indices < 1.
double edge_probability(const ModelParams& params, std::int64_t i,
                        std::int64_t j);

// Reference sampler: one uniform per pair, consumed in row-major order
// (j ascending, then i ascending).  O(n^2) time; deterministic given seed.
GraphSample sample_graph_naive(const ModelParams& params, std::int64_t n,
                               std::uint64_t seed);

// Skip sampler with the same edge law, expected O(n + |E|) time.
// For fixed column j the probabilities p(i,j) are nonincreasing in i, so
// candidates are generated by geometric skips under the current dominating
// probability and thinned by an acceptance ratio (see the implementation
// for the exactness argument).
GraphSample sample_graph_fast(const ModelParams& params, std::int64_t n,
                              std::uint64_t seed);

struct ComponentStats {
  std::vector<std::int64_t> component_sizes;  // sorted descending
  std::int64_t largest = 0;
  // component_of[v] for v in 1..n (index 0 unused); ids are 0-based and
  // ordered by first vertex occurrence.
  std::vector<std::int64_t> component_of;
  std::int64_t max_degree = 0;
  // z_counts[k] = number of vertices lying in components of size >= k,
  // for 0 <= k <= largest; z_counts[0] = z_counts[1] = n.
  std::vector<std::int64_t> z_counts;
};

// Union-find (path compression + union by size) component decomposition.
ComponentStats connected_components(const GraphSample& graph);

struct DegreeStats {
  std::vector<std::int64_t> degrees;  // degrees[v] for v in 1..n; [0] unused
  std::int64_t max_degree = 0;
  // tail[k] = empirical P(deg > k) for 0 <= k <= max_degree.
  std::vector<double> tail;
};

DegreeStats degree_stats(const GraphSample& graph);

// Exact sum_{i<j<=n} p(i,j) in O(n) via prefix sums (valid whenever no pair
// reaches the min(1,.) cap, which it checks).
double expected_edge_count(const ModelParams& params, std::int64_t n);

// Plain-text export: "# n=<n> gamma=<g> beta=<b> seed=<s>" then one sorted
// "i j" pair per line.
void write_edge_list(std::ostream& out, const GraphSample& graph);

}  // namespace irg
