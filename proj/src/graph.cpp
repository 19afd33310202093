#include "irg/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <string>

#include "irg/rng.hpp"

namespace irg {

namespace {

void require_vertex_count(std::int64_t n) {
  if (n < 1) throw UsageError("graph sampler: n must be >= 1");
}

std::uint64_t stream_seed(std::uint64_t seed, const char* sampler_id,
                          std::int64_t n) {
  return derive_seed(seed, std::string("graph/") + sampler_id,
                     static_cast<std::uint64_t>(n));
}

}  // namespace

double edge_probability(const ModelParams& params, std::int64_t i,
                        std::int64_t j) {
  if (i == j) {
    throw UsageError("edge_probability: self-loops are excluded (i == j)");
  }
  if (i < 1 || j < 1) {
    throw UsageError("edge_probability: vertex indices must be >= 1");
  }
  double lo = static_cast<double>(std::min(i, j));
  double hi = static_cast<double>(std::max(i, j));
  double p = params.beta * std::pow(hi, params.gamma - 1.0) *
             std::pow(lo, -params.gamma);
  return p < 1.0 ? p : 1.0;
}

GraphSample sample_graph_naive(const ModelParams& params, std::int64_t n,
                               std::uint64_t seed) {
  require_vertex_count(n);
  GraphSample g;
  g.n = n;
  g.params = params;
  g.seed = seed;
  g.sampler_id = "naive";
  Rng rng(stream_seed(seed, "naive", n));
  for (std::int64_t j = 2; j <= n; ++j) {
    // One uniform per pair regardless of outcome keeps the stream layout
    // fixed: pair (i,j) always sees the same draw for a given seed.
    double col = params.beta * std::pow(static_cast<double>(j),
                                        params.gamma - 1.0);
    for (std::int64_t i = 1; i < j; ++i) {
      double p = col * std::pow(static_cast<double>(i), -params.gamma);
      if (p > 1.0) p = 1.0;
      if (rng.next_double() < p) g.edges.emplace_back(i, j);
    }
  }
  std::sort(g.edges.begin(), g.edges.end());
  return g;
}

GraphSample sample_graph_fast(const ModelParams& params, std::int64_t n,
                              std::uint64_t seed) {
  require_vertex_count(n);
  GraphSample g;
  g.n = n;
  g.params = params;
  g.seed = seed;
  g.sampler_id = "fast";
  Rng rng(stream_seed(seed, "fast", n));
  // Column j: probabilities p(i) = min(1, col * i^-gamma) are nonincreasing
  // in i.  Maintain p_bar = p(last landed index), which dominates every
  // remaining p(i).  Jump ahead by a Geometric(p_bar) step (so intermediate
  // indices are non-candidates), then accept the landing index i with
  // probability p(i)/p_bar.
  //
  // Exactness: the first unvisited index k becomes a candidate with
  // probability p_bar and, if so, an edge with probability p(k)/p_bar, so
  // P(edge at k) = p(k).  Whether k was skipped, rejected, or accepted, the
  // dominating probability seen by k+1 still bounds p(k+1), and the same
  // marginal computation applies, independent of the outcome at k.
  for (std::int64_t j = 2; j <= n; ++j) {
    double col = params.beta * std::pow(static_cast<double>(j),
                                        params.gamma - 1.0);
    double p_bar = col;  // p(1, j) before the cap
    if (p_bar > 1.0) p_bar = 1.0;
    std::int64_t i = 0;
    while (i < j - 1) {
      if (p_bar >= 1.0) {
        i += 1;  // every index is a candidate
      } else if (p_bar <= 0.0) {
        break;
      } else {
        double u = rng.next_double_pos();
        double step = 1.0 + std::floor(std::log(u) / std::log1p(-p_bar));
        if (!(step >= 1.0) || step > static_cast<double>(j - 1 - i)) {
          break;  // skip carries past the end of the column
        }
        i += static_cast<std::int64_t>(step);
      }
      if (i > j - 1) break;
      double p = col * std::pow(static_cast<double>(i), -params.gamma);
      if (p > 1.0) p = 1.0;
      if (rng.next_double() * p_bar < p) g.edges.emplace_back(i, j);
      p_bar = p;
    }
  }
  std::sort(g.edges.begin(), g.edges.end());
  return g;
}

ComponentStats connected_components(const GraphSample& graph) {
  std::int64_t n = graph.n;
  std::vector<std::int64_t> parent(static_cast<std::size_t>(n) + 1);
  std::vector<std::int64_t> size(static_cast<std::size_t>(n) + 1, 1);
  std::iota(parent.begin(), parent.end(), std::int64_t{0});

  auto find = [&](std::int64_t v) {
    std::int64_t root = v;
    while (parent[root] != root) root = parent[root];
    while (parent[v] != root) {
      std::int64_t next = parent[v];
      parent[v] = root;
      v = next;
    }
    return root;
  };

  std::vector<std::int64_t> degree(static_cast<std::size_t>(n) + 1, 0);
  for (const auto& [a, b] : graph.edges) {
    ++degree[a];
    ++degree[b];
    std::int64_t ra = find(a), rb = find(b);
    if (ra == rb) continue;
    if (size[ra] < size[rb]) std::swap(ra, rb);
    parent[rb] = ra;
    size[ra] += size[rb];
  }

  ComponentStats stats;
  stats.component_of.assign(static_cast<std::size_t>(n) + 1, -1);
  std::vector<std::int64_t> root_id(static_cast<std::size_t>(n) + 1, -1);
  std::int64_t next_id = 0;
  for (std::int64_t v = 1; v <= n; ++v) {
    std::int64_t r = find(v);
    if (root_id[r] < 0) {
      root_id[r] = next_id++;
      stats.component_sizes.push_back(size[r]);
    }
    stats.component_of[v] = root_id[r];
  }
  std::sort(stats.component_sizes.begin(), stats.component_sizes.end(),
            std::greater<>());
  stats.largest = stats.component_sizes.empty() ? 0 : stats.component_sizes[0];
  stats.max_degree = n > 0 ? *std::max_element(degree.begin() + 1, degree.end())
                           : 0;

  stats.z_counts.assign(static_cast<std::size_t>(stats.largest) + 1, 0);
  for (std::int64_t s : stats.component_sizes) {
    // A component of size s contributes s vertices to every k <= s.
    for (std::int64_t k = 1; k <= s; ++k) stats.z_counts[k] += s;
  }
  if (!stats.z_counts.empty()) stats.z_counts[0] = n;
  return stats;
}

DegreeStats degree_stats(const GraphSample& graph) {
  DegreeStats d;
  d.degrees.assign(static_cast<std::size_t>(graph.n) + 1, 0);
  for (const auto& [a, b] : graph.edges) {
    ++d.degrees[a];
    ++d.degrees[b];
  }
  d.max_degree = 0;
  for (std::int64_t v = 1; v <= graph.n; ++v) {
    d.max_degree = std::max(d.max_degree, d.degrees[v]);
  }
  // tail[k] = P(deg > k): count degrees exceeding k.
  std::vector<std::int64_t> count(static_cast<std::size_t>(d.max_degree) + 2, 0);
  for (std::int64_t v = 1; v <= graph.n; ++v) ++count[d.degrees[v]];
  d.tail.assign(static_cast<std::size_t>(d.max_degree) + 1, 0.0);
  std::int64_t above = graph.n;
  for (std::int64_t k = 0; k <= d.max_degree; ++k) {
    above -= count[k];  // now: number of vertices with degree > k
    d.tail[k] = static_cast<double>(above) / static_cast<double>(graph.n);
  }
  return d;
}

double expected_edge_count(const ModelParams& params, std::int64_t n) {
  require_vertex_count(n);
  if (edge_probability(params, 1, 2) >= 1.0) {
    throw NumericError(
        "expected_edge_count: probability cap reached; prefix-sum formula "
        "would be invalid");
  }
  // sum_{i<j} beta * i^-gamma * j^(gamma-1)
  //   = beta * sum_j j^(gamma-1) * S(j-1),  S(k) = sum_{i<=k} i^-gamma.
  double total = 0.0;
  double prefix = 0.0;
  for (std::int64_t j = 2; j <= n; ++j) {
    prefix += std::pow(static_cast<double>(j - 1), -params.gamma);
    total += std::pow(static_cast<double>(j), params.gamma - 1.0) * prefix;
  }
  return params.beta * total;
}

void write_edge_list(std::ostream& out, const GraphSample& graph) {
  out << "# n=" << graph.n << " gamma=" << format_double(graph.params.gamma)
      << " beta=" << format_double(graph.params.beta)
      << " seed=" << graph.seed << '\n';
  for (const auto& [a, b] : graph.edges) {
    out << a << ' ' << b << '\n';
  }
}

}  // namespace irg
