// Exploration of the graph through branching random walks: the windowed
// depth-first exploration that grows a subgraph U and per-target vertex sets
// Y_i, the uniform-thinning decoupling that turns the Y_i into independent
// fixed-size sets X_i, the multi-round Galton-Watson embedding built from
// both, Monte Carlo calibration of the exploration constants, and the
// deterministic two-sided coupling checks between projected offspring
// probabilities and the graph kernel.
#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "irg/brw.hpp"
#include "irg/model.hpp"
#include "irg/projection.hpp"
#include "irg/rng.hpp"

namespace irg {

// Parameters for one exploration pass at scale m.  The offspring intensity
// is (gamma, tilde_beta); epsilon, a and rho set the stopping thresholds;
// u and b locate the exploration window:
//   targets lie in (b*u*m, u*m], the walk lives in (log(u*b), 0], and
//   particles in [log b, 0] are collected.
struct ExplorationConfig {
  double gamma = 0.0;       // spatial exponent of the offspring intensity
  double tilde_beta = 0.0;  // offspring density (typically below the graph's beta)
  double u = 0.0;           // scale ratio in (0, 1)
  double b = 0.0;           // collection-window fraction, u < b < 1
  double epsilon = 0.0;     // per-target success probability target in (0, 1)
  double a = 0.0;           // crowding constant > 1
  double rho = 0.0;         // exponent used in the set-size thresholds
  std::int64_t m = 0;       // vertex count at the current scale
};

// ceil(epsilon * u^-rho): a successful target collects exactly this many
// vertices.
std::int64_t success_threshold(const ExplorationConfig& cfg);

// (a/2) * u^-rho: processing this many vertices for one target aborts it.
double overflow_threshold(const ExplorationConfig& cfg);

// a * (m/u)^rho: upper bound on the output graph's vertex count.
double graph_size_bound(const ExplorationConfig& cfg);

// Validates field ranges plus the scale conditions that make the pass
// well-defined at finite m:
//   u*b*m >= 1          (every walk position projects to a vertex >= 1),
//   u^rho (1+1/a) <= 1/2 (the graph stays within graph_size_bound), and
//   phi_m(ceil(b*m)-1) < log b  (collected vertices land in {ceil(bm)..m}).
void validate_exploration_config(const ExplorationConfig& cfg);

// Why a target's exploration ended without success.
enum class FailureReason { none, collision, overflow, underfill };

const char* to_string(FailureReason reason);

// A small vertex-labelled graph grown by the exploration.
struct ExplorationGraph {
  std::vector<std::int64_t> vertices;  // sorted ascending, no duplicates
  std::vector<std::pair<std::int64_t, std::int64_t>> edges;  // insertion order
};

struct ExplorationResult {
  ExplorationGraph U;
  // Per target: collected vertices (sorted; empty exactly on failure, of
  // size success_threshold exactly on success), pairwise disjoint across
  // targets and contained in {ceil(b*m)..m}.
  std::vector<std::vector<std::int64_t>> Y_sets;
  // Filled by decouple(); empty vectors here.
  std::vector<std::vector<std::int64_t>> X_sets;
  std::vector<std::uint8_t> success_flags;
  std::vector<FailureReason> failure_reasons;
};

// Windowed branching-random-walk exploration.  For each target u_i in order:
// sample a walk killed outside (log(u*b), 0] started at phi_m(u_i) and visit
// its particles depth-first, children in increasing-position order, sampling
// offspring lazily so that an aborted branch consumes no randomness.  Every
// visited particle projects through pi_m to a vertex: a particle whose vertex
// is already in U aborts the target (collision); otherwise the vertex and the
// edge from its parent's vertex join U, and if the particle's position lies
// in [log b, 0] the vertex joins Y_i.  A target succeeds as soon as
// |Y_i| == success_threshold; processing overflow_threshold vertices aborts
// it (overflow), as does exhausting the walk (underfill).  Failed targets
// report empty Y_i.
//
// Preconditions (usage errors): valid cfg; u_prime's vertices sorted within
// {1..floor(u*m)} with edges between them and |u_prime| <= a * m^rho; targets
// strictly increasing members of u_prime with b*u*m < u_i <= u*m and
// |targets| <= m^rho.
ExplorationResult algorithm1(const ExplorationConfig& cfg,
                             const ExplorationGraph& u_prime,
                             const std::vector<std::int64_t>& targets,
                             Rng& rng);

// Uniform-thinning decoupling.  witnesses[i] estimates the conditional
// probability that |Y_i| >= k given the exploration's past; each index draws
// one uniform U_i and keeps a k-subset of Y_i (sampled without replacement)
// exactly when |Y_i| >= k and U_i <= epsilon / witnesses[i], so the subset
// sizes are independent over i with P(|X_i| = k) = epsilon whenever the
// witnesses are exact.  Throws NumericError when epsilon exceeds a witness
// (the thinning target is unreachable) or when every Y_i is empty.
std::vector<std::vector<std::int64_t>> decouple(
    const std::vector<std::vector<std::int64_t>>& y_sets, std::int64_t k,
    double epsilon, const std::vector<double>& witnesses, Rng& rng);

struct WitnessEstimate {
  double prob = 0.0;
  double stderr_est = 0.0;
  std::int64_t replicas = 0;
};

// Monte Carlo estimate of the per-target success probability of algorithm1
// at the given scale: each replica runs one fresh single-target pass whose
// target is drawn uniformly from the admissible range (b*u*m, u*m].
WitnessEstimate estimate_success_witness(const ExplorationConfig& cfg,
                                         std::int64_t replicas, Rng& rng);

// Success probability as a function of the target's start position.  The
// probability falls steeply across the admissible window (low starts reach
// the collection window with cheap upward jumps), so thinning against one
// scalar would skew the decoupled marginals; each target instead looks up
// the bin holding its own position.
struct WitnessTable {
  double pos_lo = 0.0;  // admissible start window (pos_lo, pos_hi],
  double pos_hi = 0.0;  // i.e. (log(u*b), log u]
  std::vector<WitnessEstimate> bins;  // equal width, left to right

  // Nearest bin's estimate; positions outside the window (e.g. small-index
  // targets whose harmonic correction pushes them past log u) clamp to the
  // end bins.
  double lookup(double pos) const;
  double min_prob() const;
};

// Builds a witness table for the exploration at cfg's scale: bin midpoints
// map through pi_m to concrete targets, each estimated with fixed-target
// replicas.  Estimating at a large cfg.m is recommended (positions are
// dense there and collisions negligible); the table remains valid across
// scales because success depends on the start position alone up to a
// collision correction.
WitnessTable estimate_witness_table(const ExplorationConfig& cfg,
                                    std::int64_t bin_count,
                                    std::int64_t replicas_per_bin, Rng& rng);

struct MonteCarloBudget {
  std::int64_t replicas = 4000;  // per grid point
  std::uint64_t master_seed = 0;
};

struct CalibrationResult {
  double epsilon = 0.0;
  double a = 0.0;
  double u0 = 0.0;
  // Diagnostics at the selected values.
  double dip_freq = 0.0;  // estimate of P(whole walk from 0 stays above log b)
  double dip_se = 0.0;
  double y_freq = 0.0;  // estimate of P(u^rho I(0,b) >= epsilon) at the probe u
  double y_se = 0.0;
  double overflow_sup = 0.0;  // sup over the u grid of P(|T_{ub,1}| >= (a/2) u^-rho)
  double overflow_sup_se = 0.0;  // standard error at the sup's argmax
};

// Chooses (epsilon, a, u0) for the exploration by Monte Carlo:
//   epsilon: largest grid value with (i) the dip estimate minus two standard
//     errors at least epsilon and (ii) the probe-scale estimate of
//     P(u^rho I(0,b) >= epsilon) minus two standard errors at least
//     5 * epsilon;
//   a: smallest grid value whose worst-case (over a u grid and both start
//     positions log u and log(u*b)) estimate of P(|T_{ub,1}| >= (a/2) u^-rho)
//     plus two standard errors is at most epsilon;
//   u0: min(b, 2^(-1/rho), (a/(2(a+1)))^(1/rho)); the last factor keeps the
//     output-graph size bound valid for every u < u0.
// All randomness derives from mc.master_seed.  Throws NumericError with
// diagnostics when no grid value qualifies.
CalibrationResult calibrate_constants(const Intensity& intensity, double b,
                                      const MonteCarloBudget& mc);

// Configuration of the multi-round embedding.  explore.m is ignored (set
// per round); u0 is the calibrated scale cap; d_init targets seed round 1;
// every round's decoupling reads each target's witness from the table.
struct EmbedConfig {
  ExplorationConfig explore;
  double u0 = 0.0;
  std::int64_t rounds = 1;
  std::int64_t d_init = 1;
  WitnessTable witness;
};

struct EmbedRound {
  std::int64_t m = 0;
  std::vector<std::int64_t> targets;
  std::vector<std::uint8_t> success_flags;
  std::vector<FailureReason> failure_reasons;
  std::vector<std::int64_t> y_sizes;
  std::vector<std::int64_t> x_sizes;
  // Next-round candidates outside the admissible range (boundary rounding)
  // or beyond the per-round target cap m^rho.
  std::int64_t dropped_targets = 0;
};

struct EmbedResult {
  std::vector<std::int64_t> generation_sizes;  // per round, sum of |X_i|
  std::int64_t component_lower_bound = 0;      // final generation's size
  bool survived = false;
  // Recorded sanity checks (not errors): epsilon^2 > u^rho and the mean
  // offspring epsilon * ceil(epsilon u^-rho) of the embedded process.
  bool eps_sq_gt_u_rho = false;
  double mean_offspring = 0.0;
  std::vector<std::int64_t> scales;  // m per round (floor chain from n)
  std::vector<EmbedRound> rounds;
};

// Runs the k-round exploration pipeline that embeds a Galton-Watson tree
// into the component of vertex o_n: scales m_1 < ... < m_k = n with
// m_{j-1} = floor(u * m_j); round j explores the current targets at scale
// m_j (algorithm1), decouples the collected sets into independent X_i of
// size ceil(epsilon u^-rho), and promotes their union (filtered to the next
// round's admissible range, overflow counted in dropped_targets) to round
// j+1's targets.  Round 1's targets are o_n, o_n - 1, ..., o_n - d_init + 1.
// The graph U carries over between rounds so collected sets stay disjoint
// across the whole run.
//
// Usage errors: cfg.explore invalid at some scale, gamma mismatch with
// params, tilde_beta >= params.beta, u >= u0, o_n or d_init outside round
// 1's admissible range, rounds < 1, or n out of range.
EmbedResult embed_gw(const ModelParams& params, const EmbedConfig& cfg,
                     std::int64_t n, std::int64_t o_n, Rng& rng);

struct BoundCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  bool ok = false;
};

// Upper coupling check: lhs is the worst-case (over the particle's position
// in vertex r's cell) probability that a walk particle projected to vertex r
// has a child projected to vertex s != r, for the intensity (gamma of
// params, tilde_beta); rhs = beta (r^s)^-gamma (rvs)^(gamma-1) is the graph
// kernel.  ok = (lhs <= rhs): edges inserted by the exploration are no more
// likely than graph edges.  Requires b*u*m <= r, s <= m and r != s.
BoundCheck coupling_bound_check(const ModelParams& params, double tilde_beta,
                                std::int64_t m, double u, double b,
                                std::int64_t r, std::int64_t s);

// Lower coupling check for the dominating walk on {1..n}.  With m_vertex
// given (part i): lhs is the worst-case-low probability that a particle at
// vertex r spawns a child at vertex m_vertex, rhs the graph kernel, and
// ok = (lhs >= rhs).  Without m_vertex (part ii): lhs is the probability of
// a child projecting to some vertex <= n0, rhs = 1 - prod_{m=1}^{n0}
// (1 - beta m^-gamma r^(gamma-1)), ok = (lhs >= rhs).  Requires
// n >= r > n0 >= 1 and, for part i, n >= m_vertex >= 1 with m_vertex != r.
BoundCheck lower_coupling_check(const ModelParams& params, double tilde_beta,
                                std::int64_t n, std::int64_t n0,
                                std::int64_t r,
                                std::optional<std::int64_t> m_vertex);

struct DominatingTreeResult {
  std::int64_t progeny = 0;      // total particles, root included
  double min_position = 0.0;
  bool escape = false;           // min_position <= -(1-epsilon) log n
  bool truncated = false;        // a safety cap fired
};

// Samples the dominating killed walk: start at -X for X ~ exponential(1)
// (or forced_start when given), kill outside (-inf, 0], intensity
// (params.gamma, tilde_beta).  Requires params.beta < tilde_beta <
// critical_beta, n >= 2, epsilon in (0, 1).
DominatingTreeResult dominating_tree_sim(const ModelParams& params,
                                         double tilde_beta, std::int64_t n,
                                         double epsilon, Rng& rng,
                                         std::optional<double> forced_start =
                                             std::nullopt);

}  // namespace irg
