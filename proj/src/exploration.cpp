#include "irg/exploration.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "irg/common.hpp"
#include "irg/graph.hpp"

namespace irg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require(bool cond, const char* who, const std::string& what) {
  if (!cond) throw UsageError(std::string(who) + ": " + what);
}

// Smallest vertex a position >= log b can project to; the config validation
// guarantees this equals ceil(b * m) computed from the stored double b.
std::int64_t collectable_lower_bound(const ExplorationConfig& cfg) {
  return static_cast<std::int64_t>(
      std::ceil(cfg.b * static_cast<double>(cfg.m)));
}

}  // namespace

std::int64_t success_threshold(const ExplorationConfig& cfg) {
  return static_cast<std::int64_t>(
      std::ceil(cfg.epsilon * std::pow(cfg.u, -cfg.rho)));
}

double overflow_threshold(const ExplorationConfig& cfg) {
  return 0.5 * cfg.a * std::pow(cfg.u, -cfg.rho);
}

double graph_size_bound(const ExplorationConfig& cfg) {
  return cfg.a * std::pow(static_cast<double>(cfg.m) / cfg.u, cfg.rho);
}

void validate_exploration_config(const ExplorationConfig& cfg) {
  const char* who = "validate_exploration_config";
  require(cfg.gamma > 0.0 && cfg.gamma < 0.5, who,
          "gamma must lie in (0, 1/2)");
  require(std::isfinite(cfg.tilde_beta) && cfg.tilde_beta > 0.0 &&
              cfg.tilde_beta < critical_beta(cfg.gamma),
          who,
          "tilde_beta must lie in (0, 1/4 - gamma/2) so the walk dies out");
  require(cfg.u > 0.0 && cfg.u < 1.0, who, "u must lie in (0, 1)");
  require(cfg.b > 0.0 && cfg.b < 1.0, who, "b must lie in (0, 1)");
  require(cfg.u < cfg.b, who, "u must be smaller than b");
  require(cfg.epsilon > 0.0 && cfg.epsilon < 1.0, who,
          "epsilon must lie in (0, 1)");
  require(cfg.a > 1.0 && std::isfinite(cfg.a), who,
          "a must be finite and exceed 1");
  require(cfg.rho > 0.0 && cfg.rho < 1.0, who, "rho must lie in (0, 1)");
  require(cfg.m >= 1 && cfg.m <= kMaxProjectionIndex, who,
          "m must lie in 1..2^45");
  const double m = static_cast<double>(cfg.m);
  require(cfg.u * cfg.b * m >= 1.0, who,
          "u*b*m must be at least 1 so every walk position projects to a "
          "vertex");
  require(std::pow(cfg.u, cfg.rho) * (1.0 + 1.0 / cfg.a) <= 0.5, who,
          "u^rho (1 + 1/a) must be at most 1/2 to keep the output graph "
          "within its size bound");
  const std::int64_t cbm = collectable_lower_bound(cfg);
  if (cbm >= 2) {
    ProjectionContext ctx(cfg.m);
    require(phi_m(ctx, cbm - 1) < std::log(cfg.b), who,
            "m is too small for b: positions at log b can project below "
            "ceil(b*m)");
  }
}

const char* to_string(FailureReason reason) {
  switch (reason) {
    case FailureReason::none:
      return "none";
    case FailureReason::collision:
      return "collision";
    case FailureReason::overflow:
      return "overflow";
    case FailureReason::underfill:
      return "underfill";
  }
  throw UsageError("to_string: unknown failure reason");
}

ExplorationResult algorithm1(const ExplorationConfig& cfg,
                             const ExplorationGraph& u_prime,
                             const std::vector<std::int64_t>& targets,
                             Rng& rng) {
  const char* who = "algorithm1";
  validate_exploration_config(cfg);
  const double m_real = static_cast<double>(cfg.m);
  const double um = cfg.u * m_real;
  const double bum = cfg.b * um;
  const auto prev_scale_max = static_cast<std::int64_t>(std::floor(um));

  require(std::adjacent_find(u_prime.vertices.begin(), u_prime.vertices.end(),
                             std::greater_equal<std::int64_t>()) ==
              u_prime.vertices.end(),
          who, "u_prime vertices must be strictly increasing");
  for (std::int64_t v : u_prime.vertices) {
    require(v >= 1 && v <= prev_scale_max, who,
            "u_prime vertices must lie in 1..floor(u*m)");
  }
  require(static_cast<double>(u_prime.vertices.size()) <=
              cfg.a * std::pow(m_real, cfg.rho),
          who, "u_prime exceeds its size bound a*m^rho");
  std::unordered_set<std::int64_t> in_u(u_prime.vertices.begin(),
                                        u_prime.vertices.end());
  for (const auto& e : u_prime.edges) {
    require(in_u.count(e.first) != 0 && in_u.count(e.second) != 0, who,
            "u_prime edges must join u_prime vertices");
  }
  require(static_cast<double>(targets.size()) <= std::pow(m_real, cfg.rho),
          who, "too many targets: d must be at most m^rho");
  for (std::size_t i = 0; i < targets.size(); ++i) {
    const std::int64_t t = targets[i];
    require(i == 0 || targets[i - 1] < t, who,
            "targets must be strictly increasing");
    require(static_cast<double>(t) > bum && static_cast<double>(t) <= um, who,
            "targets must lie in (b*u*m, u*m]");
    require(std::binary_search(u_prime.vertices.begin(),
                               u_prime.vertices.end(), t),
            who, "targets must be u_prime vertices");
  }

  ExplorationResult res;
  res.U = u_prime;
  const std::size_t d = targets.size();
  res.Y_sets.resize(d);
  res.X_sets.resize(d);
  res.success_flags.assign(d, 0);
  res.failure_reasons.assign(d, FailureReason::none);
  if (d == 0) return res;

  const Intensity intensity = make_intensity(cfg.gamma, cfg.tilde_beta);
  ProjectionContext ctx(cfg.m);
  const double window_lo = std::log(cfg.u * cfg.b);
  const double log_b = std::log(cfg.b);
  const std::int64_t need = success_threshold(cfg);
  const double abort_at = overflow_threshold(cfg);

  // Particles waiting to be processed, depth first; pushing a particle's
  // children in reverse sorted order visits them in increasing position.
  std::vector<std::pair<double, std::int64_t>> stack;
  for (std::size_t i = 0; i < d; ++i) {
    std::vector<std::int64_t>& y = res.Y_sets[i];
    FailureReason reason = FailureReason::none;
    bool success = false;
    std::int64_t processed = 0;
    stack.clear();
    {
      const double root_pos = phi_m(ctx, targets[i]);
      std::vector<double> kids =
          sample_offspring(intensity, root_pos, window_lo, 0.0, rng);
      for (auto it = kids.rbegin(); it != kids.rend(); ++it) {
        stack.emplace_back(*it, targets[i]);
      }
    }
    while (!stack.empty()) {
      const auto [pos, parent_vertex] = stack.back();
      stack.pop_back();
      const std::int64_t vertex = pi_m(ctx, pos);
      if (in_u.count(vertex) != 0) {
        reason = FailureReason::collision;
        break;
      }
      in_u.insert(vertex);
      res.U.vertices.push_back(vertex);
      res.U.edges.emplace_back(parent_vertex, vertex);
      ++processed;
      if (static_cast<double>(processed) >= abort_at) {
        reason = FailureReason::overflow;
        break;
      }
      if (pos >= log_b) {
        y.push_back(vertex);
        if (static_cast<std::int64_t>(y.size()) >= need) {
          success = true;
          break;
        }
      }
      std::vector<double> kids =
          sample_offspring(intensity, pos, window_lo, 0.0, rng);
      for (auto it = kids.rbegin(); it != kids.rend(); ++it) {
        stack.emplace_back(*it, vertex);
      }
    }
    if (success) {
      std::sort(y.begin(), y.end());
      res.success_flags[i] = 1;
    } else {
      if (reason == FailureReason::none) reason = FailureReason::underfill;
      y.clear();
    }
    res.failure_reasons[i] = reason;
  }
  std::sort(res.U.vertices.begin(), res.U.vertices.end());
  return res;
}

std::vector<std::vector<std::int64_t>> decouple(
    const std::vector<std::vector<std::int64_t>>& y_sets, std::int64_t k,
    double epsilon, const std::vector<double>& witnesses, Rng& rng) {
  const char* who = "decouple";
  require(k >= 1, who, "k must be at least 1");
  require(epsilon > 0.0 && epsilon <= 1.0, who, "epsilon must lie in (0, 1]");
  require(witnesses.size() == y_sets.size(), who,
          "need exactly one witness per set");
  for (double w : witnesses) {
    require(w > 0.0 && w <= 1.0, who, "witnesses must lie in (0, 1]");
    if (epsilon > w) {
      throw NumericError(
          std::string(who) +
          ": epsilon exceeds a witness probability (" + format_double(epsilon) +
          " > " + format_double(w) + "); the thinning target is unreachable");
    }
  }
  if (!y_sets.empty()) {
    bool any = false;
    for (const auto& y : y_sets) any = any || !y.empty();
    if (!any) {
      throw NumericError(std::string(who) +
                         ": every input set is empty; nothing can be thinned "
                         "to size " +
                         std::to_string(k));
    }
  }

  std::vector<std::vector<std::int64_t>> x_sets(y_sets.size());
  std::vector<std::int64_t> pick;
  for (std::size_t i = 0; i < y_sets.size(); ++i) {
    // One uniform per index, drawn unconditionally, keeps the acceptance
    // decisions independent across indices whatever the set sizes are.
    const double coin = rng.next_double();
    const auto& y = y_sets[i];
    const auto n = static_cast<std::int64_t>(y.size());
    if (n < k || !(coin < epsilon / witnesses[i])) continue;
    pick = y;
    for (std::int64_t j = 0; j < k; ++j) {
      const auto offset = static_cast<std::int64_t>(
          rng.next_below(static_cast<std::uint64_t>(n - j)));
      std::swap(pick[j], pick[j + offset]);
    }
    x_sets[i].assign(pick.begin(), pick.begin() + k);
    std::sort(x_sets[i].begin(), x_sets[i].end());
  }
  return x_sets;
}

WitnessEstimate estimate_success_witness(const ExplorationConfig& cfg,
                                         std::int64_t replicas, Rng& rng) {
  const char* who = "estimate_success_witness";
  validate_exploration_config(cfg);
  require(replicas >= 1, who, "replicas must be at least 1");
  const double m_real = static_cast<double>(cfg.m);
  const auto lo =
      static_cast<std::int64_t>(std::floor(cfg.b * cfg.u * m_real)) + 1;
  const auto hi = static_cast<std::int64_t>(std::floor(cfg.u * m_real));
  require(hi >= lo, who, "no admissible target exists at this scale");

  std::int64_t successes = 0;
  ExplorationGraph seed_graph;
  seed_graph.vertices.resize(1);
  std::vector<std::int64_t> targets(1);
  for (std::int64_t r = 0; r < replicas; ++r) {
    const std::int64_t target =
        lo + static_cast<std::int64_t>(
                 rng.next_below(static_cast<std::uint64_t>(hi - lo + 1)));
    seed_graph.vertices[0] = target;
    targets[0] = target;
    const ExplorationResult res = algorithm1(cfg, seed_graph, targets, rng);
    successes += res.success_flags[0];
  }
  WitnessEstimate est;
  est.replicas = replicas;
  est.prob = static_cast<double>(successes) / static_cast<double>(replicas);
  est.stderr_est =
      std::sqrt(est.prob * (1.0 - est.prob) / static_cast<double>(replicas));
  return est;
}

double WitnessTable::lookup(double pos) const {
  if (bins.empty()) {
    throw UsageError("WitnessTable::lookup: the table has no bins");
  }
  const double width =
      (pos_hi - pos_lo) / static_cast<double>(bins.size());
  auto idx = static_cast<std::int64_t>(std::floor((pos - pos_lo) / width));
  idx = std::max<std::int64_t>(
      0, std::min<std::int64_t>(idx, static_cast<std::int64_t>(bins.size()) - 1));
  return bins[static_cast<std::size_t>(idx)].prob;
}

double WitnessTable::min_prob() const {
  if (bins.empty()) {
    throw UsageError("WitnessTable::min_prob: the table has no bins");
  }
  double lowest = 1.0;
  for (const WitnessEstimate& bin : bins) lowest = std::min(lowest, bin.prob);
  return lowest;
}

WitnessTable estimate_witness_table(const ExplorationConfig& cfg,
                                    std::int64_t bin_count,
                                    std::int64_t replicas_per_bin, Rng& rng) {
  const char* who = "estimate_witness_table";
  validate_exploration_config(cfg);
  require(bin_count >= 1, who, "bin_count must be at least 1");
  require(replicas_per_bin >= 1, who, "replicas_per_bin must be at least 1");
  const double m_real = static_cast<double>(cfg.m);
  const auto lo_t =
      static_cast<std::int64_t>(std::floor(cfg.b * cfg.u * m_real)) + 1;
  const auto hi_t = static_cast<std::int64_t>(std::floor(cfg.u * m_real));
  require(hi_t >= lo_t, who, "no admissible target exists at this scale");

  WitnessTable table;
  table.pos_lo = std::log(cfg.u * cfg.b);
  table.pos_hi = std::log(cfg.u);
  table.bins.resize(static_cast<std::size_t>(bin_count));

  ProjectionContext ctx(cfg.m);
  ExplorationGraph seed_graph;
  seed_graph.vertices.resize(1);
  std::vector<std::int64_t> targets(1);
  for (std::int64_t bin = 0; bin < bin_count; ++bin) {
    const double mid = table.pos_lo + (table.pos_hi - table.pos_lo) *
                                          (static_cast<double>(bin) + 0.5) /
                                          static_cast<double>(bin_count);
    std::int64_t target = pi_m(ctx, mid);
    target = std::max(lo_t, std::min(hi_t, target));
    std::int64_t successes = 0;
    for (std::int64_t r = 0; r < replicas_per_bin; ++r) {
      seed_graph.vertices[0] = target;
      targets[0] = target;
      const ExplorationResult res = algorithm1(cfg, seed_graph, targets, rng);
      successes += res.success_flags[0];
    }
    WitnessEstimate& est = table.bins[static_cast<std::size_t>(bin)];
    est.replicas = replicas_per_bin;
    est.prob = static_cast<double>(successes) /
               static_cast<double>(replicas_per_bin);
    est.stderr_est = std::sqrt(est.prob * (1.0 - est.prob) /
                               static_cast<double>(replicas_per_bin));
  }
  return table;
}

namespace {

// One sample of the event "the walk from 0, killed above 0, never reaches
// log b or below".  Children below log b are detected before recursion, so
// only the (log b, 0]-confined part of the tree is ever materialized; that
// part is subcritical for every beta below 1/4 - gamma/2, hence finite.
bool stays_above(const Intensity& intensity, double log_b, Rng& rng,
                 std::int64_t max_particles) {
  std::vector<double> pending{0.0};
  std::int64_t produced = 1;
  while (!pending.empty()) {
    const double pos = pending.back();
    pending.pop_back();
    const std::vector<double> kids =
        sample_offspring(intensity, pos, -kInf, 0.0, rng);
    for (double child : kids) {
      if (child <= log_b) return false;
      pending.push_back(child);
    }
    produced += static_cast<std::int64_t>(kids.size());
    // Treat a fired cap as a dip: it biases the estimate downward, which
    // only makes the calibration more conservative.
    if (produced > max_particles) return false;
  }
  return true;
}

struct FreqEstimate {
  double freq = 0.0;
  double se = 0.0;
};

FreqEstimate frequency(std::int64_t hits, std::int64_t n) {
  FreqEstimate f;
  f.freq = static_cast<double>(hits) / static_cast<double>(n);
  f.se = std::sqrt(f.freq * (1.0 - f.freq) / static_cast<double>(n));
  return f;
}

}  // namespace

CalibrationResult calibrate_constants(const Intensity& intensity, double b,
                                      const MonteCarloBudget& mc) {
  const char* who = "calibrate_constants";
  require(b > 0.0 && b < 1.0, who, "b must lie in (0, 1)");
  require(intensity.gamma > 0.0 && intensity.gamma < 0.5, who,
          "gamma must lie in (0, 1/2)");
  require(intensity.beta > 0.0 &&
              intensity.beta < critical_beta(intensity.gamma),
          who, "the walk intensity must be subcritical");
  require(mc.replicas >= 100, who, "need at least 100 replicas per estimate");

  const ModelParams params = validate_params(intensity.gamma, intensity.beta);
  const double rho = rho_pm(params).rho_minus;
  const double log_b = std::log(b);
  const std::int64_t reps = mc.replicas;
  constexpr std::int64_t kDipCap = std::int64_t{1} << 22;

  // Probability that the walk from the top of the window never dips to
  // log b: one batch, reused for every epsilon candidate.
  std::int64_t stay_hits = 0;
  {
    Rng rng(derive_seed(mc.master_seed, "calibrate.dip", 0));
    for (std::int64_t r = 0; r < reps; ++r) {
      stay_hits += stays_above(intensity, log_b, rng, kDipCap) ? 1 : 0;
    }
  }
  const FreqEstimate dip = frequency(stay_hits, reps);

  // Scaled window counts u^rho * I at a fixed probe scale, sampled once and
  // thresholded per epsilon candidate.  u = 2^-9 is small enough for the
  // scaling regime while keeping the trees tiny.
  const double u_probe = std::pow(2.0, -9.0);
  std::vector<double> scaled_counts(static_cast<std::size_t>(reps));
  {
    Rng rng(derive_seed(mc.master_seed, "calibrate.window-count", 0));
    const double scale = std::pow(u_probe, rho);
    const TreeCaps caps;
    for (std::int64_t r = 0; r < reps; ++r) {
      const KilledTree tree =
          sample_killed_tree(intensity, std::log(u_probe),
                             std::log(u_probe * b), 0.0, caps, rng);
      std::int64_t count = 0;
      for (const Particle& p : tree.particles) {
        if (p.position >= log_b) ++count;
      }
      scaled_counts[static_cast<std::size_t>(r)] =
          scale * static_cast<double>(count);
    }
  }

  // epsilon: largest grid value passing both conditions with a two-standard-
  // error margin.
  double epsilon = 0.0;
  FreqEstimate y_at_epsilon;
  double best_gap = -kInf;
  std::string diag;
  for (std::int64_t step = 30; step >= 1; --step) {
    const double eps = 0.02 * static_cast<double>(step);
    std::int64_t y_hits = 0;
    for (double v : scaled_counts) y_hits += (v >= eps) ? 1 : 0;
    const FreqEstimate y = frequency(y_hits, reps);
    const double gap = std::min(dip.freq - 2.0 * dip.se - eps,
                                y.freq - 2.0 * y.se - 5.0 * eps);
    if (gap >= 0.0) {
      epsilon = eps;
      y_at_epsilon = y;
      break;
    }
    if (gap > best_gap) {
      best_gap = gap;
      diag = "closest miss at epsilon=" + format_double(eps) +
             ": stay-above=" + format_double(dip.freq) +
             " (se " + format_double(dip.se) + "), window-count freq=" +
             format_double(y.freq) + " (se " + format_double(y.se) +
             ", needs " + format_double(5.0 * eps) + ")";
    }
  }
  if (epsilon == 0.0) {
    throw NumericError(std::string(who) +
                       ": no epsilon on the grid satisfies both conditions; " +
                       diag);
  }

  // a: smallest grid value whose worst-case crowding estimate stays under
  // epsilon across scales and start positions.
  const std::vector<double> u_grid = {
      std::pow(2.0, -4.0), std::pow(2.0, -5.0), std::pow(2.0, -6.0),
      std::pow(2.0, -7.0), std::pow(2.0, -8.0), std::pow(2.0, -9.0),
      std::pow(2.0, -10.0)};
  std::vector<std::vector<std::int64_t>> progeny(u_grid.size() * 2);
  {
    const TreeCaps caps;
    for (std::size_t ui = 0; ui < u_grid.size(); ++ui) {
      for (std::size_t si = 0; si < 2; ++si) {
        Rng rng(derive_seed(mc.master_seed, "calibrate.crowding",
                            ui * 2 + si));
        const double u = u_grid[ui];
        // Worst starts: the top of the admissible range and (one ulp inside
        // the open barrier) its bottom, where upward jumps are cheapest.
        const double start = (si == 0)
                                 ? std::log(u)
                                 : std::nextafter(std::log(u * b), 0.0);
        std::vector<std::int64_t>& sizes = progeny[ui * 2 + si];
        sizes.resize(static_cast<std::size_t>(reps));
        for (std::int64_t r = 0; r < reps; ++r) {
          const KilledTree tree =
              sample_killed_tree(intensity, start, std::log(u * b), 0.0, caps,
                                 rng);
          sizes[static_cast<std::size_t>(r)] =
              static_cast<std::int64_t>(tree.particles.size());
        }
      }
    }
  }
  const std::vector<double> a_grid = {1.25, 1.5, 2.0, 2.5, 3.0,
                                      4.0,  5.0, 6.0, 8.0};
  double a_choice = 0.0;
  FreqEstimate crowd_at_a;
  double best_sup = kInf;
  for (double a : a_grid) {
    FreqEstimate worst;
    double worst_bound = -kInf;
    for (std::size_t ui = 0; ui < u_grid.size(); ++ui) {
      const double threshold = 0.5 * a * std::pow(u_grid[ui], -rho);
      for (std::size_t si = 0; si < 2; ++si) {
        std::int64_t hits = 0;
        for (std::int64_t size : progeny[ui * 2 + si]) {
          hits += (static_cast<double>(size) >= threshold) ? 1 : 0;
        }
        const FreqEstimate f = frequency(hits, reps);
        if (f.freq + 2.0 * f.se > worst_bound) {
          worst_bound = f.freq + 2.0 * f.se;
          worst = f;
        }
      }
    }
    best_sup = std::min(best_sup, worst_bound);
    if (worst_bound <= epsilon) {
      a_choice = a;
      crowd_at_a = worst;
      break;
    }
  }
  if (a_choice == 0.0) {
    throw NumericError(
        std::string(who) +
        ": no a on the grid keeps the crowding probability under epsilon=" +
        format_double(epsilon) +
        "; smallest worst-case estimate plus margin was " +
        format_double(best_sup));
  }

  CalibrationResult out;
  out.epsilon = epsilon;
  out.a = a_choice;
  out.u0 = std::min({b, std::pow(2.0, -1.0 / rho),
                     std::pow(a_choice / (2.0 * (a_choice + 1.0)), 1.0 / rho)});
  out.dip_freq = dip.freq;
  out.dip_se = dip.se;
  out.y_freq = y_at_epsilon.freq;
  out.y_se = y_at_epsilon.se;
  out.overflow_sup = crowd_at_a.freq;
  out.overflow_sup_se = crowd_at_a.se;
  return out;
}

EmbedResult embed_gw(const ModelParams& params, const EmbedConfig& cfg,
                     std::int64_t n, std::int64_t o_n, Rng& rng) {
  const char* who = "embed_gw";
  validate_params(params.gamma, params.beta);
  require(classify(params) == Regime::subcritical, who,
          "the embedding needs a subcritical graph");
  require(cfg.explore.gamma == params.gamma, who,
          "the walk's gamma must match the graph's");
  require(cfg.explore.tilde_beta < params.beta, who,
          "the walk's density must stay below the graph's beta");
  require(cfg.explore.u < cfg.u0, who, "u is not below the calibrated u0");
  require(cfg.rounds >= 1, who, "rounds must be at least 1");
  require(cfg.d_init >= 1, who, "d_init must be at least 1");
  require(!cfg.witness.bins.empty(), who, "the witness table must have bins");
  for (const WitnessEstimate& bin : cfg.witness.bins) {
    require(bin.prob > 0.0 && bin.prob <= 1.0, who,
            "witness probabilities must lie in (0, 1]");
  }
  require(cfg.explore.epsilon <= cfg.witness.min_prob(), who,
          "epsilon must not exceed the smallest witness probability");
  require(n >= 2 && n <= kMaxProjectionIndex, who, "n must lie in 2..2^45");

  // Scales m_1 < ... < m_rounds = n with m_{j-1} = floor(u * m_j); every
  // scale must admit a valid exploration pass.
  std::vector<std::int64_t> scales(static_cast<std::size_t>(cfg.rounds));
  scales.back() = n;
  for (std::size_t j = scales.size() - 1; j > 0; --j) {
    scales[j - 1] = static_cast<std::int64_t>(
        std::floor(cfg.explore.u * static_cast<double>(scales[j])));
  }
  ExplorationConfig round_cfg = cfg.explore;
  for (std::int64_t m : scales) {
    round_cfg.m = m;
    validate_exploration_config(round_cfg);
  }

  const double m1 = static_cast<double>(scales.front());
  const auto lo1 = static_cast<std::int64_t>(
                       std::floor(cfg.explore.b * cfg.explore.u * m1)) +
                   1;
  const auto hi1 =
      static_cast<std::int64_t>(std::floor(cfg.explore.u * m1));
  require(o_n - cfg.d_init + 1 >= lo1 && o_n <= hi1, who,
          "the seed vertices must lie in round 1's admissible range "
          "(b*u*m_1, u*m_1]");

  const std::int64_t k_off = success_threshold(cfg.explore);
  EmbedResult out;
  out.scales = scales;
  out.eps_sq_gt_u_rho = cfg.explore.epsilon * cfg.explore.epsilon >
                        std::pow(cfg.explore.u, cfg.explore.rho);
  out.mean_offspring = cfg.explore.epsilon * static_cast<double>(k_off);

  std::vector<std::int64_t> targets(static_cast<std::size_t>(cfg.d_init));
  std::iota(targets.begin(), targets.end(), o_n - cfg.d_init + 1);
  ExplorationGraph carried;
  carried.vertices = targets;

  for (std::size_t j = 0; j < scales.size(); ++j) {
    round_cfg.m = scales[j];
    ExplorationResult res = algorithm1(round_cfg, carried, targets, rng);

    bool any_collected = false;
    for (const auto& y : res.Y_sets) any_collected = any_collected || !y.empty();
    std::int64_t generation = 0;
    if (any_collected) {
      ProjectionContext ctx(scales[j]);
      std::vector<double> witnesses(targets.size());
      for (std::size_t i = 0; i < targets.size(); ++i) {
        witnesses[i] = cfg.witness.lookup(phi_m(ctx, targets[i]));
      }
      res.X_sets = decouple(res.Y_sets, k_off, cfg.explore.epsilon, witnesses,
                            rng);
      for (const auto& x : res.X_sets) {
        generation += static_cast<std::int64_t>(x.size());
      }
    }

    EmbedRound round;
    round.m = scales[j];
    round.targets = targets;
    round.success_flags = res.success_flags;
    round.failure_reasons = res.failure_reasons;
    for (const auto& y : res.Y_sets) {
      round.y_sizes.push_back(static_cast<std::int64_t>(y.size()));
    }
    for (const auto& x : res.X_sets) {
      round.x_sizes.push_back(static_cast<std::int64_t>(x.size()));
    }
    out.rounds.push_back(std::move(round));
    out.generation_sizes.push_back(generation);

    if (generation == 0) {
      out.survived = false;
      out.component_lower_bound = 0;
      return out;
    }
    if (j + 1 == scales.size()) {
      out.survived = true;
      out.component_lower_bound = generation;
      return out;
    }

    // Promote the union of the decoupled sets to the next scale's targets.
    const double next_m = static_cast<double>(scales[j + 1]);
    const double next_lo = cfg.explore.b * cfg.explore.u * next_m;
    const double next_hi = cfg.explore.u * next_m;
    std::vector<std::int64_t> next_targets;
    for (const auto& x : res.X_sets) {
      next_targets.insert(next_targets.end(), x.begin(), x.end());
    }
    std::sort(next_targets.begin(), next_targets.end());
    std::int64_t dropped = 0;
    std::vector<std::int64_t> admissible;
    for (std::int64_t v : next_targets) {
      const double vr = static_cast<double>(v);
      if (vr > next_lo && vr <= next_hi) {
        admissible.push_back(v);
      } else {
        ++dropped;
      }
    }
    const auto cap =
        static_cast<std::int64_t>(std::pow(next_m, cfg.explore.rho));
    if (static_cast<std::int64_t>(admissible.size()) > cap) {
      dropped += static_cast<std::int64_t>(admissible.size()) - cap;
      admissible.resize(static_cast<std::size_t>(cap));
    }
    out.rounds.back().dropped_targets = dropped;
    if (admissible.empty()) {
      out.survived = false;
      out.component_lower_bound = 0;
      return out;
    }
    targets = std::move(admissible);
    carried = std::move(res.U);
  }
  return out;  // unreachable; every branch above returns
}

BoundCheck coupling_bound_check(const ModelParams& params, double tilde_beta,
                                std::int64_t m, double u, double b,
                                std::int64_t r, std::int64_t s) {
  const char* who = "coupling_bound_check";
  require(tilde_beta > 0.0 && tilde_beta <= params.beta, who,
          "tilde_beta must lie in (0, beta]");
  require(m >= 1 && m <= kMaxProjectionIndex, who, "m must lie in 1..2^45");
  require(u > 0.0 && u < 1.0 && b > 0.0 && b < 1.0, who,
          "u and b must lie in (0, 1)");
  require(r != s, who, "r and s must differ");
  const double floor_pos = b * u * static_cast<double>(m);
  require(static_cast<double>(r) >= floor_pos && r <= m &&
              static_cast<double>(s) >= floor_pos && s <= m && r >= 1 &&
              s >= 1,
          who, "r and s must lie in [b*u*m, m]");

  const Intensity intensity = make_intensity(params.gamma, tilde_beta);
  double lo = 0.0;
  double hi = 0.0;
  if (s < r) {
    // Child cell left of the parent; the parent sits at its cell's left
    // endpoint, which maximizes the downward displacement mass.
    lo = -harmonic_diff(s - 1, r - 1);
    hi = -harmonic_diff(s, r - 1);
  } else {
    lo = harmonic_diff(r - 1, s - 1);
    hi = harmonic_diff(r - 1, s);
  }
  BoundCheck check;
  check.lhs = window_mass(intensity, lo, hi);
  check.rhs = edge_probability(params, r, s);
  check.ok = check.lhs <= check.rhs;
  return check;
}

BoundCheck lower_coupling_check(const ModelParams& params, double tilde_beta,
                                std::int64_t n, std::int64_t n0,
                                std::int64_t r,
                                std::optional<std::int64_t> m_vertex) {
  const char* who = "lower_coupling_check";
  require(tilde_beta >= params.beta, who, "tilde_beta must be at least beta");
  require(n >= 1 && n <= kMaxProjectionIndex, who, "n must lie in 1..2^45");
  require(n0 >= 1 && r > n0 && r <= n, who, "need n >= r > n0 >= 1");

  const Intensity intensity = make_intensity(params.gamma, tilde_beta);
  BoundCheck check;
  if (m_vertex.has_value()) {
    const std::int64_t mv = *m_vertex;
    require(mv >= n0 && mv <= n && mv != r, who,
            "need n >= m >= n0 with m != r");
    double lo = 0.0;
    double hi = 0.0;
    if (mv < r) {
      // Parent at its cell's right endpoint: the least favorable position
      // for spawning a child in a lower cell.
      lo = -harmonic_diff(mv - 1, r);
      hi = -harmonic_diff(mv, r);
    } else {
      lo = harmonic_diff(r, mv - 1);
      hi = harmonic_diff(r, mv);
    }
    check.lhs = -std::expm1(-window_mass(intensity, lo, hi));
    check.rhs = edge_probability(params, r, mv);
  } else {
    // Probability of at least one child at or below vertex n0's cell versus
    // the probability of at least one graph edge into {1..n0}.
    const double hi = -harmonic_diff(n0, r);
    check.lhs = -std::expm1(-window_mass(intensity, -kInf, hi));
    double log_none = 0.0;
    bool certain = false;
    for (std::int64_t mm = 1; mm <= n0; ++mm) {
      const double p = edge_probability(params, r, mm);
      if (p >= 1.0) {
        certain = true;
        break;
      }
      log_none += std::log1p(-p);
    }
    check.rhs = certain ? 1.0 : -std::expm1(log_none);
  }
  check.ok = check.lhs >= check.rhs;
  return check;
}

DominatingTreeResult dominating_tree_sim(const ModelParams& params,
                                         double tilde_beta, std::int64_t n,
                                         double epsilon, Rng& rng,
                                         std::optional<double> forced_start) {
  const char* who = "dominating_tree_sim";
  validate_params(params.gamma, params.beta);
  require(params.gamma < 0.5, who, "gamma must lie in (0, 1/2)");
  require(tilde_beta > params.beta &&
              tilde_beta < critical_beta(params.gamma),
          who, "tilde_beta must lie in (beta, 1/4 - gamma/2)");
  require(n >= 2, who, "n must be at least 2");
  require(epsilon > 0.0 && epsilon < 1.0, who, "epsilon must lie in (0, 1)");
  double start = 0.0;
  if (forced_start.has_value()) {
    require(std::isfinite(*forced_start) && *forced_start <= 0.0, who,
            "forced_start must be finite and at most 0");
    start = *forced_start;
  } else {
    start = -rng.exponential();
  }

  const Intensity intensity = make_intensity(params.gamma, tilde_beta);
  const TreeCaps caps;
  const KilledTree tree =
      sample_killed_tree(intensity, start, -kInf, 0.0, caps, rng);
  DominatingTreeResult out;
  out.progeny = static_cast<std::int64_t>(tree.particles.size());
  out.min_position = start;
  for (const Particle& p : tree.particles) {
    out.min_position = std::min(out.min_position, p.position);
  }
  out.escape =
      out.min_position <= -(1.0 - epsilon) * std::log(static_cast<double>(n));
  out.truncated = tree.truncated;
  return out;
}

}  // namespace irg
