// Branching random walks with the two-sided exponential displacement
// intensity
//   pi(dx) = beta * (e^(gamma*x) 1{x>0} + e^((1-gamma)*x) 1{x<0}) dx,
// killing barriers, the frozen/branching cluster decomposition, and the
// additive martingales W_n = sum_{|v|=n} e^(-rho * V(v)).
//
// pi has finite mass on (-inf, c] for every finite c but infinite mass on
// the full line, so every simulation must bound displacement windows from
// the right: killed trees by their barrier, unkilled walks by an explicit
// right cutoff with a documented bias bound.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "irg/model.hpp"
#include "irg/rng.hpp"

namespace irg {

struct Intensity {
  double gamma = 0.0;  // in (0, 1/2)
  double beta = 0.0;   // positive; may differ from the graph's beta
};

// Validates gamma in (0, 1/2) and beta > 0.
Intensity make_intensity(double gamma, double beta);

// Same pair as the graph parameters (requires gamma < 1/2).
Intensity intensity_from(const ModelParams& params);

// Integral of pi over (lo, hi]:
//   beta * [ (e^((1-gamma)(hi^0)) - e^((1-gamma)(lo^0))) / (1-gamma)
//          + (e^(gamma(hi v 0)) - e^(gamma(lo v 0))) / gamma ].
// lo = -inf is a valid limit; hi = +inf errors (infinite mass).
double window_mass(const Intensity& intensity, double lo, double hi);

// Right cutoff R such that the omitted e^(-rho x)-weighted mass
// int_R^inf e^(-rho x) pi(dx) = beta e^(-(rho-gamma)R) / (rho-gamma)
// equals bias_target.  Requires rho > gamma and bias_target > 0.
double right_cutoff_for_bias(const Intensity& intensity, double rho,
                             double bias_target);

// int_{-inf}^{R} e^(-rho x) pi(dx)
//   = beta/(1-gamma-rho) + beta(1 - e^(-(rho-gamma)R))/(rho-gamma);
// tends to psi(rho) as R -> inf.  Requires gamma < rho < 1-gamma.
double martingale_mean_truncated(const Intensity& intensity, double rho,
                                 double right_cutoff);

// Children of a particle at parent_pos whose absolute positions fall in
// (window_lo, window_hi]: count ~ Poisson(window_mass of the displacement
// window), positions i.i.d. from pi restricted to the window (two-piece
// inverse CDF), returned sorted ascending.  window_hi must be finite.
std::vector<double> sample_offspring(const Intensity& intensity,
                                     double parent_pos, double window_lo,
                                     double window_hi, Rng& rng);

struct Particle {
  double position = 0.0;
  std::int64_t parent = -1;  // index into the arena; -1 for the root
  std::int64_t generation = 0;
};

// Safety caps for tree growth; a fired cap sets truncated (never silently
// drops work), and estimators are expected to reject truncated replicas.
struct TreeCaps {
  std::int64_t max_particles = std::int64_t{1} << 22;
  std::int64_t max_generations = std::int64_t{1} << 20;
};

struct KilledTree {
  // Breadth-first birth order; root at index 0.
  std::vector<Particle> particles;
  double start = 0.0;
  // Survival window (barrier_lo, barrier_hi]; barrier_lo may be -inf.
  // Displacement-truncated (unkilled) walks use (-inf, +inf].
  double barrier_lo = 0.0;
  double barrier_hi = 0.0;
  // Per-child displacement cap for unkilled walks; +inf for killed trees.
  double displacement_hi = 0.0;
  bool truncated = false;
  // All generations <= complete_generations are fully materialized.
  std::int64_t complete_generations = 0;
};

// T_{a,d}(start): particles outside (log_a, log_d] are killed with their
// descendants.  Requires log_a < start <= log_d, log_d finite.
KilledTree sample_killed_tree(const Intensity& intensity, double start,
                              double log_a, double log_d, const TreeCaps& caps,
                              Rng& rng);

// Unkilled walk run for `generations` generations with every displacement
// sampled in (-inf, right_cutoff]; the omitted weight per particle and
// generation is bounded by the right_cutoff_for_bias integral.
KilledTree sample_brw_truncated(const Intensity& intensity, double start,
                                std::int64_t generations, double right_cutoff,
                                const TreeCaps& caps, Rng& rng);

// Number of particles (root included) with position in (log_b, 0].
// Requires barrier_hi == 0 and log_b <= 0.
std::int64_t count_I(const KilledTree& tree, double log_b);

// W_n(rho) = sum over generation-n particles of e^(-rho * position).
// Errors when generation n is not fully materialized.
double martingale_W(const KilledTree& tree, std::int64_t n, double rho);

// Debug export: one particle per line, "id parent generation position",
// in breadth-first birth order.
void write_tree(std::ostream& out, const KilledTree& tree);

struct FrozenCaps {
  // Per-child displacement cap for frozen children (right_cutoff_for_bias
  // gives the value for a target Malthusian-sum bias).
  double right_cutoff = 0.0;
  std::int64_t max_branching = std::int64_t{1} << 20;
  std::int64_t max_frozen = std::int64_t{1} << 24;
};

struct FrozenDecomposition {
  // Positions (relative to the cluster ancestor, all > 0) of frozen
  // particles; finite only thanks to the right cutoff.
  std::vector<double> xi;
  // Positions (<= 0) of the branching set, ancestor (at 0) included.
  std::vector<double> branching_positions;
  std::int64_t branching_count = 0;
  bool truncated = false;
};

// Cluster of a particle placed at 0: children at or left of the ancestor
// are branching (recurse, still splitting at 0), children right of it are
// frozen.  Requires a subcritical intensity (beta < 1/4 - gamma/2).
FrozenDecomposition frozen_decompose(const Intensity& intensity,
                                     const FrozenCaps& caps, Rng& rng);

// General branching process count Z_t^phi: individuals are clusters, an
// individual born at time s spawns children at s + x for each frozen x
// (exactly truncated at the horizon t, no bias), and contributes the number
// of branching members with relative position in (log_b + (t - s), 0].
// Distributionally equal to count_I(T_{0,1}(-t), log_b).  Requires t > 0 and
// log_b < 0.  Throws NumericError if the caps fire.
std::int64_t cmj_count(const Intensity& intensity, double t, double log_b,
                       const TreeCaps& caps, Rng& rng);

}  // namespace irg
