#include "irg/brw.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <ostream>

namespace irg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_intensity(const Intensity& intensity, const char* who) {
  if (!(intensity.gamma > 0.0) || !(intensity.gamma < 0.5)) {
    throw UsageError(std::string(who) + ": gamma must lie in (0, 1/2)");
  }
  if (!(intensity.beta > 0.0) || !std::isfinite(intensity.beta)) {
    throw UsageError(std::string(who) + ": beta must be positive and finite");
  }
}

void require_subcritical_intensity(const Intensity& intensity,
                                   const char* who) {
  require_intensity(intensity, who);
  if (!(intensity.beta < 0.25 - 0.5 * intensity.gamma)) {
    throw UsageError(std::string(who) +
                     ": requires a subcritical intensity "
                     "(beta < 1/4 - gamma/2)");
  }
}

// Integral of e^(rate*x) over (a, b], written so that nearby endpoints do
// not cancel.  a may be -inf.
double piece_mass(double rate, double a, double b) {
  if (!(a < b)) return 0.0;
  if (a == -kInf) return std::exp(rate * b) / rate;
  return std::exp(rate * a) * std::expm1(rate * (b - a)) / rate;
}

// One draw from the density proportional to e^(rate*x) on (a, b].
double sample_piece(double rate, double a, double b, Rng& rng) {
  double u = rng.next_double_pos();  // (0, 1]; u = 1 lands exactly on b
  double x;
  if (a == -kInf) {
    x = b + std::log(u) / rate;
  } else {
    x = a + std::log1p(u * std::expm1(rate * (b - a))) / rate;
  }
  // Guard the window against one-ulp rounding spills.
  if (x > b) x = b;
  if (x <= a) x = std::nextafter(a, b);
  return x;
}

// Appends children of a particle at parent_pos with absolute positions in
// (window_lo, window_hi]; returns the number appended.  Draw order: one
// Poisson count, then per child an optional piece selector plus one
// position uniform.
std::size_t append_offspring(const Intensity& intensity, double parent_pos,
                             double window_lo, double window_hi, Rng& rng,
                             std::vector<double>& out) {
  double lo = window_lo - parent_pos;
  double hi = window_hi - parent_pos;
  double neg_rate = 1.0 - intensity.gamma;
  double pos_rate = intensity.gamma;
  double mass_neg =
      intensity.beta * piece_mass(neg_rate, std::min(lo, 0.0), std::min(hi, 0.0));
  double mass_pos =
      intensity.beta * piece_mass(pos_rate, std::max(lo, 0.0), std::max(hi, 0.0));
  double total = mass_neg + mass_pos;
  if (total <= 0.0) return 0;
  std::int64_t count = sample_poisson(rng, total);
  for (std::int64_t k = 0; k < count; ++k) {
    bool negative;
    if (mass_neg <= 0.0) {
      negative = false;
    } else if (mass_pos <= 0.0) {
      negative = true;
    } else {
      negative = rng.next_double() * total < mass_neg;
    }
    double d = negative
                   ? sample_piece(neg_rate, std::min(lo, 0.0), std::min(hi, 0.0), rng)
                   : sample_piece(pos_rate, std::max(lo, 0.0), std::max(hi, 0.0), rng);
    out.push_back(parent_pos + d);
  }
  return static_cast<std::size_t>(count);
}

}  // namespace

Intensity make_intensity(double gamma, double beta) {
  Intensity intensity{gamma, beta};
  require_intensity(intensity, "make_intensity");
  return intensity;
}

Intensity intensity_from(const ModelParams& params) {
  return make_intensity(params.gamma, params.beta);
}

double window_mass(const Intensity& intensity, double lo, double hi) {
  require_intensity(intensity, "window_mass");
  if (hi == kInf) {
    throw UsageError("window_mass: the intensity has infinite mass on any "
                     "right-unbounded window");
  }
  if (!(lo <= hi)) {
    throw UsageError("window_mass: requires lo <= hi");
  }
  double neg = piece_mass(1.0 - intensity.gamma, std::min(lo, 0.0),
                          std::min(hi, 0.0));
  double pos = piece_mass(intensity.gamma, std::max(lo, 0.0),
                          std::max(hi, 0.0));
  return intensity.beta * (neg + pos);
}

double right_cutoff_for_bias(const Intensity& intensity, double rho,
                             double bias_target) {
  require_intensity(intensity, "right_cutoff_for_bias");
  if (!(rho > intensity.gamma)) {
    throw UsageError("right_cutoff_for_bias: requires rho > gamma");
  }
  if (!(bias_target > 0.0)) {
    throw UsageError("right_cutoff_for_bias: bias_target must be positive");
  }
  double rate = rho - intensity.gamma;
  return std::log(intensity.beta / (rate * bias_target)) / rate;
}

double martingale_mean_truncated(const Intensity& intensity, double rho,
                                 double right_cutoff) {
  require_intensity(intensity, "martingale_mean_truncated");
  if (!(rho > intensity.gamma) || !(rho < 1.0 - intensity.gamma)) {
    throw UsageError(
        "martingale_mean_truncated: requires gamma < rho < 1-gamma");
  }
  double neg_rate = 1.0 - intensity.gamma - rho;  // > 0
  double pos_rate = rho - intensity.gamma;        // > 0
  // int_{-inf}^{min(R,0)} e^((1-gamma-rho)x) dx, then the (0, R] part.
  double mean = std::exp(neg_rate * std::min(right_cutoff, 0.0)) / neg_rate;
  if (right_cutoff > 0.0) {
    mean += -std::expm1(-pos_rate * right_cutoff) / pos_rate;
  }
  return intensity.beta * mean;
}

std::vector<double> sample_offspring(const Intensity& intensity,
                                     double parent_pos, double window_lo,
                                     double window_hi, Rng& rng) {
  require_intensity(intensity, "sample_offspring");
  if (window_hi == kInf) {
    throw UsageError("sample_offspring: window_hi must be finite");
  }
  if (!(window_lo <= window_hi)) {
    throw UsageError("sample_offspring: requires window_lo <= window_hi");
  }
  std::vector<double> out;
  append_offspring(intensity, parent_pos, window_lo, window_hi, rng, out);
  std::sort(out.begin(), out.end());
  return out;
}

KilledTree sample_killed_tree(const Intensity& intensity, double start,
                              double log_a, double log_d, const TreeCaps& caps,
                              Rng& rng) {
  require_intensity(intensity, "sample_killed_tree");
  if (!std::isfinite(log_d)) {
    throw UsageError("sample_killed_tree: log_d must be finite");
  }
  if (!(log_a < start) || !(start <= log_d)) {
    throw UsageError("sample_killed_tree: requires log_a < start <= log_d");
  }
  KilledTree tree;
  tree.start = start;
  tree.barrier_lo = log_a;
  tree.barrier_hi = log_d;
  tree.displacement_hi = kInf;
  tree.particles.push_back(Particle{start, -1, 0});
  std::vector<double> children;
  std::size_t next = 0;
  while (next < tree.particles.size()) {
    Particle parent = tree.particles[next];
    if (parent.generation >= caps.max_generations) {
      tree.truncated = true;
      tree.complete_generations = parent.generation;
      return tree;
    }
    children.clear();
    append_offspring(intensity, parent.position, log_a, log_d, rng, children);
    std::sort(children.begin(), children.end());
    if (static_cast<std::int64_t>(tree.particles.size() + children.size()) >
        caps.max_particles) {
      tree.truncated = true;
      tree.complete_generations = parent.generation;
      return tree;
    }
    for (double pos : children) {
      tree.particles.push_back(
          Particle{pos, static_cast<std::int64_t>(next), parent.generation + 1});
    }
    ++next;
  }
  tree.complete_generations = std::numeric_limits<std::int64_t>::max();
  return tree;
}

KilledTree sample_brw_truncated(const Intensity& intensity, double start,
                                std::int64_t generations, double right_cutoff,
                                const TreeCaps& caps, Rng& rng) {
  require_intensity(intensity, "sample_brw_truncated");
  if (!(right_cutoff > 0.0) || !std::isfinite(right_cutoff)) {
    throw UsageError("sample_brw_truncated: right_cutoff must be positive "
                     "and finite");
  }
  if (generations < 0) {
    throw UsageError("sample_brw_truncated: generations must be >= 0");
  }
  KilledTree tree;
  tree.start = start;
  tree.barrier_lo = -kInf;
  tree.barrier_hi = kInf;
  tree.displacement_hi = right_cutoff;
  tree.particles.push_back(Particle{start, -1, 0});
  std::vector<double> children;
  std::size_t next = 0;
  while (next < tree.particles.size()) {
    Particle parent = tree.particles[next];
    if (parent.generation >= generations) break;  // requested horizon
    if (parent.generation >= caps.max_generations) {
      tree.truncated = true;
      tree.complete_generations = parent.generation;
      return tree;
    }
    children.clear();
    append_offspring(intensity, parent.position, -kInf,
                     parent.position + right_cutoff, rng, children);
    std::sort(children.begin(), children.end());
    if (static_cast<std::int64_t>(tree.particles.size() + children.size()) >
        caps.max_particles) {
      tree.truncated = true;
      tree.complete_generations = parent.generation;
      return tree;
    }
    for (double pos : children) {
      tree.particles.push_back(
          Particle{pos, static_cast<std::int64_t>(next), parent.generation + 1});
    }
    ++next;
  }
  tree.complete_generations = generations;
  return tree;
}

std::int64_t count_I(const KilledTree& tree, double log_b) {
  if (tree.barrier_hi != 0.0) {
    throw UsageError("count_I: requires a tree with right barrier at 0");
  }
  if (!(log_b <= 0.0)) {
    throw UsageError("count_I: requires log_b <= 0");
  }
  std::int64_t count = 0;
  for (const Particle& p : tree.particles) {
    if (p.position > log_b && p.position <= 0.0) ++count;
  }
  return count;
}

double martingale_W(const KilledTree& tree, std::int64_t n, double rho) {
  if (n < 0) throw UsageError("martingale_W: generation must be >= 0");
  if (n > tree.complete_generations) {
    throw UsageError("martingale_W: generation " + std::to_string(n) +
                     " is not fully materialized");
  }
  double sum = 0.0;
  for (const Particle& p : tree.particles) {
    if (p.generation == n) sum += std::exp(-rho * p.position);
  }
  return sum;
}

void write_tree(std::ostream& out, const KilledTree& tree) {
  for (std::size_t id = 0; id < tree.particles.size(); ++id) {
    const Particle& p = tree.particles[id];
    out << id << ' ' << p.parent << ' ' << p.generation << ' '
        << format_double(p.position) << '\n';
  }
}

namespace {

struct ClusterLimits {
  double frozen_abs_hi = kInf;   // ceiling on the frozen position itself
  double frozen_disp_hi = kInf;  // ceiling on the displacement from a parent
  std::int64_t max_branching = 0;
  std::int64_t max_frozen = 0;
};

// Cluster of an ancestor at 0: children <= 0 are branching and recurse,
// children > 0 are frozen.  Each branching particle at p spawns frozen
// children in (0, min(frozen_abs_hi, p + frozen_disp_hi)]; at least one of
// the two ceilings must be finite or the frozen mass is infinite.
// Draw order per branching particle: branching children, then frozen.
FrozenDecomposition sample_cluster(const Intensity& intensity,
                                   const ClusterLimits& limits, Rng& rng) {
  FrozenDecomposition d;
  d.branching_positions.push_back(0.0);
  std::vector<double> buf;
  std::size_t next = 0;
  while (next < d.branching_positions.size()) {
    double p = d.branching_positions[next];
    buf.clear();
    append_offspring(intensity, p, -kInf, 0.0, rng, buf);
    if (static_cast<std::int64_t>(d.branching_positions.size() + buf.size()) >
        limits.max_branching) {
      d.truncated = true;
      break;
    }
    std::sort(buf.begin(), buf.end());
    d.branching_positions.insert(d.branching_positions.end(), buf.begin(),
                                 buf.end());
    double frozen_hi = std::min(limits.frozen_abs_hi, p + limits.frozen_disp_hi);
    if (frozen_hi > 0.0) {
      buf.clear();
      append_offspring(intensity, p, 0.0, frozen_hi, rng, buf);
      if (static_cast<std::int64_t>(d.xi.size() + buf.size()) >
          limits.max_frozen) {
        d.truncated = true;
        break;
      }
      std::sort(buf.begin(), buf.end());
      d.xi.insert(d.xi.end(), buf.begin(), buf.end());
    }
    ++next;
  }
  d.branching_count = static_cast<std::int64_t>(d.branching_positions.size());
  return d;
}

}  // namespace

FrozenDecomposition frozen_decompose(const Intensity& intensity,
                                     const FrozenCaps& caps, Rng& rng) {
  require_subcritical_intensity(intensity, "frozen_decompose");
  if (!(caps.right_cutoff > 0.0) || !std::isfinite(caps.right_cutoff)) {
    throw UsageError("frozen_decompose: right_cutoff must be positive and "
                     "finite");
  }
  ClusterLimits limits;
  limits.frozen_disp_hi = caps.right_cutoff;
  limits.max_branching = caps.max_branching;
  limits.max_frozen = caps.max_frozen;
  return sample_cluster(intensity, limits, rng);
}

std::int64_t cmj_count(const Intensity& intensity, double t, double log_b,
                       const TreeCaps& caps, Rng& rng) {
  require_subcritical_intensity(intensity, "cmj_count");
  if (!(t > 0.0) || !std::isfinite(t)) {
    throw UsageError("cmj_count: requires t > 0");
  }
  if (!(log_b < 0.0)) {
    throw UsageError("cmj_count: requires log_b < 0");
  }
  std::deque<double> births{0.0};
  std::int64_t processed = 0;
  std::int64_t total = 0;
  while (!births.empty()) {
    double sigma = births.front();
    births.pop_front();
    if (++processed > caps.max_particles) {
      throw NumericError("cmj_count: individual cap exceeded");
    }
    double horizon = t - sigma;  // >= 0 by construction
    ClusterLimits limits;
    limits.frozen_abs_hi = horizon;
    limits.max_branching = caps.max_particles;
    limits.max_frozen = caps.max_particles;
    FrozenDecomposition cluster = sample_cluster(intensity, limits, rng);
    if (cluster.truncated) {
      throw NumericError("cmj_count: cluster caps exceeded");
    }
    // Characteristic: branching members with relative position in
    // (log_b + horizon, 0]; empty once the horizon exceeds -log_b.
    double cut = log_b + horizon;
    for (double y : cluster.branching_positions) {
      if (y > cut) ++total;
    }
    // Frozen children become new individuals; the horizon cutoff already
    // guarantees birth times <= t.
    for (double x : cluster.xi) births.push_back(sigma + x);
  }
  return total;
}

}  // namespace irg
