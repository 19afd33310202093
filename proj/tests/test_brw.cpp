#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>
#include <vector>

#include "irg/brw.hpp"
#include "irg/model.hpp"
#include "irg/rng.hpp"

using irg::FrozenCaps;
using irg::Intensity;
using irg::KilledTree;
using irg::Rng;
using irg::TreeCaps;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
const Intensity kRef{0.25, 0.1};
constexpr double kRhoMinus = 0.388196601125010515;

// Simpson quadrature of the intensity density over [a, b].
double mass_by_quadrature(const Intensity& in, double a, double b) {
  auto density = [&](double x) {
    return x > 0 ? in.beta * std::exp(in.gamma * x)
                 : in.beta * std::exp((1.0 - in.gamma) * x);
  };
  int n = 40000;
  double h = (b - a) / n;
  double acc = density(a) + density(b);
  for (int i = 1; i < n; ++i) acc += density(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return acc * h / 3.0;
}

struct MeanVar {
  double mean = 0.0;
  double var = 0.0;
  double se = 0.0;
};

MeanVar mean_var(const std::vector<double>& xs) {
  MeanVar mv;
  for (double x : xs) mv.mean += x;
  mv.mean /= static_cast<double>(xs.size());
  for (double x : xs) mv.var += (x - mv.mean) * (x - mv.mean);
  mv.var /= static_cast<double>(xs.size() - 1);
  mv.se = std::sqrt(mv.var / static_cast<double>(xs.size()));
  return mv;
}

// Two-sample Kolmogorov-Smirnov distance.
double ks_distance(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double d = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    double fa = static_cast<double>(i) / a.size();
    double fb = static_cast<double>(j) / b.size();
    d = std::max(d, std::abs(fa - fb));
  }
  return d;
}

}  // namespace

TEST_CASE("intensity construction validates the parameter ranges") {
  CHECK(irg::make_intensity(0.25, 0.1).beta == 0.1);
  CHECK_THROWS_AS(irg::make_intensity(0.5, 0.1), irg::UsageError);
  CHECK_THROWS_AS(irg::make_intensity(0.0, 0.1), irg::UsageError);
  CHECK_THROWS_AS(irg::make_intensity(0.25, 0.0), irg::UsageError);
  CHECK_THROWS_AS(irg::make_intensity(0.25, -2.0), irg::UsageError);
  CHECK(irg::intensity_from(irg::ModelParams{0.3, 0.07}).gamma == 0.3);
  CHECK_THROWS_AS(irg::intensity_from(irg::ModelParams{0.7, 0.07}),
                  irg::UsageError);
}

TEST_CASE("window_mass closed form matches quadrature and handles limits") {
  CHECK(std::abs(irg::window_mass(kRef, -kInf, 0.0) - 0.13333333333333333) <
        1e-15);
  CHECK(std::abs(irg::window_mass(kRef, -kInf, std::log(2.0)) -
                 0.20901617933442176) < 1e-15);
  CHECK(std::abs(irg::window_mass(kRef, -1.0, 2.0) - 0.32983963458124930) <
        1e-15);
  CHECK(irg::window_mass(kRef, 0.7, 0.7) == 0.0);
  for (auto [a, b] : std::vector<std::pair<double, double>>{
           {-2.0, -0.5}, {-1.0, 1.0}, {0.25, 3.0}, {-30.0, 0.0}}) {
    CHECK(std::abs(irg::window_mass(kRef, a, b) -
                   mass_by_quadrature(kRef, a, b)) < 1e-9);
  }
  // Window mass is additive over adjacent windows.
  CHECK(std::abs(irg::window_mass(kRef, -3.0, 2.0) -
                 irg::window_mass(kRef, -3.0, -1.0) -
                 irg::window_mass(kRef, -1.0, 2.0)) < 1e-15);
  CHECK_THROWS_AS(irg::window_mass(kRef, -kInf, kInf), irg::UsageError);
  CHECK_THROWS_AS(irg::window_mass(kRef, 0.0, kInf), irg::UsageError);
  CHECK_THROWS_AS(irg::window_mass(kRef, 1.0, 0.0), irg::UsageError);
}

TEST_CASE("right_cutoff_for_bias inverts the tail integral") {
  CHECK(std::abs(irg::right_cutoff_for_bias(kRef, kRhoMinus, 3e-3) -
                 39.6944339766674795) < 1e-10);
  CHECK(std::abs(irg::right_cutoff_for_bias(kRef, kRhoMinus, 1e-6) -
                 97.6290539490343112) < 1e-10);
  // The omitted weighted mass at the returned cutoff equals the target.
  for (double target : {1e-2, 1e-4, 1e-8}) {
    double rate = kRhoMinus - kRef.gamma;
    double r = irg::right_cutoff_for_bias(kRef, kRhoMinus, target);
    double omitted = kRef.beta * std::exp(-rate * r) / rate;
    CHECK(std::abs(omitted - target) < 1e-12 * target + 1e-18);
  }
  CHECK_THROWS_AS(irg::right_cutoff_for_bias(kRef, 0.2, 1e-6),
                  irg::UsageError);
  CHECK_THROWS_AS(irg::right_cutoff_for_bias(kRef, kRhoMinus, 0.0),
                  irg::UsageError);
}

TEST_CASE("martingale_mean_truncated evaluates the weighted tail integral") {
  CHECK(std::abs(irg::martingale_mean_truncated(kRef, kRhoMinus, 16.0) -
                 0.920710752257117878) < 1e-15);
  CHECK(std::abs(irg::martingale_mean_truncated(kRef, kRhoMinus, 40.0) -
                 0.997124046984927512) < 1e-15);
  CHECK(std::abs(irg::martingale_mean_truncated(kRef, kRhoMinus, -1.0) -
                 0.192485552474446647) < 1e-15);
  // Large cutoff recovers psi(rho) = 1 at the Malthusian parameter.
  CHECK(std::abs(irg::martingale_mean_truncated(kRef, kRhoMinus, 500.0) - 1.0) <
        1e-10);
  CHECK_THROWS_AS(irg::martingale_mean_truncated(kRef, 0.25, 10.0),
                  irg::UsageError);
  CHECK_THROWS_AS(irg::martingale_mean_truncated(kRef, 0.75, 10.0),
                  irg::UsageError);
}

TEST_CASE("sample_offspring: counts are Poisson with the window mass") {
  Rng rng(555001);
  const double lo = -1.0, hi = 2.0;
  const double lambda = irg::window_mass(kRef, lo, hi);
  const int reps = 100000;
  std::vector<double> counts;
  counts.reserve(reps);
  for (int r = 0; r < reps; ++r) {
    auto kids = irg::sample_offspring(kRef, 0.0, lo, hi, rng);
    counts.push_back(static_cast<double>(kids.size()));
    for (double x : kids) {
      CHECK(x > lo);
      CHECK(x <= hi);
    }
    CHECK(std::is_sorted(kids.begin(), kids.end()));
  }
  MeanVar mv = mean_var(counts);
  CHECK(std::abs(mv.mean - lambda) < 4.0 * std::sqrt(lambda / reps));
  // Index of dispersion: Poisson has var == mean.
  CHECK(std::abs(mv.var / mv.mean - 1.0) < 0.025);
}

TEST_CASE("sample_offspring: positions follow the restricted intensity") {
  Rng rng(555002);
  const double lo = -2.0, hi = 1.5;
  const double lambda = irg::window_mass(kRef, lo, hi);
  std::vector<double> xs;
  while (xs.size() < 200000) {
    for (double x : irg::sample_offspring(kRef, 0.0, lo, hi, rng)) {
      xs.push_back(x);
    }
  }
  // Empirical CDF vs analytic restricted CDF at interior points.
  for (double q : {-1.0, -0.25, 0.5, 1.0}) {
    double expect = irg::window_mass(kRef, lo, q) / lambda;
    double freq = static_cast<double>(std::count_if(
                      xs.begin(), xs.end(), [&](double x) { return x <= q; })) /
                  static_cast<double>(xs.size());
    double se = std::sqrt(expect * (1 - expect) / static_cast<double>(xs.size()));
    CHECK(std::abs(freq - expect) < 4.5 * se);
  }
  // Offspring positions are placed relative to the parent.
  auto shifted = irg::sample_offspring(kRef, -3.0, -kInf, 0.0, rng);
  for (double x : shifted) CHECK(x <= 0.0);
  CHECK_THROWS_AS(irg::sample_offspring(kRef, 0.0, -1.0, kInf, rng),
                  irg::UsageError);
}

TEST_CASE("sample_killed_tree respects barriers, genealogy, and determinism") {
  TreeCaps caps;
  const double start = std::log(0.5);
  Rng rng(909090);
  for (int rep = 0; rep < 500; ++rep) {
    KilledTree t = irg::sample_killed_tree(kRef, start, -kInf, 0.0, caps, rng);
    REQUIRE(!t.particles.empty());
    CHECK(t.particles[0].position == start);
    CHECK(t.particles[0].parent == -1);
    CHECK(t.particles[0].generation == 0);
    CHECK_FALSE(t.truncated);
    for (std::size_t i = 1; i < t.particles.size(); ++i) {
      const auto& p = t.particles[i];
      CHECK(p.position <= 0.0);
      CHECK(p.parent >= 0);
      CHECK(p.parent < static_cast<std::int64_t>(i));
      CHECK(p.generation ==
            t.particles[static_cast<std::size_t>(p.parent)].generation + 1);
      // Breadth-first birth order: generations never decrease.
      CHECK(p.generation >= t.particles[i - 1].generation);
    }
  }
  // Determinism: identical seed, identical tree.
  Rng r1(31337), r2(31337);
  KilledTree a = irg::sample_killed_tree(kRef, start, -kInf, 0.0, caps, r1);
  KilledTree b = irg::sample_killed_tree(kRef, start, -kInf, 0.0, caps, r2);
  REQUIRE(a.particles.size() == b.particles.size());
  for (std::size_t i = 0; i < a.particles.size(); ++i) {
    CHECK(a.particles[i].position == b.particles[i].position);
  }
  // Left barrier kills low particles.
  Rng r3(77);
  KilledTree c = irg::sample_killed_tree(kRef, -0.1, -0.5, 0.0, caps, r3);
  for (const auto& p : c.particles) {
    CHECK(p.position > -0.5);
    CHECK(p.position <= 0.0);
  }
  // Root may start exactly at the right barrier (closed end).
  Rng r4(78);
  KilledTree d = irg::sample_killed_tree(kRef, 0.0, -1.0, 0.0, caps, r4);
  CHECK(d.particles[0].position == 0.0);
  CHECK_THROWS_AS(irg::sample_killed_tree(kRef, 0.5, -1.0, 0.0, caps, r4),
                  irg::UsageError);
  CHECK_THROWS_AS(irg::sample_killed_tree(kRef, -2.0, -1.0, 0.0, caps, r4),
                  irg::UsageError);
  CHECK_THROWS_AS(irg::sample_killed_tree(kRef, 0.0, -1.0, kInf, caps, r4),
                  irg::UsageError);
}

TEST_CASE("killed tree root offspring mean matches the window mass") {
  TreeCaps caps;
  const double start = std::log(0.5);
  const double lambda = 0.20901617933442176;  // mass of (-inf, -start]
  Rng rng(101010);
  const int reps = 40000;
  std::vector<double> counts;
  counts.reserve(reps);
  int truncated = 0;
  for (int r = 0; r < reps; ++r) {
    KilledTree t = irg::sample_killed_tree(kRef, start, -kInf, 0.0, caps, rng);
    truncated += t.truncated ? 1 : 0;
    std::int64_t roots_children = 0;
    for (const auto& p : t.particles) {
      if (p.generation == 1) ++roots_children;
    }
    counts.push_back(static_cast<double>(roots_children));
  }
  MeanVar mv = mean_var(counts);
  CHECK(std::abs(mv.mean - lambda) < 4.0 * std::sqrt(lambda / reps));
  // Subcritical extinction: the caps never fire.
  CHECK(truncated == 0);
}

TEST_CASE("count_I counts the window occupancy of a right-killed tree") {
  KilledTree t;
  t.barrier_lo = -kInf;
  t.barrier_hi = 0.0;
  t.start = -0.2;
  t.particles = {{-0.2, -1, 0}, {-0.5, 0, 1}, {-1.7, 0, 1}, {0.0, 1, 2}};
  const double log_half = std::log(0.5);  // -0.6931
  CHECK(irg::count_I(t, log_half) == 3);  // -0.2, -0.5, 0.0
  CHECK(irg::count_I(t, -2.0) == 4);
  CHECK(irg::count_I(t, 0.0) == 0);       // empty window
  CHECK(irg::count_I(t, -0.2) == 1);      // left endpoint excluded: only 0.0
  KilledTree wrong = t;
  wrong.barrier_hi = 0.5;
  CHECK_THROWS_AS(irg::count_I(wrong, log_half), irg::UsageError);
  CHECK_THROWS_AS(irg::count_I(t, 0.5), irg::UsageError);
}

TEST_CASE("martingale_W on hand-built and sampled trees") {
  KilledTree t;
  t.barrier_lo = -kInf;
  t.barrier_hi = kInf;
  t.start = 0.0;
  t.complete_generations = 2;
  t.particles = {{0.0, -1, 0}, {-1.0, 0, 1}, {2.0, 0, 1}, {0.5, 1, 2}};
  CHECK(martingale_W(t, 0, 0.5) == doctest::Approx(1.0));
  CHECK(martingale_W(t, 1, 0.5) ==
        doctest::Approx(std::exp(0.5) + std::exp(-1.0)));
  CHECK(martingale_W(t, 2, 0.5) == doctest::Approx(std::exp(-0.25)));
  CHECK_THROWS_AS(irg::martingale_W(t, 3, 0.5), irg::UsageError);
  CHECK_THROWS_AS(irg::martingale_W(t, -1, 0.5), irg::UsageError);

  KilledTree shifted = t;
  shifted.particles[0].position = 1.5;
  CHECK(martingale_W(shifted, 0, 2.0) == doctest::Approx(std::exp(-3.0)));
}

TEST_CASE("truncated walk: displacements bounded, W_1 mean matches integral") {
  TreeCaps caps;
  const double cutoff = 16.0;
  Rng rng(2024001);
  const int reps = 30000;
  std::vector<double> w1;
  w1.reserve(reps);
  for (int r = 0; r < reps; ++r) {
    KilledTree t = irg::sample_brw_truncated(kRef, 0.0, 1, cutoff, caps, rng);
    REQUIRE_FALSE(t.truncated);
    for (std::size_t i = 1; i < t.particles.size(); ++i) {
      const auto& p = t.particles[i];
      double disp =
          p.position - t.particles[static_cast<std::size_t>(p.parent)].position;
      CHECK(disp <= cutoff);
    }
    w1.push_back(irg::martingale_W(t, 1, kRhoMinus));
  }
  MeanVar mv = mean_var(w1);
  CHECK(std::abs(mv.mean - 0.920710752257117878) < 4.0 * mv.se);
  // Depth-0 request: root only.
  Rng r2(5);
  KilledTree root_only = irg::sample_brw_truncated(kRef, 0.7, 0, cutoff, caps, r2);
  CHECK(root_only.particles.size() == 1);
  CHECK(martingale_W(root_only, 0, kRhoMinus) ==
        doctest::Approx(std::exp(-kRhoMinus * 0.7)));
  CHECK_THROWS_AS(irg::martingale_W(root_only, 1, kRhoMinus), irg::UsageError);
  CHECK_THROWS_AS(irg::sample_brw_truncated(kRef, 0.0, 1, 0.0, caps, r2),
                  irg::UsageError);
  CHECK_THROWS_AS(irg::sample_brw_truncated(kRef, 0.0, -1, 1.0, caps, r2),
                  irg::UsageError);
}

TEST_CASE("truncated walk: branching property E[W_2] = m^2") {
  TreeCaps caps;
  const double cutoff = 8.0;
  const double m = irg::martingale_mean_truncated(kRef, kRhoMinus, cutoff);
  Rng rng(2024002);
  const int reps = 12000;
  std::vector<double> w2;
  w2.reserve(reps);
  for (int r = 0; r < reps; ++r) {
    KilledTree t = irg::sample_brw_truncated(kRef, 0.0, 2, cutoff, caps, rng);
    REQUIRE_FALSE(t.truncated);
    w2.push_back(irg::martingale_W(t, 2, kRhoMinus));
  }
  MeanVar mv = mean_var(w2);
  CHECK(std::abs(mv.mean - m * m) < 4.0 * mv.se);
}

TEST_CASE("frozen_decompose: structure, branching bound, Malthusian identity") {
  FrozenCaps caps;
  caps.right_cutoff = irg::right_cutoff_for_bias(kRef, kRhoMinus, 3e-3);
  Rng rng(777999);
  const int reps = 1500;
  std::vector<double> malthusian;
  std::vector<double> branching;
  int singletons = 0;
  for (int r = 0; r < reps; ++r) {
    irg::FrozenDecomposition d = irg::frozen_decompose(kRef, caps, rng);
    REQUIRE_FALSE(d.truncated);
    REQUIRE(d.branching_count >= 1);
    CHECK(d.branching_positions[0] == 0.0);
    CHECK(d.branching_count ==
          static_cast<std::int64_t>(d.branching_positions.size()));
    for (double y : d.branching_positions) CHECK(y <= 0.0);
    double sum = 0.0;
    for (double x : d.xi) {
      CHECK(x > 0.0);
      sum += std::exp(-kRhoMinus * x);
    }
    malthusian.push_back(sum);
    branching.push_back(static_cast<double>(d.branching_count));
    singletons += d.branching_count == 1 ? 1 : 0;
  }
  // Mean of sum e^(-rho_- x) over xi is 1 (Malthusian parameter); the
  // truncation bias at this cutoff is ~0.005, far below the 3-sigma band.
  MeanVar mv = mean_var(malthusian);
  CHECK(std::abs(mv.mean - 1.0) < 3.0 * mv.se + 0.01);
  // E|B| <= 1/(1 - psi(1/2)) = 5.
  MeanVar bv = mean_var(branching);
  CHECK(bv.mean + 3.0 * bv.se < 5.0);
  // P(no branching children at the ancestor) = exp(-mass(-inf,0]).
  double p_single = std::exp(-0.13333333333333333);
  double se = std::sqrt(p_single * (1 - p_single) / reps);
  CHECK(std::abs(static_cast<double>(singletons) / reps - p_single) <
        4.0 * se + 0.02);
  CHECK_THROWS_AS(irg::frozen_decompose(Intensity{0.25, 0.2}, caps, rng),
                  irg::UsageError);
  FrozenCaps bad = caps;
  bad.right_cutoff = 0.0;
  CHECK_THROWS_AS(irg::frozen_decompose(kRef, bad, rng), irg::UsageError);
}

TEST_CASE("frozen_decompose: caps fire as a truncation flag, not silently") {
  FrozenCaps caps;
  caps.right_cutoff = 60.0;
  caps.max_frozen = 10;  // typical realizations have thousands
  Rng rng(13);
  int fired = 0;
  for (int r = 0; r < 20; ++r) {
    fired += irg::frozen_decompose(kRef, caps, rng).truncated ? 1 : 0;
  }
  CHECK(fired > 0);
}

TEST_CASE("cmj_count matches the killed-tree count in distribution") {
  const double t = std::log(16.0);
  const double log_b = std::log(0.5);
  TreeCaps caps;
  const int reps = 2500;
  Rng r1(860001), r2(860002);
  std::vector<double> from_cmj, from_tree;
  from_cmj.reserve(reps);
  from_tree.reserve(reps);
  for (int r = 0; r < reps; ++r) {
    from_cmj.push_back(
        static_cast<double>(irg::cmj_count(kRef, t, log_b, caps, r1)));
    KilledTree tree = irg::sample_killed_tree(kRef, -t, -kInf, 0.0, caps, r2);
    REQUIRE_FALSE(tree.truncated);
    from_tree.push_back(static_cast<double>(irg::count_I(tree, log_b)));
  }
  double d = ks_distance(from_cmj, from_tree);
  // Two-sample KS critical value at the 1% level.
  double crit = 1.6276 * std::sqrt(2.0 / reps);
  CHECK(d < crit);
  // Determinism.
  Rng r3(4242), r4(4242);
  CHECK(irg::cmj_count(kRef, t, log_b, caps, r3) ==
        irg::cmj_count(kRef, t, log_b, caps, r4));
  CHECK_THROWS_AS(irg::cmj_count(kRef, 0.0, log_b, caps, r3), irg::UsageError);
  CHECK_THROWS_AS(irg::cmj_count(kRef, t, 0.0, caps, r3), irg::UsageError);
  CHECK_THROWS_AS(irg::cmj_count(Intensity{0.25, 0.2}, t, log_b, caps, r3),
                  irg::UsageError);
}

TEST_CASE("tree export is one particle per line in birth order") {
  KilledTree t;
  t.particles = {{-0.25, -1, 0}, {-0.75, 0, 1}};
  std::ostringstream out;
  irg::write_tree(out, t);
  CHECK(out.str() == "0 -1 0 -0.25\n1 0 1 -0.75\n");
}
