#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <limits>
#include <vector>

#include "irg/model.hpp"
#include "irg/rng.hpp"

using irg::ModelParams;
using irg::Regime;

namespace {

// Simpson quadrature of f on [a, b] with 2*half_steps panels.
template <typename F>
double simpson(F&& f, double a, double b, int half_steps) {
  int n = 2 * half_steps;
  double h = (b - a) / n;
  double acc = f(a) + f(b);
  for (int i = 1; i < n; ++i) {
    acc += f(a + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
  }
  return acc * h / 3.0;
}

// Independent oracle for psi: numerically integrates e^(-t*x) against the
// displacement intensity density beta*e^(gamma*x) (x>0), beta*e^((1-gamma)*x)
// (x<0), truncating where the integrand falls below 1e-20 of its peak.
double psi_by_quadrature(const ModelParams& p, double t) {
  double rate_pos = t - p.gamma;        // decay rate of e^{-(t-gamma)x}, x>0
  double rate_neg = 1.0 - p.gamma - t;  // decay rate of e^{-(1-gamma-t)|x|}, x<0
  double hi = 46.0 / rate_pos;
  double lo = -46.0 / rate_neg;
  auto pos = [&](double x) { return p.beta * std::exp(-rate_pos * x); };
  auto neg = [&](double x) { return p.beta * std::exp(rate_neg * x); };
  return simpson(pos, 0.0, hi, 20000) + simpson(neg, lo, 0.0, 20000);
}

const ModelParams kRef{0.25, 0.1};  // subcritical reference point

}  // namespace

TEST_CASE("validate_params accepts in-range values and classifies the regime") {
  ModelParams p = irg::validate_params(0.25, 0.1);
  CHECK(p.gamma == 0.25);
  CHECK(p.beta == 0.1);
  CHECK(irg::classify(p) == Regime::subcritical);

  // beta_c(0.6) = 0, so any positive beta is at/above criticality.
  CHECK(irg::classify(irg::validate_params(0.6, 0.01)) ==
        Regime::critical_or_supercritical);
  // Exactly critical beta is not subcritical (strict inequality).
  CHECK(irg::classify(irg::validate_params(0.25, 0.125)) ==
        Regime::critical_or_supercritical);
}

TEST_CASE("validate_params rejects out-of-range inputs") {
  CHECK_THROWS_AS(irg::validate_params(1.2, 0.1), irg::UsageError);
  CHECK_THROWS_AS(irg::validate_params(0.0, 0.1), irg::UsageError);
  CHECK_THROWS_AS(irg::validate_params(1.0, 0.1), irg::UsageError);
  CHECK_THROWS_AS(irg::validate_params(-0.3, 0.1), irg::UsageError);
  CHECK_THROWS_AS(irg::validate_params(0.25, 0.0), irg::UsageError);
  CHECK_THROWS_AS(irg::validate_params(0.25, -1.0), irg::UsageError);
  double nan = std::numeric_limits<double>::quiet_NaN();
  double inf = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(irg::validate_params(nan, 0.1), irg::UsageError);
  CHECK_THROWS_AS(irg::validate_params(0.25, nan), irg::UsageError);
  CHECK_THROWS_AS(irg::validate_params(0.25, inf), irg::UsageError);
}

TEST_CASE("critical_beta formula and monotonicity") {
  CHECK(irg::critical_beta(0.25) == doctest::Approx(0.125).epsilon(1e-15));
  CHECK(irg::critical_beta(0.5) == 0.0);
  CHECK(irg::critical_beta(0.75) == 0.0);
  double prev = std::numeric_limits<double>::infinity();
  for (int i = 1; i < 100; ++i) {
    double v = irg::critical_beta(i / 100.0);
    CHECK(v <= prev);
    CHECK(v >= 0.0);
    prev = v;
  }
}

TEST_CASE("psi closed form matches quadrature and handles the domain boundary") {
  CHECK(irg::psi(kRef, 0.5) == doctest::Approx(0.8).epsilon(1e-14));
  for (double t : {0.30, 0.40, 0.50, 0.60, 0.70}) {
    double closed = irg::psi(kRef, t);
    double quad = psi_by_quadrature(kRef, t);
    CHECK(std::abs(closed - quad) < 1e-8 * closed);
  }
  // Out of domain: +infinity as a value, not an error.
  CHECK(std::isinf(irg::psi(kRef, 0.25)));
  CHECK(std::isinf(irg::psi(kRef, 0.75)));
  CHECK(std::isinf(irg::psi(kRef, -1.0)));
  CHECK(std::isinf(irg::psi(kRef, 2.0)));
  // Symmetry psi(t) = psi(1-t).
  for (double t : {0.31, 0.42, 0.57}) {
    CHECK(irg::psi(kRef, t) ==
          doctest::Approx(irg::psi(kRef, 1.0 - t)).epsilon(1e-14));
  }
}

TEST_CASE("psi is strictly convex inside its domain") {
  ModelParams p{0.3, 0.05};
  double lo = 0.3 + 0.02, hi = 0.7 - 0.02;
  int n = 200;
  double h = (hi - lo) / n;
  for (int i = 1; i < n; ++i) {
    double t = lo + i * h;
    double second = irg::psi(p, t - h) - 2.0 * irg::psi(p, t) + irg::psi(p, t + h);
    CHECK(second > 0.0);
  }
}

TEST_CASE("psi_prime matches central finite differences") {
  for (double t : {0.33, 0.45, 0.5, 0.61}) {
    double h = 1e-6;
    double fd = (irg::psi(kRef, t + h) - irg::psi(kRef, t - h)) / (2.0 * h);
    CHECK(std::abs(irg::psi_prime(kRef, t) - fd) < 1e-6);
  }
  CHECK(irg::psi_prime(kRef, 0.5) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK_THROWS_AS(irg::psi_prime(kRef, 0.25), irg::UsageError);
  CHECK_THROWS_AS(irg::psi_prime(kRef, 0.9), irg::UsageError);
}

TEST_CASE("rho_pm closed form: reference values and defining identities") {
  irg::RhoPair r = irg::rho_pm(kRef);
  CHECK(std::abs(r.rho_minus - 0.3881966011250105) < 1e-12);
  CHECK(std::abs(r.rho_plus - 0.6118033988749895) < 1e-12);
  CHECK(std::abs(irg::psi(kRef, r.rho_minus) - 1.0) < 1e-12);
  CHECK(std::abs(irg::psi(kRef, r.rho_plus) - 1.0) < 1e-12);
  CHECK(std::abs(r.rho_minus + r.rho_plus - 1.0) < 1e-14);
  CHECK(r.rho_minus > kRef.gamma);

  // Near-critical: both roots approach 1/2.
  ModelParams near_crit{0.25, 0.125 - 1e-9};
  irg::RhoPair rc = irg::rho_pm(near_crit);
  CHECK(std::abs(rc.rho_minus - 0.5) < 1e-4);
  CHECK(std::abs(rc.rho_plus - 0.5) < 1e-4);

  CHECK_THROWS_AS(irg::rho_pm(ModelParams{0.6, 0.01}), irg::UsageError);
  CHECK_THROWS_AS(irg::rho_pm(ModelParams{0.25, 0.2}), irg::UsageError);
}

TEST_CASE("rho_pm_bisection agrees with the closed form") {
  irg::RhoPair closed = irg::rho_pm(kRef);
  irg::RhoPair numeric = irg::rho_pm_bisection(kRef, 1e-10);
  CHECK(std::abs(closed.rho_minus - numeric.rho_minus) < 1e-9);
  CHECK(std::abs(closed.rho_plus - numeric.rho_plus) < 1e-9);

  // Roots are symmetric about 1/2 because psi(t) = psi(1-t).
  irg::RhoPair sym = irg::rho_pm_bisection(ModelParams{0.4, 0.04}, 1e-10);
  CHECK(std::abs(sym.rho_minus + sym.rho_plus - 1.0) < 1e-9);
  CHECK(std::abs(sym.rho_minus - 0.4552786404500042) < 1e-9);

  CHECK_THROWS_AS(irg::rho_pm_bisection(kRef, 0.0), irg::UsageError);
  CHECK_THROWS_AS(irg::rho_pm_bisection(ModelParams{0.6, 0.1}, 1e-10),
                  irg::UsageError);
}

TEST_CASE("t_star solves log(psi(t))/t = psi'(t)/psi(t) inside (rho-, rho+)") {
  double ts = irg::t_star(kRef);
  irg::RhoPair r = irg::rho_pm(kRef);
  CHECK(ts > r.rho_minus);
  CHECK(ts < r.rho_plus);
  CHECK(std::abs(ts - 0.4858987368869566) < 1e-9);
  double residual =
      std::log(irg::psi(kRef, ts)) / ts -
      irg::psi_prime(kRef, ts) / irg::psi(kRef, ts);
  CHECK(std::abs(residual) < 1e-9);

  // Independent grid scan: the residual changes sign across t_star.
  auto g = [&](double t) {
    return std::log(irg::psi(kRef, t)) / t -
           irg::psi_prime(kRef, t) / irg::psi(kRef, t);
  };
  CHECK(g(ts - 1e-4) > 0.0);
  CHECK(g(ts + 1e-4) < 0.0);

  CHECK_THROWS_AS(irg::t_star(ModelParams{0.6, 0.1}), irg::UsageError);
  CHECK_THROWS_AS(irg::t_star(kRef, 0.0), irg::UsageError);
}

TEST_CASE("deviation_rate is linear in delta and positive on its domain") {
  double ts = irg::t_star(kRef);
  double speed = -irg::psi_prime(kRef, ts) / irg::psi(kRef, ts);
  CHECK(std::abs(speed - 0.4526806366170096) < 1e-9);

  CHECK(std::abs(irg::deviation_rate(kRef, 0.2) - 0.2526806366170096) < 1e-9);
  CHECK(irg::deviation_rate(kRef, 0.5 * speed) ==
        doctest::Approx(0.5 * speed).epsilon(1e-9));
  // Approaching the upper boundary the rate vanishes.
  CHECK(irg::deviation_rate(kRef, speed * (1.0 - 1e-9)) < 1e-8);

  CHECK_THROWS_AS(irg::deviation_rate(kRef, 0.0), irg::UsageError);
  CHECK_THROWS_AS(irg::deviation_rate(kRef, speed), irg::UsageError);
  CHECK_THROWS_AS(irg::deviation_rate(kRef, speed + 0.1), irg::UsageError);
  CHECK_THROWS_AS(irg::deviation_rate(ModelParams{0.6, 0.1}, 0.1),
                  irg::UsageError);
}

TEST_CASE("derive_constants bundles every analytic constant") {
  irg::DerivedConstants c = irg::derive_constants(kRef);
  CHECK(c.regime == Regime::subcritical);
  CHECK(c.beta_c == doctest::Approx(0.125).epsilon(1e-15));
  CHECK(c.tau == doctest::Approx(5.0).epsilon(1e-15));
  CHECK(c.psi_domain.first == 0.25);
  CHECK(c.psi_domain.second == 0.75);
  REQUIRE(c.rho_minus.has_value());
  REQUIRE(c.rho_plus.has_value());
  REQUIRE(c.t_star.has_value());
  CHECK(*c.rho_minus < *c.t_star);
  CHECK(*c.t_star < *c.rho_plus);

  irg::DerivedConstants super = irg::derive_constants(ModelParams{0.6, 0.1});
  CHECK(super.regime == Regime::critical_or_supercritical);
  CHECK(super.beta_c == 0.0);
  CHECK_FALSE(super.rho_minus.has_value());
  CHECK_FALSE(super.t_star.has_value());
}

TEST_CASE("random subcritical parameters satisfy the root identities") {
  irg::Rng rng(20260814);
  for (int i = 0; i < 200; ++i) {
    double gamma = 0.01 + 0.48 * rng.next_double();
    double bc = irg::critical_beta(gamma);
    double beta = bc * (0.01 + 0.98 * rng.next_double());
    ModelParams p = irg::validate_params(gamma, beta);
    REQUIRE(irg::classify(p) == Regime::subcritical);

    irg::RhoPair r = irg::rho_pm(p);
    CHECK(std::abs(irg::psi(p, r.rho_minus) - 1.0) < 1e-10);
    CHECK(std::abs(irg::psi(p, r.rho_plus) - 1.0) < 1e-10);
    CHECK(std::abs(r.rho_minus + r.rho_plus - 1.0) < 1e-14);
    CHECK(r.rho_minus > gamma);
    CHECK(r.rho_minus <= 0.5);
    CHECK(r.rho_plus >= 0.5);
    CHECK(r.rho_plus < 1.0 - gamma);

    irg::RhoPair b = irg::rho_pm_bisection(p, 1e-10);
    CHECK(std::abs(r.rho_minus - b.rho_minus) < 1e-9);
    CHECK(std::abs(r.rho_plus - b.rho_plus) < 1e-9);
  }
}
