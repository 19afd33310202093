// Model parameters and the analytic constants derived from them.
//
// The random graph on vertices {1..n} connects i < j independently with
// probability  p(i,j) = min(1, beta * j^(gamma-1) * i^(-gamma)),
// which is the n-independent form of the kernel beta*(x v y)^(gamma-1)*(x ^ y)^(-gamma)
// evaluated at x=i/n, y=j/n.  The local weak limit of the neighborhood
// exploration is a branching random walk whose displacement intensity has
// density  beta * e^(gamma*x) for x>0 and beta * e^((1-gamma)*x) for x<0;
// its Laplace transform psi and the roots rho_-, rho_+ of psi(t)=1 drive all
// exponents in this project.
#pragma once

#include <optional>
#include <utility>

#include "irg/common.hpp"

namespace irg {

struct ModelParams {
  double gamma = 0.0;
  double beta = 0.0;
};

enum class Regime { subcritical, critical_or_supercritical };

// Checks gamma in (0,1) and beta in (0, inf); throws UsageError naming the
// offending field.
ModelParams validate_params(double gamma, double beta);

// Largest beta for which the graph is subcritical: max(1/4 - gamma/2, 0).
double critical_beta(double gamma);

// subcritical iff gamma < 1/2 and beta < critical_beta(gamma).
Regime classify(const ModelParams& params);

// psi(t) = beta/(t-gamma) + beta/(1-gamma-t) on gamma < t < 1-gamma,
// +infinity (as a value, not an error) outside.
double psi(const ModelParams& params, double t);

// Derivative of psi on the open domain.
double psi_prime(const ModelParams& params, double t);

struct RhoPair {
  double rho_minus = 0.0;
  double rho_plus = 0.0;
};

// The two roots of psi(t) = 1 in closed form,
//   rho_-/+ = 1/2 -/+ sqrt((1/2-gamma)^2 - beta*(1-2*gamma)),
// (equivalently 1/2 +/- sqrt((gamma-1/2)^2 + beta*(2*gamma-1))).
// Requires the subcritical regime; then gamma < rho_- <= 1/2 <= rho_+ < 1-gamma
// and rho_- + rho_+ = 1.
RhoPair rho_pm(const ModelParams& params);

// Independent root finder for the same pair: bisection of psi(t)-1 on
// (gamma+1e-12, 1/2] and [1/2, 1-gamma-1e-12).
RhoPair rho_pm_bisection(const ModelParams& params, double tol = 1e-12);

// Unique t in (rho_-, rho_+) with log(psi(t))/t = psi'(t)/psi(t).
double t_star(const ModelParams& params, double tol = 1e-12);

// Large-deviation rate for the leftmost-particle speed:
//   I(delta) = -delta - psi'(t*)/psi(t*), for 0 < delta < -psi'(t*)/psi(t*).
double deviation_rate(const ModelParams& params, double delta);

struct DerivedConstants {
  Regime regime = Regime::critical_or_supercritical;
  double beta_c = 0.0;
  double tau = 0.0;  // degree-tail exponent 1 + 1/gamma
  std::pair<double, double> psi_domain{0.0, 0.0};  // (gamma, 1-gamma)
  std::optional<double> rho_minus;
  std::optional<double> rho_plus;
  std::optional<double> t_star;
};

// One-stop evaluation; the optional fields are present only when subcritical.
DerivedConstants derive_constants(const ModelParams& params);

}  // namespace irg
