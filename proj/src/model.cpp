#include "irg/model.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace irg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Bisection of a strictly monotone-signed function f on [lo, hi] where
// f(lo) and f(hi) have opposite signs.  Returns the midpoint once the
// bracket width drops below tol.
template <typename F>
double bisect(F&& f, double lo, double hi, double tol) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0)) {
    throw NumericError("bisect: endpoints do not bracket a root");
  }
  while (hi - lo > tol) {
    double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;  // bracket at floating-point resolution
    double fmid = f(mid);
    if (fmid == 0.0) return mid;
    if ((fmid > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fmid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

void require_subcritical(const ModelParams& params, const char* who) {
  if (classify(params) != Regime::subcritical) {
    throw UsageError(std::string(who) +
                     ": requires subcritical parameters (gamma < 1/2 and "
                     "beta < critical_beta(gamma))");
  }
}

}  // namespace

ModelParams validate_params(double gamma, double beta) {
  if (!(gamma > 0.0) || !(gamma < 1.0) || !std::isfinite(gamma)) {
    throw UsageError("gamma must lie in the open interval (0, 1), got " +
                     std::to_string(gamma));
  }
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw UsageError("beta must be a positive finite number, got " +
                     std::to_string(beta));
  }
  return ModelParams{gamma, beta};
}

double critical_beta(double gamma) {
  double v = 0.25 - 0.5 * gamma;
  return v > 0.0 ? v : 0.0;
}

Regime classify(const ModelParams& params) {
  if (params.gamma < 0.5 && params.beta < critical_beta(params.gamma)) {
    return Regime::subcritical;
  }
  return Regime::critical_or_supercritical;
}

double psi(const ModelParams& params, double t) {
  if (t <= params.gamma || t >= 1.0 - params.gamma) return kInf;
  return params.beta / (t - params.gamma) +
         params.beta / (1.0 - params.gamma - t);
}

double psi_prime(const ModelParams& params, double t) {
  if (t <= params.gamma || t >= 1.0 - params.gamma) {
    throw UsageError("psi_prime: t must lie in (gamma, 1-gamma)");
  }
  double left = t - params.gamma;
  double right = 1.0 - params.gamma - t;
  return -params.beta / (left * left) + params.beta / (right * right);
}

RhoPair rho_pm(const ModelParams& params) {
  require_subcritical(params, "rho_pm");
  double half_gap = 0.5 - params.gamma;  // > 0 here
  double disc = half_gap * half_gap - params.beta * (1.0 - 2.0 * params.gamma);
  // disc = (1/2-gamma)*((1/2-gamma) - 2*beta) > 0 strictly inside the
  // subcritical region; clamp tiny negative round-off anyway.
  double root = std::sqrt(disc > 0.0 ? disc : 0.0);
  return RhoPair{0.5 - root, 0.5 + root};
}

RhoPair rho_pm_bisection(const ModelParams& params, double tol) {
  require_subcritical(params, "rho_pm_bisection");
  if (!(tol > 0.0)) {
    throw UsageError("rho_pm_bisection: tol must be positive");
  }
  auto f = [&](double t) { return psi(params, t) - 1.0; };
  // psi -> +inf at both domain endpoints and psi(1/2) < 1 when subcritical,
  // so each half-interval brackets exactly one root.
  double lo_edge = params.gamma + 1e-12;
  double hi_edge = 1.0 - params.gamma - 1e-12;
  double minus = bisect(f, lo_edge, 0.5, tol);
  double plus = bisect(f, 0.5, hi_edge, tol);
  return RhoPair{minus, plus};
}

double t_star(const ModelParams& params, double tol) {
  require_subcritical(params, "t_star");
  if (!(tol > 0.0)) {
    throw UsageError("t_star: tol must be positive");
  }
  RhoPair rho = rho_pm(params);
  // g(t) = log(psi(t))/t - psi'(t)/psi(t) decreases through zero on
  // (rho_-, rho_+): at rho_- psi=1 so g = -psi' > 0, at rho_+ g = -psi' < 0.
  auto g = [&](double t) {
    double p = psi(params, t);
    return std::log(p) / t - psi_prime(params, t) / p;
  };
  double margin = 1e-9 * (rho.rho_plus - rho.rho_minus);
  return bisect(g, rho.rho_minus + margin, rho.rho_plus - margin, tol);
}

double deviation_rate(const ModelParams& params, double delta) {
  require_subcritical(params, "deviation_rate");
  double ts = t_star(params);
  double speed = -psi_prime(params, ts) / psi(params, ts);
  if (!(delta > 0.0) || !(delta < speed)) {
    throw UsageError("deviation_rate: delta must lie in (0, " +
                     std::to_string(speed) + ")");
  }
  return -delta + speed;
}

DerivedConstants derive_constants(const ModelParams& params) {
  DerivedConstants out;
  out.regime = classify(params);
  out.beta_c = critical_beta(params.gamma);
  out.tau = 1.0 + 1.0 / params.gamma;
  out.psi_domain = {params.gamma, 1.0 - params.gamma};
  if (out.regime == Regime::subcritical) {
    RhoPair rho = rho_pm(params);
    out.rho_minus = rho.rho_minus;
    out.rho_plus = rho.rho_plus;
    out.t_star = t_star(params);
  }
  return out;
}

}  // namespace irg
