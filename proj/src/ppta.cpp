#include "ptbore/ppta.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "ptbore/errors.hpp"

namespace ptbore {

namespace {
constexpr double kPi = std::numbers::pi;
}

PptaSchedule::PptaSchedule(double t_horizon, double t_star)
    : t_(t_horizon), t_star_(t_star) {
  if (!(t_star > 0.0 && t_star < t_horizon) || !std::isfinite(t_horizon)) {
    throw DomainError("PptaSchedule requires 0 < T* < T (got T=" +
                      std::to_string(t_horizon) + ", T*=" + std::to_string(t_star) + ")");
  }
}

double tst_eta(double s, double horizon) { return horizon * -std::expm1(-s / horizon); }

double tst_eta_prime(double s, double horizon) { return std::exp(-s / horizon); }

double mu_unsaturated(double t, double horizon) {
  if (t >= horizon) throw DomainError("mu_unsaturated: t must be below the horizon");
  return horizon / (horizon - t);
}

double mu(double t, const PptaSchedule& sched) {
  const double T = sched.horizon();
  const double Ts = sched.saturation();
  const double mu_star = T / (T - Ts);
  if (t <= Ts) return T / (T - t);
  if (t < T) {
    return mu_star * (1.0 + (2.0 / kPi) * std::sin(0.5 * kPi * (t - Ts) / (T - Ts)));
  }
  return (1.0 + 2.0 / kPi) * mu_star;
}

double mu_dot(double t, const PptaSchedule& sched) {
  const double T = sched.horizon();
  const double Ts = sched.saturation();
  if (t <= Ts) return T / ((T - t) * (T - t));
  if (t < T) {
    const double mu_star = T / (T - Ts);
    return mu_star / (T - Ts) * std::cos(0.5 * kPi * (t - Ts) / (T - Ts));
  }
  return 0.0;
}

LemmaBounds lemma1_bounds(double alpha, double beta, const PptaSchedule& sched,
                          double v0) {
  const double T = sched.horizon();
  const double Ts = sched.saturation();
  if (!(alpha * T > 1.0)) {
    throw HypothesisViolated("lemma1_bounds: requires alpha > 1/T");
  }
  if (beta < 0.0) throw DomainError("lemma1_bounds: beta must be non-negative");
  if (v0 < 0.0) throw DomainError("lemma1_bounds: V0 must be non-negative");

  const double r = (T - Ts) / T;
  const double r_pow = std::pow(r, alpha * T);

  LemmaBounds b;
  b.alpha = alpha;
  b.beta = beta;
  b.v0 = v0;
  b.v1_bar = beta * T / (alpha * T - 1.0) * (r - r_pow);
  b.v1 = r_pow * v0 + b.v1_bar;
  b.v2 = beta * (T - Ts) / (alpha * T);
  b.v_max = std::max(b.v1, b.v2);
  return b;
}

}  // namespace ptbore
