#pragma once

// Time-scale transformation, prescribed-time adjustment gains and the
// residual-set bound for Lyapunov functions driven by those gains.

namespace ptbore {

/// Horizon T and saturation time T* of a saturated prescribed-time gain.
class PptaSchedule {
public:
  /// Throws DomainError unless 0 < t_star < t_horizon.
  PptaSchedule(double t_horizon, double t_star);

  double horizon() const { return t_; }
  double saturation() const { return t_star_; }

  bool operator==(const PptaSchedule&) const = default;

private:
  double t_;
  double t_star_;
};

/// eta(s) = T (1 - exp(-s/T)); maps [0, inf) onto [0, T).
double tst_eta(double s, double horizon);

/// d eta / ds = exp(-s/T).
double tst_eta_prime(double s, double horizon);

/// T / (T - t). Throws DomainError for t >= T.
double mu_unsaturated(double t, double horizon);

/// C^1 saturated gain: T/(T-t) up to T*, a sine blend on [T*, T), then constant.
double mu(double t, const PptaSchedule& sched);

/// Analytic time derivative of mu.
double mu_dot(double t, const PptaSchedule& sched);

/// Levels bounding V after T* when dV/dt <= -alpha mu(t) V + beta.
struct LemmaBounds {
  double v1 = 0.0;      ///< bound on V(T*)
  double v1_bar = 0.0;  ///< forcing part of v1
  double v2 = 0.0;      ///< steady level under the saturated gain
  double v_max = 0.0;   ///< max(v1, v2)
  double alpha = 0.0;
  double beta = 0.0;
  double v0 = 0.0;
};

/// Throws HypothesisViolated if alpha <= 1/T, DomainError for beta < 0 or V0 < 0.
LemmaBounds lemma1_bounds(double alpha, double beta, const PptaSchedule& sched,
                          double v0);

}  // namespace ptbore
