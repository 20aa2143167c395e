#include "ptbore/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ptbore/observer.hpp"

namespace ptbore {

namespace {

Vec3 clamp_per_axis(const Vec3& u, double limit) {
  return u.cwiseMax(Vec3::Constant(-limit)).cwiseMin(Vec3::Constant(limit));
}

std::string at_time(const char* what, double t) {
  std::ostringstream os;
  os << what << " at t = " << t;
  return os.str();
}

/// Folds one evaluated state into the run metrics.
class MetricsAccumulator {
public:
  MetricsAccumulator(const Scenario& sc, double h)
      : sc_(sc), half_step_(0.5 * h), ibgc_(sc.controller == ControllerKind::Ibgc) {
    m_.convergence_threshold = sc.convergence_threshold;
    m_.min_zone_clearance.assign(sc.guidance.zone_count(), std::numeric_limits<double>::infinity());
    m_.min_reference_margin = std::numeric_limits<double>::infinity();
  }

  void add(const TrajectorySample& s) {
    const double t = s.state.t;
    const UnitVec3& goal = sc_.guidance.goal();
    for (std::size_t i = 0; i < s.clearance.size(); ++i) {
      m_.min_zone_clearance[i] = std::min(m_.min_zone_clearance[i], s.clearance[i]);
      const double ref_margin = geodesic_distance(s.state.x_r, sc_.guidance.zone(i).axis) -
                                sc_.guidance.zone(i).half_angle - sc_.guidance.margin();
      m_.min_reference_margin = std::min(m_.min_reference_margin, ref_margin);
    }
    m_.max_u_inf = std::max(m_.max_u_inf, s.signals.u.cwiseAbs().maxCoeff());
    m_.max_xi = std::max(m_.max_xi, s.signals.errors.xi);

    const double angle = geodesic_distance(s.x, goal);
    if (angle < sc_.convergence_threshold) {
      if (!entered_) entered_ = t;
    } else {
      entered_.reset();
    }

    const double tg_star = sc_.guidance.schedule().saturation();
    if (!m_.error_at_tg_star && std::abs(t - tg_star) <= half_step_) {
      m_.error_at_tg_star = 1.0 - s.x.dot(goal);
      m_.reference_error_at_tg_star = 1.0 - s.state.x_r.dot(goal);
    }
    if (ibgc_) {
      const double tc_star = sc_.gains.sched.saturation();
      if (!m_.sigma_e_at_tc_star && std::abs(t - tc_star) <= half_step_) {
        m_.sigma_e_at_tc_star = s.signals.errors.sigma_e;
        m_.d_tilde_at_tc_star = s.d_tilde_norm;
      }
      if (t >= tc_star) {
        m_.max_d_tilde_after_tc_star =
            std::max(m_.max_d_tilde_after_tc_star.value_or(0.0), s.d_tilde_norm);
      }
    }
    m_.final_time = t;
    m_.final_error = 1.0 - s.x.dot(goal);
    m_.converged = angle < sc_.convergence_threshold;
  }

  MetricsSummary finish(std::optional<SimulationFailure> failure) {
    m_.convergence_time = (!failure && m_.converged) ? entered_ : std::nullopt;
    if (failure && ibgc_ && failure->kind == "tube_breach") m_.tube_breached = true;
    m_.failure = std::move(failure);
    return m_;
  }

private:
  const Scenario& sc_;
  double half_step_;
  bool ibgc_;
  MetricsSummary m_;
  std::optional<double> entered_;
};

TrajectorySample make_sample(const SimState& s, const RateEvaluation& ev, const Scenario& sc) {
  TrajectorySample out;
  out.state = s;
  out.x = UnitVec3::unchecked(s.R.matrix() * sc.gains.b_body.vec());
  out.signals = ev.signals;
  out.d_tilde_norm = (ev.signals.d_lumped - ev.signals.d_hat).norm();
  out.clearance.reserve(sc.guidance.zone_count());
  for (const auto& z : sc.guidance.zones()) {
    out.clearance.push_back(geodesic_distance(out.x, z.axis) - z.half_angle);
  }
  return out;
}

}  // namespace

std::string_view to_string(FailureKind kind) {
  switch (kind) {
    case FailureKind::TubeBreach: return "tube_breach";
    case FailureKind::BoundaryViolation: return "boundary_violation";
    case FailureKind::NonFiniteState: return "non_finite_state";
    case FailureKind::Other: return "other";
  }
  return "other";
}

SimulationError::SimulationError(FailureKind kind, double t, SimState state,
                                 const std::string& detail)
    : Error(std::string(to_string(kind)) + " at t = " + std::to_string(t) + ": " + detail),
      kind_(kind),
      t_(t),
      state_(std::move(state)) {}

RateEvaluation closed_loop_rate(const SimState& s, const Scenario& sc) {
  RateEvaluation ev;
  ClosedLoopSignals& sig = ev.signals;
  const Mat3& R = s.R.matrix();
  const Mat3& J0 = sc.plant.J0;
  const double t = s.t;

  sig.omega_r = guidance_law(s.x_r.vec(), t, sc.guidance_mode, sc.guidance);
  sig.omega_r_dot = guidance_law_dot(s.x_r.vec(), t, sc.guidance_mode, sc.guidance);

  const bool ibgc = sc.controller == ControllerKind::Ibgc;
  sig.errors = ibgc ? compute_errors(s.R, s.omega, s.x_r, sig.omega_r, t, sc.gains)
                    : tracking_errors_unchecked(s.R, s.omega, s.x_r, sig.omega_r, t, sc.gains);
  sig.terms = coriolis_feedforward(sig.errors.omega_e, s.R, sig.omega_r, sig.omega_r_dot, J0);
  const PtdoState obs{s.p, sc.c1, sc.gains.sched};
  sig.d_hat = estimate(obs, sig.errors.omega_e, t, J0);

  const UnitVec3 x = UnitVec3::unchecked(R * sc.gains.b_body.vec());
  switch (sc.controller) {
    case ControllerKind::Ibgc: {
      const Vec3 sigma_dot = sigma_rate(s.R, s.omega, s.x_r, sig.omega_r);
      sig.omega_c_dot = virtual_control_dot(sig.errors.sigma, sigma_dot, t, sc.gains);
      sig.u_raw = control_law(sig.errors, sig.terms.H, sig.omega_c_dot, sig.d_hat, J0,
                              sc.gains, t);
      break;
    }
    case ControllerKind::Apf:
      sig.u_raw = baseline_apf_controller(s.R, s.omega, x, sc.guidance, sc.apf.kp, sc.apf.kd);
      break;
    case ControllerKind::Pd:
      sig.u_raw = baseline_pd_controller(s.R, s.omega, x, sc.guidance.goal(), sc.pd.kp, sc.pd.kd);
      break;
    case ControllerKind::None:
      sig.u_raw = Vec3::Zero();
      break;
  }
  sig.u = sc.plant.torque_limit ? clamp_per_axis(sig.u_raw, *sc.plant.torque_limit) : sig.u_raw;

  if (sc.plant.disturbance_enabled) sig.d = disturbance(t).d;
  const Mat3 J = plant_inertia(t, sc.plant);
  const Vec3 jw = J * s.omega;
  ev.rate.omega_dot = J.inverse() * (jw.cross(s.omega) + sig.u + sig.d);
  ev.rate.R_dot = R * cross_matrix(s.omega);
  ev.rate.x_r_dot = sig.omega_r.cross(s.x_r.vec());
  ev.rate.p_dot = ibgc ? ptdo_rate(obs, sig.errors.omega_e, sig.terms.H, sig.u, t, J0)
                       : Vec3::Zero();

  // Disturbance as reconstructed through the nominal error dynamics:
  // J0 w_e' = -C0 w_e - G0 + u + d_l.
  const Vec3 w = R.transpose() * sig.omega_r;
  const Vec3 omega_e_dot =
      ev.rate.omega_dot + s.omega.cross(w) - R.transpose() * sig.omega_r_dot;
  sig.d_lumped = J0 * omega_e_dot - sig.terms.H - sig.u;

  if (!ev.rate.omega_dot.allFinite() || !ev.rate.p_dot.allFinite() ||
      !ev.rate.x_r_dot.allFinite()) {
    throw NonFiniteState(at_time("closed-loop rate is not finite", t));
  }
  return ev;
}

SimState initial_state(const Scenario& sc) {
  SimState s;
  s.t = 0.0;
  s.R = initial_attitude(sc);
  s.omega = initial_body_rate(sc, s.R);
  s.x_r = sc.initial_boresight;
  s.p = Vec3::Zero();
  return s;
}

SimState rk4_step(const SimState& s, double h, const Scenario& sc, RateEvaluation* first_stage) {
  auto stage = [&](double t, const Mat3& R, const Vec3& w, const Vec3& x, const Vec3& p) {
    const SimState st{t, Rotation::unchecked(R), w, UnitVec3::unchecked(x), p};
    return closed_loop_rate(st, sc).rate;
  };
  const RateEvaluation e1 = closed_loop_rate(s, sc);
  if (first_stage) *first_stage = e1;
  const StateRate& k1 = e1.rate;
  const Mat3& R = s.R.matrix();
  const Vec3& x = s.x_r.vec();

  const double th = 0.5 * h;
  const StateRate k2 = stage(s.t + th, R + th * k1.R_dot, s.omega + th * k1.omega_dot,
                             x + th * k1.x_r_dot, s.p + th * k1.p_dot);
  const StateRate k3 = stage(s.t + th, R + th * k2.R_dot, s.omega + th * k2.omega_dot,
                             x + th * k2.x_r_dot, s.p + th * k2.p_dot);
  const StateRate k4 = stage(s.t + h, R + h * k3.R_dot, s.omega + h * k3.omega_dot,
                             x + h * k3.x_r_dot, s.p + h * k3.p_dot);

  const double w6 = h / 6.0;
  const Mat3 R_next = R + w6 * (k1.R_dot + 2.0 * k2.R_dot + 2.0 * k3.R_dot + k4.R_dot);
  const Vec3 omega_next =
      s.omega + w6 * (k1.omega_dot + 2.0 * k2.omega_dot + 2.0 * k3.omega_dot + k4.omega_dot);
  const Vec3 x_next = x + w6 * (k1.x_r_dot + 2.0 * k2.x_r_dot + 2.0 * k3.x_r_dot + k4.x_r_dot);
  const Vec3 p_next = s.p + w6 * (k1.p_dot + 2.0 * k2.p_dot + 2.0 * k3.p_dot + k4.p_dot);

  if (!R_next.allFinite() || !omega_next.allFinite() || !x_next.allFinite() ||
      !p_next.allFinite()) {
    throw NonFiniteState(at_time("state became non-finite", s.t + h));
  }
  SimState out;
  out.t = s.t + h;
  out.R = reorthonormalize(R_next);
  out.omega = omega_next;
  out.x_r = UnitVec3(x_next);
  out.p = p_next;
  return out;
}

SimulationOutcome simulate_recording(const Scenario& sc) {
  SimulationOutcome out;
  MetricsAccumulator acc(sc, sc.dt);
  std::optional<SimulationFailure> failure;
  SimState s;
  auto& samples = out.trajectory.samples;

  const long steps = sc.t_end > 0.0 ? static_cast<long>(std::ceil(sc.t_end / sc.dt - 1e-9)) : 0;
  const int dec = std::max(sc.output_decimation, 1);
  // Samples that only feed the metrics live here until the next step.
  TrajectorySample scratch;

  auto fail = [&](FailureKind kind, const std::exception& e) {
    failure = SimulationFailure{std::string(to_string(kind)), s.t, e.what()};
  };

  try {
    s = initial_state(sc);
    for (long k = 0; k <= steps; ++k) {
      RateEvaluation ev;
      const bool last = k == steps;
      if (last) {
        ev = closed_loop_rate(s, sc);
      }
      SimState next;
      if (!last) {
        const double t_next = std::min(static_cast<double>(k + 1) * sc.dt, sc.t_end);
        next = rk4_step(s, t_next - s.t, sc, &ev);
        next.t = t_next;
      }
      const bool emit = last || k % dec == 0;
      if (emit) {
        samples.push_back(make_sample(s, ev, sc));
        acc.add(samples.back());
      } else {
        scratch = make_sample(s, ev, sc);
        acc.add(scratch);
      }
      if (!last) s = next;
    }
  } catch (const TubeBreach& e) {
    fail(FailureKind::TubeBreach, e);
  } catch (const BoundaryViolation& e) {
    fail(FailureKind::BoundaryViolation, e);
  } catch (const NonFiniteState& e) {
    fail(FailureKind::NonFiniteState, e);
  } catch (const DegenerateMatrix& e) {
    fail(FailureKind::NonFiniteState, e);
  }
  out.failure = failure;
  out.trajectory.metrics = acc.finish(failure);
  return out;
}

Trajectory simulate(const Scenario& sc) {
  SimulationOutcome out = simulate_recording(sc);
  if (out.failure) {
    FailureKind kind = FailureKind::Other;
    if (out.failure->kind == "tube_breach") kind = FailureKind::TubeBreach;
    if (out.failure->kind == "boundary_violation") kind = FailureKind::BoundaryViolation;
    if (out.failure->kind == "non_finite_state") kind = FailureKind::NonFiniteState;
    SimState last = out.trajectory.samples.empty() ? SimState{}
                                                   : out.trajectory.samples.back().state;
    throw SimulationError(kind, out.failure->t, last, out.failure->message);
  }
  return std::move(out.trajectory);
}

FreeBodyState propagate_free_body(const Rotation& r0, const Vec3& omega0, const Mat3& J,
                                  double dt, double t_end, RotationStepping stepping) {
  const Mat3 J_inv = J.inverse();
  auto euler = [&](const Vec3& w) -> Vec3 { return J_inv * (J * w).cross(w); };

  FreeBodyState s{r0, omega0};
  const long steps = static_cast<long>(std::ceil(t_end / dt - 1e-9));
  for (long k = 0; k < steps; ++k) {
    const double h = std::min(static_cast<double>(k + 1) * dt, t_end) - static_cast<double>(k) * dt;
    if (stepping == RotationStepping::Additive) {
      const Mat3& R = s.R.matrix();
      const Vec3& w = s.omega;
      const Vec3 a1 = euler(w);
      const Mat3 b1 = R * cross_matrix(w);
      const Vec3 w2 = w + 0.5 * h * a1;
      const Mat3 R2 = R + 0.5 * h * b1;
      const Vec3 a2 = euler(w2);
      const Mat3 b2 = R2 * cross_matrix(w2);
      const Vec3 w3 = w + 0.5 * h * a2;
      const Mat3 R3 = R + 0.5 * h * b2;
      const Vec3 a3 = euler(w3);
      const Mat3 b3 = R3 * cross_matrix(w3);
      const Vec3 w4 = w + h * a3;
      const Mat3 R4 = R + h * b3;
      const Vec3 a4 = euler(w4);
      const Mat3 b4 = R4 * cross_matrix(w4);
      s.omega = w + h / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4);
      s.R = reorthonormalize(R + h / 6.0 * (b1 + 2.0 * b2 + 2.0 * b3 + b4));
    } else {
      // Lie-group RK4: integrate the exponential coordinates theta of the step
      // increment, theta' = dexp^{-1}(omega) truncated after the theta^2 term.
      auto theta_rate = [](const Vec3& th, const Vec3& w) -> Vec3 {
        return w + 0.5 * th.cross(w) + th.cross(th.cross(w)) / 12.0;
      };
      const Vec3& w = s.omega;
      const Vec3 th1 = Vec3::Zero();
      const Vec3 a1 = euler(w), c1 = theta_rate(th1, w);
      const Vec3 w2 = w + 0.5 * h * a1, th2 = 0.5 * h * c1;
      const Vec3 a2 = euler(w2), c2 = theta_rate(th2, w2);
      const Vec3 w3 = w + 0.5 * h * a2, th3 = 0.5 * h * c2;
      const Vec3 a3 = euler(w3), c3 = theta_rate(th3, w3);
      const Vec3 w4 = w + h * a3, th4 = h * c3;
      const Vec3 a4 = euler(w4), c4 = theta_rate(th4, w4);
      s.omega = w + h / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4);
      const Vec3 theta = h / 6.0 * (c1 + 2.0 * c2 + 2.0 * c3 + c4);
      s.R = s.R * exp_so3(theta);
    }
  }
  return s;
}

}  // namespace ptbore
