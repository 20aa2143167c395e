#pragma once

// Closed-loop rigid-body simulation: the coupled (R, omega, x_r, p) ODE and
// its fixed-step RK4 integration.

#include <optional>
#include <string>
#include <vector>

#include "ptbore/controller.hpp"
#include "ptbore/errors.hpp"
#include "ptbore/metrics.hpp"
#include "ptbore/scenario.hpp"

namespace ptbore {

struct SimState {
  double t = 0.0;
  Rotation R;
  Vec3 omega = Vec3::Zero();
  UnitVec3 x_r;
  Vec3 p = Vec3::Zero();
};

struct StateRate {
  Mat3 R_dot = Mat3::Zero();
  Vec3 omega_dot = Vec3::Zero();
  Vec3 x_r_dot = Vec3::Zero();
  Vec3 p_dot = Vec3::Zero();
};

/// Everything the controller stack computed at one evaluation.
struct ClosedLoopSignals {
  Vec3 omega_r = Vec3::Zero();
  Vec3 omega_r_dot = Vec3::Zero();
  TrackingErrors errors;
  ErrorDynamicsTerms terms;  // built with the nominal inertia
  Vec3 omega_c_dot = Vec3::Zero();
  Vec3 d = Vec3::Zero();         // external disturbance
  Vec3 d_lumped = Vec3::Zero();  // what the observer sees: d plus inertia-mismatch terms
  Vec3 d_hat = Vec3::Zero();
  Vec3 u = Vec3::Zero();  // applied torque, after the optional clamp
  Vec3 u_raw = Vec3::Zero();
};

struct RateEvaluation {
  StateRate rate;
  ClosedLoopSignals signals;
};

/// Time derivative of the full state. The plant uses J(t); every algorithm
/// uses the nominal J0. Throws TubeBreach (tracking controller only),
/// BoundaryViolation or NonFiniteState.
RateEvaluation closed_loop_rate(const SimState& s, const Scenario& sc);

/// Initial state: R(0), omega(0) per the scenario, x_r(0) = x(0), p(0) = 0.
SimState initial_state(const Scenario& sc);

struct TrajectorySample {
  SimState state;
  UnitVec3 x;  // R b
  ClosedLoopSignals signals;
  double d_tilde_norm = 0.0;     // ||d_lumped - d_hat||
  std::vector<double> clearance;  // d(x, f_i) - theta_i, every zone
};

struct Trajectory {
  std::vector<TrajectorySample> samples;
  MetricsSummary metrics;
};

enum class FailureKind { TubeBreach, BoundaryViolation, NonFiniteState, Other };

std::string_view to_string(FailureKind kind);

class SimulationError : public Error {
public:
  SimulationError(FailureKind kind, double t, SimState state, const std::string& detail);
  FailureKind kind() const { return kind_; }
  double time() const { return t_; }
  const SimState& state() const { return state_; }

private:
  FailureKind kind_;
  double t_;
  SimState state_;
};

struct SimulationOutcome {
  Trajectory trajectory;  // samples up to the failure, if any
  std::optional<SimulationFailure> failure;
};

/// Runs the scenario and keeps whatever was integrated before a fatal error.
SimulationOutcome simulate_recording(const Scenario& sc);

/// Runs the scenario; throws SimulationError on a fatal condition.
Trajectory simulate(const Scenario& sc);

/// One RK4 step of the monolithic state followed by SO(3) and S^2 repair.
SimState rk4_step(const SimState& s, double h, const Scenario& sc,
                  RateEvaluation* first_stage = nullptr);

enum class RotationStepping { Additive, Exponential };

struct FreeBodyState {
  Rotation R;
  Vec3 omega;
};

/// Torque-free rigid body, RK4. Additive: R integrated in R^{3x3} then
/// projected. Exponential: RK4 on (theta, omega) per step, R <- R exp(theta).
FreeBodyState propagate_free_body(const Rotation& r0, const Vec3& omega0, const Mat3& J,
                                  double dt, double t_end, RotationStepping stepping);

}  // namespace ptbore
