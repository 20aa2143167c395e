#pragma once

// Prescribed-time disturbance observer on the angular-velocity error dynamics
// J w_e' = H + u + d.

#include "ptbore/manifold.hpp"
#include "ptbore/ppta.hpp"

namespace ptbore {

struct PtdoState {
  Vec3 p = Vec3::Zero();  // internal state, N m
  double c1 = 1.0;        // 1/s
  PptaSchedule sched;     // (T_c, T_c*)
};

/// Internal-state derivative p_dot.
Vec3 ptdo_rate(const PtdoState& obs, const Vec3& omega_e, const Vec3& H, const Vec3& u,
               double t, const Mat3& J);

/// Disturbance estimate d_hat = p + c1 mu_c(t) J w_e.
Vec3 estimate(const PtdoState& obs, const Vec3& omega_e, double t, const Mat3& J);

}  // namespace ptbore
