#pragma once

// Reduced-attitude tracking errors, the safe-tube barrier controller and the
// APF / PD comparison controllers.

#include "ptbore/guidance.hpp"
#include "ptbore/manifold.hpp"
#include "ptbore/ppta.hpp"

namespace ptbore {

struct ControlGains {
  double c2 = 0.0;
  double c3 = 0.0;
  double rho = 0.0;  // tube level, 0 < rho <= 1 - cos(margin)
  UnitVec3 b_body;   // boresight in the body frame
  PptaSchedule sched;

  bool operator==(const ControlGains&) const = default;
};

/// Tube level 1 - cos(margin).
double tube_level(double margin);

struct TrackingErrors {
  UnitVec3 sigma;  // R^T x_r
  double sigma_e = 0.0;
  Vec3 omega_e = Vec3::Zero();
  double xi = 0.0;
  Vec3 omega_c = Vec3::Zero();
  Vec3 z = Vec3::Zero();
};

/// sigma, sigma_e, omega_e = omega - R^T Omega_r, xi, omega_c(t) and z.
/// Throws TubeBreach when xi >= 1.
TrackingErrors compute_errors(const Rotation& R, const Vec3& omega, const UnitVec3& x_r,
                              const Vec3& omega_r, double t, const ControlGains& gains);

/// Same quantities without the tube check, for logging runs of other controllers.
TrackingErrors tracking_errors_unchecked(const Rotation& R, const Vec3& omega,
                                         const UnitVec3& x_r, const Vec3& omega_r, double t,
                                         const ControlGains& gains);

struct ErrorDynamicsTerms {
  Mat3 C = Mat3::Zero();
  Vec3 G = Vec3::Zero();
  Vec3 H = Vec3::Zero();  // -C w_e - G
};

/// Coriolis-like matrix, feedforward and lumped H of J w_e' = H + u + d, with
/// h_p the reference angular velocity (inertial) and h_p_dot its rate.
ErrorDynamicsTerms coriolis_feedforward(const Vec3& omega_e, const Rotation& R,
                                        const Vec3& h_p, const Vec3& h_p_dot, const Mat3& J);

/// omega_c = -c2 mu_c(t) [sigma]x b.
Vec3 virtual_control(const UnitVec3& sigma, double t, const ControlGains& gains);

/// Time derivative of omega_c given sigma_dot.
Vec3 virtual_control_dot(const UnitVec3& sigma, const Vec3& sigma_dot, double t,
                         const ControlGains& gains);

/// sigma_dot = -[omega]x sigma + R^T [Omega_r]x x_r.
Vec3 sigma_rate(const Rotation& R, const Vec3& omega, const UnitVec3& x_r,
                const Vec3& omega_r);

/// u = -c3 mu_c z + J omega_c_dot - H - d_hat - [sigma]x b / (rho (1 - xi)).
Vec3 control_law(const TrackingErrors& err, const Vec3& H, const Vec3& omega_c_dot,
                 const Vec3& d_hat, const Mat3& J, const ControlGains& gains, double t);

/// u = -kp R^T [x]x grad U(x) - kd omega.
Vec3 baseline_apf_controller(const Rotation& R, const Vec3& omega, const UnitVec3& x,
                             const GuidanceConfig& cfg, double kp, double kd);

/// u = kp R^T [x]x x_star - kd omega.
Vec3 baseline_pd_controller(const Rotation& R, const Vec3& omega, const UnitVec3& x,
                            const UnitVec3& x_star, double kp, double kd);

}  // namespace ptbore
