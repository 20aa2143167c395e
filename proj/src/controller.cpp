#include "ptbore/controller.hpp"

#include <cmath>
#include <sstream>

#include "ptbore/errors.hpp"

namespace ptbore {

double tube_level(double margin) { return 1.0 - std::cos(margin); }

TrackingErrors tracking_errors_unchecked(const Rotation& R, const Vec3& omega,
                                         const UnitVec3& x_r, const Vec3& omega_r, double t,
                                         const ControlGains& gains) {
  TrackingErrors e;
  const Mat3& m = R.matrix();
  // No renormalization: stage values must enter the error formulas unmodified.
  e.sigma = UnitVec3::unchecked(m.transpose() * x_r.vec());
  e.sigma_e = 1.0 - e.sigma.dot(gains.b_body);
  e.omega_e = omega - m.transpose() * omega_r;
  e.xi = e.sigma_e / gains.rho;
  e.omega_c = virtual_control(e.sigma, t, gains);
  e.z = e.omega_e - e.omega_c;
  return e;
}

TrackingErrors compute_errors(const Rotation& R, const Vec3& omega, const UnitVec3& x_r,
                              const Vec3& omega_r, double t, const ControlGains& gains) {
  TrackingErrors e = tracking_errors_unchecked(R, omega, x_r, omega_r, t, gains);
  if (!(e.xi < 1.0)) {
    std::ostringstream os;
    os << "boresight left the safe tube (xi = " << e.xi << ")";
    throw TubeBreach(os.str(), e.xi);
  }
  return e;
}

ErrorDynamicsTerms coriolis_feedforward(const Vec3& omega_e, const Rotation& R,
                                        const Vec3& h_p, const Vec3& h_p_dot, const Mat3& J) {
  const Mat3& m = R.matrix();
  const Vec3 w = m.transpose() * h_p;
  const Mat3 wx = cross_matrix(w);
  ErrorDynamicsTerms out;
  out.C = -cross_matrix(J * (omega_e + w)) + (wx * J + J * wx);
  out.G = wx * (J * w) + J * (m.transpose() * h_p_dot);
  out.H = -out.C * omega_e - out.G;
  return out;
}

Vec3 virtual_control(const UnitVec3& sigma, double t, const ControlGains& gains) {
  return -gains.c2 * mu(t, gains.sched) * sigma.vec().cross(gains.b_body.vec());
}

Vec3 virtual_control_dot(const UnitVec3& sigma, const Vec3& sigma_dot, double t,
                         const ControlGains& gains) {
  const Vec3& b = gains.b_body.vec();
  return -gains.c2 * mu_dot(t, gains.sched) * sigma.vec().cross(b) -
         gains.c2 * mu(t, gains.sched) * sigma_dot.cross(b);
}

Vec3 sigma_rate(const Rotation& R, const Vec3& omega, const UnitVec3& x_r,
                const Vec3& omega_r) {
  const Mat3& m = R.matrix();
  const Vec3 sigma = m.transpose() * x_r.vec();
  return -omega.cross(sigma) + m.transpose() * omega_r.cross(x_r.vec());
}

Vec3 control_law(const TrackingErrors& err, const Vec3& H, const Vec3& omega_c_dot,
                 const Vec3& d_hat, const Mat3& J, const ControlGains& gains, double t) {
  if (!(err.xi < 1.0)) {
    throw TubeBreach("control_law: barrier term is singular for xi >= 1", err.xi);
  }
  const Vec3 barrier =
      err.sigma.vec().cross(gains.b_body.vec()) / (gains.rho * (1.0 - err.xi));
  return -gains.c3 * mu(t, gains.sched) * err.z + J * omega_c_dot - H - d_hat - barrier;
}

Vec3 baseline_apf_controller(const Rotation& R, const Vec3& omega, const UnitVec3& x,
                             const GuidanceConfig& cfg, double kp, double kd) {
  const Vec3 g = grad_U(x.vec(), cfg);
  return -kp * (R.matrix().transpose() * x.vec().cross(g)) - kd * omega;
}

Vec3 baseline_pd_controller(const Rotation& R, const Vec3& omega, const UnitVec3& x,
                            const UnitVec3& x_star, double kp, double kd) {
  return kp * (R.matrix().transpose() * x.vec().cross(x_star.vec())) - kd * omega;
}

}  // namespace ptbore
