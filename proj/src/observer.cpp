#include "ptbore/observer.hpp"

namespace ptbore {

Vec3 ptdo_rate(const PtdoState& obs, const Vec3& omega_e, const Vec3& H, const Vec3& u,
               double t, const Mat3& J) {
  const double m = mu(t, obs.sched);
  const double m_dot = mu_dot(t, obs.sched);
  const double c1 = obs.c1;
  const Vec3 jw = J * omega_e;
  return -c1 * m * obs.p - c1 * m * (c1 * m * jw + H + u) - c1 * m_dot * jw;
}

Vec3 estimate(const PtdoState& obs, const Vec3& omega_e, double t, const Mat3& J) {
  return obs.p + obs.c1 * mu(t, obs.sched) * (J * omega_e);
}

}  // namespace ptbore
