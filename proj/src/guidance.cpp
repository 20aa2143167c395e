#include "ptbore/guidance.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "ptbore/errors.hpp"

namespace ptbore {

namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;

void check_below_margin(double z, double eps_i) {
  if (!(z < eps_i)) {
    throw BoundaryViolation("state entered a margin-augmented forbidden zone");
  }
}

void check_zone(double z, std::size_t i, const GuidanceConfig& cfg) {
  if (!(z < cfg.eps(i))) {
    std::ostringstream os;
    os << "state entered margin-augmented zone " << i << " (x.f = " << z
       << ", limit " << cfg.eps(i) << ")";
    throw BoundaryViolation(os.str(), static_cast<int>(i));
  }
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

}  // namespace

GuidanceConfig::GuidanceConfig(std::vector<ForbiddenZone> zones, UnitVec3 goal,
                               double margin, double influence, double iota,
                               double k_a, double k_r, PptaSchedule schedule)
    : zones_(std::move(zones)),
      goal_(goal),
      margin_(margin),
      influence_(influence),
      iota_(iota),
      k_a_(k_a),
      k_r_(k_r),
      schedule_(schedule) {
  eps_.reserve(zones_.size());
  eps_star_.reserve(zones_.size());
  for (const auto& z : zones_) {
    eps_.push_back(std::cos(z.half_angle + margin_));
    eps_star_.push_back(std::cos(z.half_angle + influence_));
  }
}

GuidanceConfig GuidanceConfig::with_virtual_zone(UnitVec3 goal, double theta0,
                                                 std::vector<ForbiddenZone> real_zones,
                                                 double margin, double influence,
                                                 double iota, double k_a, double k_r,
                                                 PptaSchedule schedule) {
  std::vector<ForbiddenZone> zones;
  zones.reserve(real_zones.size() + 1);
  zones.push_back({-goal, theta0, true});
  for (auto& z : real_zones) {
    z.is_virtual = false;
    zones.push_back(z);
  }
  return GuidanceConfig(std::move(zones), goal, margin, influence, iota, k_a, k_r, schedule);
}

ValidationReport validate_config(const GuidanceConfig& cfg) {
  ValidationReport rep;
  const auto& zones = cfg.zones();

  for (std::size_t i = 0; i < zones.size(); ++i) {
    const double th = zones[i].half_angle;
    if (!(th > 0.0 && th < kHalfPi)) {
      rep.failures.push_back("zone " + std::to_string(i) + ": half-angle " + fmt(th) +
                             " rad outside (0, pi/2)");
    }
  }

  // (a) pairwise clearance
  for (std::size_t i = 0; i < zones.size(); ++i) {
    for (std::size_t j = i + 1; j < zones.size(); ++j) {
      const double d = geodesic_distance(zones[i].axis, zones[j].axis);
      const double need = zones[i].half_angle + zones[j].half_angle + 2.0 * cfg.iota();
      if (!(d > need)) {
        rep.failures.push_back("(a) zones " + std::to_string(i) + " and " +
                               std::to_string(j) + " are " + fmt(d) +
                               " rad apart, need > " + fmt(need));
      }
    }
  }

  // (b) 0 < margin < influence <= iota < pi/2
  if (!(cfg.margin() > 0.0 && cfg.margin() < cfg.influence() &&
        cfg.influence() <= cfg.iota() && cfg.iota() < kHalfPi)) {
    rep.failures.push_back("(b) need 0 < margin < influence <= iota < pi/2 (margin=" +
                           fmt(cfg.margin()) + ", influence=" + fmt(cfg.influence()) +
                           ", iota=" + fmt(cfg.iota()) + ")");
  }

  // (c) goal outside every influence region
  for (std::size_t i = 0; i < zones.size(); ++i) {
    const double d = geodesic_distance(cfg.goal(), zones[i].axis);
    const double reach = zones[i].half_angle + cfg.influence();
    if (!(d > reach)) {
      rep.failures.push_back("(c) goal lies inside the influence region of zone " +
                             std::to_string(i) + " (distance " + fmt(d) + " <= " +
                             fmt(reach) + ")");
    }
  }

  // (d) virtual zone at -goal, and only at index 0
  if (zones.empty() || !zones[0].is_virtual ||
      (zones[0].axis.vec() + cfg.goal().vec()).norm() > 1e-9) {
    rep.failures.push_back("(d) zone 0 must be the virtual zone with axis -goal");
  }
  for (std::size_t i = 1; i < zones.size(); ++i) {
    if (zones[i].is_virtual) {
      rep.failures.push_back("(d) zone " + std::to_string(i) +
                             " is marked virtual; only zone 0 may be");
    }
  }

  if (!(cfg.k_a() > 0.0 && cfg.k_r() > 0.0)) {
    rep.failures.push_back("potential gains k_a and k_r must be positive");
  }
  return rep;
}

double phi(double z, double eps_i, double eps_star_i) {
  check_below_margin(z, eps_i);
  if (z <= eps_star_i) return 0.0;
  const double dz = z - eps_star_i;
  return dz * dz * std::log((eps_i - eps_star_i) / (eps_i - z));
}

double phi_grad(double z, double eps_i, double eps_star_i) {
  check_below_margin(z, eps_i);
  if (z <= eps_star_i) return 0.0;
  const double dz = z - eps_star_i;
  const double gap = eps_i - z;
  return 2.0 * dz * std::log((eps_i - eps_star_i) / gap) + dz * dz / gap;
}

double phi_hess(double z, double eps_i, double eps_star_i) {
  check_below_margin(z, eps_i);
  if (z <= eps_star_i) return 0.0;
  const double dz = z - eps_star_i;
  const double gap = eps_i - z;
  const double q = dz / gap;
  return 2.0 * std::log((eps_i - eps_star_i) / gap) + 4.0 * q + q * q;
}

double potential_U(const UnitVec3& x, const GuidanceConfig& cfg) {
  double rep = 0.0;
  for (std::size_t i = 0; i < cfg.zone_count(); ++i) {
    const double z = x.dot(cfg.zone(i).axis);
    check_zone(z, i, cfg);
    rep += phi(z, cfg.eps(i), cfg.eps_star(i));
  }
  return cfg.k_a() * (1.0 - x.dot(cfg.goal())) + cfg.k_r() * rep;
}

Vec3 grad_U(const Vec3& x, const GuidanceConfig& cfg) {
  Vec3 g = -cfg.k_a() * cfg.goal().vec();
  for (std::size_t i = 0; i < cfg.zone_count(); ++i) {
    const Vec3& f = cfg.zone(i).axis.vec();
    const double z = x.dot(f);
    check_zone(z, i, cfg);
    const double dphi = phi_grad(z, cfg.eps(i), cfg.eps_star(i));
    if (dphi != 0.0) g += cfg.k_r() * dphi * f;
  }
  return g;
}

Mat3 hess_U(const Vec3& x, const GuidanceConfig& cfg) {
  Mat3 h = Mat3::Zero();
  for (std::size_t i = 0; i < cfg.zone_count(); ++i) {
    const Vec3& f = cfg.zone(i).axis.vec();
    const double z = x.dot(f);
    check_zone(z, i, cfg);
    const double d2 = phi_hess(z, cfg.eps(i), cfg.eps_star(i));
    if (d2 != 0.0) h += cfg.k_r() * d2 * f * f.transpose();
  }
  return h;
}

bool in_free_space(const UnitVec3& x, const GuidanceConfig& cfg) {
  for (std::size_t i = 0; i < cfg.zone_count(); ++i) {
    if (!(x.dot(cfg.zone(i).axis) < cfg.eps(i))) return false;
  }
  return true;
}

Vec3 baseline_law(const Vec3& x, const GuidanceConfig& cfg) {
  // [x]x^T g = -x x g = g x x
  return grad_U(x, cfg).cross(x);
}

double guidance_gain(double t, GuidanceMode mode, const GuidanceConfig& cfg) {
  return mode == GuidanceMode::PrescribedTime ? mu(t, cfg.schedule()) : 1.0;
}

double guidance_gain_dot(double t, GuidanceMode mode, const GuidanceConfig& cfg) {
  return mode == GuidanceMode::PrescribedTime ? mu_dot(t, cfg.schedule()) : 0.0;
}

Vec3 guidance_law(const Vec3& x, double t, GuidanceMode mode, const GuidanceConfig& cfg) {
  return guidance_gain(t, mode, cfg) * baseline_law(x, cfg);
}

Vec3 pt_guidance_law(const Vec3& x, double t, const GuidanceConfig& cfg) {
  return guidance_law(x, t, GuidanceMode::PrescribedTime, cfg);
}

Vec3 guidance_law_dot(const Vec3& x, double t, GuidanceMode mode, const GuidanceConfig& cfg) {
  const double g = guidance_gain(t, mode, cfg);
  const double g_dot = guidance_gain_dot(t, mode, cfg);
  const Vec3 grad = grad_U(x, cfg);
  const Vec3 h = grad.cross(x);
  const Vec3 x_dot = g * h.cross(x);
  // Jacobian of h(x) = [grad U]x x:  [grad U]x - [x]x Hess U
  const Vec3 jh_xdot = grad.cross(x_dot) - x.cross(hess_U(x, cfg) * x_dot);
  return g_dot * h + g * jh_xdot;
}

Vec3 guidance_law_dot(const Vec3& x, double t, const GuidanceConfig& cfg) {
  return guidance_law_dot(x, t, GuidanceMode::PrescribedTime, cfg);
}

Vec3 reference_rate(const Vec3& x, double t, GuidanceMode mode, const GuidanceConfig& cfg) {
  return guidance_law(x, t, mode, cfg).cross(x);
}

CriticalPointProblem::CriticalPointProblem(std::size_t zone_index, const GuidanceConfig& cfg)
    : cfg_(&cfg), zone_(zone_index) {
  if (zone_index >= cfg.zone_count()) {
    throw DomainError("critical point: zone index out of range");
  }
  const ForbiddenZone& zone = cfg.zone(zone_index);
  if (zone.is_virtual) {
    throw DomainError("critical point: the virtual zone has no critical point");
  }
  axis_ = zone.axis.vec();
  const Vec3& goal = cfg.goal().vec();
  if (goal.cross(axis_).norm() < 1e-9) {
    throw NoSolution("critical point: goal and axis of zone " +
                     std::to_string(zone_index) + " are collinear");
  }
  const Vec3 toward_goal = goal - goal.dot(axis_) * axis_;
  away_ = -toward_goal.normalized();
  goal_offset_ = geodesic_distance(cfg.goal(), zone.axis);
  lo_ = zone.half_angle + cfg.margin();
  hi_ = zone.half_angle + cfg.influence();
}

UnitVec3 CriticalPointProblem::point(double offset) const {
  return UnitVec3(Vec3(std::cos(offset) * axis_ + std::sin(offset) * away_));
}

double CriticalPointProblem::residual(double offset) const {
  // Both sides of the balance share the direction of the great-circle normal,
  // so only the magnitudes are compared.
  const double lhs = cfg_->k_a() * std::sin(goal_offset_ + offset) / std::sin(offset);
  const double rhs =
      cfg_->k_r() * phi_grad(std::cos(offset), cfg_->eps(zone_), cfg_->eps_star(zone_));
  return lhs - rhs;
}

UnitVec3 find_critical_point(std::size_t zone_index, const GuidanceConfig& cfg) {
  const CriticalPointProblem prob(zone_index, cfg);
  double lo = prob.lower();  // residual -> -inf
  double hi = prob.upper();  // residual > 0
  if (!(prob.residual(hi) > 0.0)) {
    throw NoSolution("critical point: no sign change in the influence annulus of zone " +
                     std::to_string(zone_index));
  }
  for (int it = 0; it < 200 && hi - lo > 2e-16 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (prob.residual(mid) > 0.0) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  // The upper end never sits on the margin boundary, so it is always evaluable.
  return prob.point(hi);
}

double critical_point_residual(const UnitVec3& c, std::size_t zone_index,
                               const GuidanceConfig& cfg) {
  const Vec3& f = cfg.zone(zone_index).axis.vec();
  const double dphi = phi_grad(c.dot(f), cfg.eps(zone_index), cfg.eps_star(zone_index));
  const Vec3 r = cfg.k_a() * c.vec().cross(cfg.goal().vec()) - cfg.k_r() * dphi * c.vec().cross(f);
  return r.norm();
}

std::vector<ReferenceSample> propagate_reference(const UnitVec3& x0, const GuidanceConfig& cfg,
                                                 double dt, double t_end, GuidanceMode mode,
                                                 int decimation) {
  if (!(dt > 0.0)) throw DomainError("propagate_reference: dt must be positive");
  if (decimation < 1) throw DomainError("propagate_reference: decimation must be >= 1");

  auto sample = [&](double t, const UnitVec3& x) {
    return ReferenceSample{t, x, guidance_law(x.vec(), t, mode, cfg),
                           guidance_law_dot(x.vec(), t, mode, cfg)};
  };

  const long steps = t_end > 0.0 ? static_cast<long>(std::ceil(t_end / dt - 1e-9)) : 0;
  std::vector<ReferenceSample> out;
  out.reserve(static_cast<std::size_t>(steps / decimation + 2));
  UnitVec3 x = x0;
  out.push_back(sample(0.0, x));

  for (long k = 0; k < steps; ++k) {
    const double t = static_cast<double>(k) * dt;
    const double t_next = std::min(static_cast<double>(k + 1) * dt, t_end);
    const double h = t_next - t;
    const Vec3& y = x.vec();
    const Vec3 k1 = reference_rate(y, t, mode, cfg);
    const Vec3 k2 = reference_rate(y + 0.5 * h * k1, t + 0.5 * h, mode, cfg);
    const Vec3 k3 = reference_rate(y + 0.5 * h * k2, t + 0.5 * h, mode, cfg);
    const Vec3 k4 = reference_rate(y + h * k3, t_next, mode, cfg);
    const Vec3 y_next = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!y_next.allFinite()) {
      throw NonFiniteState("propagate_reference: non-finite state at t = " + fmt(t_next));
    }
    x = UnitVec3(y_next);
    if (!in_free_space(x, cfg)) {
      throw BoundaryViolation("propagate_reference: reference left the free space at t = " +
                              fmt(t_next));
    }
    if ((k + 1) % decimation == 0 || k + 1 == steps) out.push_back(sample(t_next, x));
  }
  return out;
}

}  // namespace ptbore
