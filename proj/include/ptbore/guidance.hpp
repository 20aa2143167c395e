#pragma once

// Keep-out cones, the artificial potential on S^2, the baseline and
// prescribed-time guidance laws, and reference-trajectory propagation.

#include <string>
#include <vector>

#include "ptbore/manifold.hpp"
#include "ptbore/ppta.hpp"

namespace ptbore {

struct ForbiddenZone {
  UnitVec3 axis;
  double half_angle = 0.0;  // rad, in (0, pi/2)
  bool is_virtual = false;  // true only for the cone around -x*

  bool operator==(const ForbiddenZone&) const = default;
};

/// Zones (index 0 is the virtual cone around -goal), goal direction, margins,
/// potential gains and the guidance gain schedule. Immutable once built.
class GuidanceConfig {
public:
  GuidanceConfig(std::vector<ForbiddenZone> zones, UnitVec3 goal, double margin,
                 double influence, double iota, double k_a, double k_r,
                 PptaSchedule schedule);

  /// Prepends the virtual zone around -goal with half-angle theta0.
  static GuidanceConfig with_virtual_zone(UnitVec3 goal, double theta0,
                                          std::vector<ForbiddenZone> real_zones,
                                          double margin, double influence, double iota,
                                          double k_a, double k_r, PptaSchedule schedule);

  const std::vector<ForbiddenZone>& zones() const { return zones_; }
  std::size_t zone_count() const { return zones_.size(); }
  const ForbiddenZone& zone(std::size_t i) const { return zones_.at(i); }
  const UnitVec3& goal() const { return goal_; }
  double margin() const { return margin_; }
  double influence() const { return influence_; }
  double iota() const { return iota_; }
  double k_a() const { return k_a_; }
  double k_r() const { return k_r_; }
  const PptaSchedule& schedule() const { return schedule_; }

  /// cos(theta_i + margin): boundary of the augmented zone in z = x.f_i.
  double eps(std::size_t i) const { return eps_[i]; }
  /// cos(theta_i + influence): outer edge of the repulsion annulus.
  double eps_star(std::size_t i) const { return eps_star_[i]; }

  bool operator==(const GuidanceConfig&) const = default;

private:
  std::vector<ForbiddenZone> zones_;
  UnitVec3 goal_;
  double margin_;
  double influence_;
  double iota_;
  double k_a_;
  double k_r_;
  PptaSchedule schedule_;
  std::vector<double> eps_;
  std::vector<double> eps_star_;
};

struct ValidationReport {
  std::vector<std::string> failures;
  bool ok() const { return failures.empty(); }
};

/// Zone separation, margin ordering, goal outside every influence region and
/// the virtual zone placement. Each violated clause is listed.
ValidationReport validate_config(const GuidanceConfig& cfg);

// Repulsive shaping function of z = x.f_i and its first two derivatives.
// All throw BoundaryViolation when z >= eps_i.
double phi(double z, double eps_i, double eps_star_i);
double phi_grad(double z, double eps_i, double eps_star_i);
double phi_hess(double z, double eps_i, double eps_star_i);

double potential_U(const UnitVec3& x, const GuidanceConfig& cfg);
/// Euclidean gradient of U extended to R^3.
Vec3 grad_U(const Vec3& x, const GuidanceConfig& cfg);
Mat3 hess_U(const Vec3& x, const GuidanceConfig& cfg);

/// True when x lies outside every margin-augmented zone.
bool in_free_space(const UnitVec3& x, const GuidanceConfig& cfg);

enum class GuidanceMode { Baseline, PrescribedTime };

/// h(x) = [x]x^T grad U(x).
Vec3 baseline_law(const Vec3& x, const GuidanceConfig& cfg);
/// mu_g(t) h(x).
Vec3 pt_guidance_law(const Vec3& x, double t, const GuidanceConfig& cfg);
/// d/dt [mu_g(t) h(x(t))] along the guidance flow.
Vec3 guidance_law_dot(const Vec3& x, double t, const GuidanceConfig& cfg);

/// Gain multiplying h: mu_g(t) or 1 for the baseline law.
double guidance_gain(double t, GuidanceMode mode, const GuidanceConfig& cfg);
double guidance_gain_dot(double t, GuidanceMode mode, const GuidanceConfig& cfg);
Vec3 guidance_law(const Vec3& x, double t, GuidanceMode mode, const GuidanceConfig& cfg);
Vec3 guidance_law_dot(const Vec3& x, double t, GuidanceMode mode, const GuidanceConfig& cfg);

/// Right-hand side of the reference kinematics, x_dot = Omega_r x x.
Vec3 reference_rate(const Vec3& x, double t, GuidanceMode mode, const GuidanceConfig& cfg);

/// Residual of the critical-point balance along the great circle through the
/// goal and zone i, as a function of the angular offset from the zone axis.
/// Positive at the outer edge of the annulus, tends to -inf at the margin.
class CriticalPointProblem {
public:
  /// Throws DomainError for the virtual zone, NoSolution if goal and axis are collinear.
  CriticalPointProblem(std::size_t zone_index, const GuidanceConfig& cfg);
  // Keeps a pointer to cfg.
  CriticalPointProblem(std::size_t zone_index, const GuidanceConfig&& cfg) = delete;

  double lower() const { return lo_; }  // theta_i + margin
  double upper() const { return hi_; }  // theta_i + influence
  UnitVec3 point(double offset) const;
  double residual(double offset) const;

private:
  const GuidanceConfig* cfg_;
  std::size_t zone_;
  Vec3 axis_;
  Vec3 away_;  // tangent at the axis pointing away from the goal
  double goal_offset_;
  double lo_;
  double hi_;
};

/// Unique undesired equilibrium behind zone i (i >= 1), found by bisection.
UnitVec3 find_critical_point(std::size_t zone_index, const GuidanceConfig& cfg);

/// || k_a [c]x x* - k_r grad phi_i(c.f_i) [c]x f_i ||.
double critical_point_residual(const UnitVec3& c, std::size_t zone_index,
                               const GuidanceConfig& cfg);

struct ReferenceSample {
  double t = 0.0;
  UnitVec3 x_r;
  Vec3 omega_r = Vec3::Zero();
  Vec3 omega_r_dot = Vec3::Zero();
};

/// Fixed-step RK4 of the reference kinematics with renormalization after
/// each step. Emits every `decimation`-th step plus the final one.
std::vector<ReferenceSample> propagate_reference(const UnitVec3& x0, const GuidanceConfig& cfg,
                                                 double dt, double t_end,
                                                 GuidanceMode mode = GuidanceMode::PrescribedTime,
                                                 int decimation = 1);

}  // namespace ptbore
