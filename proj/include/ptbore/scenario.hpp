#pragma once

// Scenario: everything needed to reproduce one closed-loop run.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "ptbore/controller.hpp"
#include "ptbore/guidance.hpp"
#include "ptbore/plant.hpp"

namespace ptbore {

enum class ControllerKind {
  Ibgc,  // prescribed-time guidance + barrier tracking controller + observer
  Apf,   // potential-gradient PD regulator
  Pd,    // plain reduced-attitude PD regulator
  None,  // zero torque (open-loop plant checks)
};

std::string_view to_string(ControllerKind kind);
/// Throws DomainError for unknown names.
ControllerKind parse_controller_kind(std::string_view name);

std::string_view to_string(GuidanceMode mode);
GuidanceMode parse_guidance_mode(std::string_view name);

struct PdGains {
  double kp = 0.0;
  double kd = 0.0;
  bool operator==(const PdGains&) const = default;
};

struct Scenario {
  std::string name;
  GuidanceConfig guidance;
  GuidanceMode guidance_mode = GuidanceMode::PrescribedTime;
  ControlGains gains;
  double c1 = 0.0;
  PlantParams plant;

  UnitVec3 initial_boresight;
  std::optional<Rotation> initial_attitude;
  std::optional<Vec3> initial_omega;

  double t_end = 0.0;
  double dt = 0.01;
  int output_decimation = 1;
  ControllerKind controller = ControllerKind::Ibgc;
  PdGains apf{5.0, 2.0};
  PdGains pd{0.05, 2.0};
  double convergence_threshold = 0.0;  // rad, geodesic angle to the goal
  std::uint64_t seed = 0;

  bool operator==(const Scenario&) const = default;
};

/// Lists every violated clause: guidance geometry, T_c* <= T_g*, tube inside
/// the margin, gains, inertia, integration settings, initial state.
std::vector<std::string> scenario_violations(const Scenario& sc);

/// Throws ValidationError when scenario_violations is non-empty.
void validate_scenario(const Scenario& sc);

/// Initial attitude: explicit, or the minimal rotation taking b onto x(0).
Rotation initial_attitude(const Scenario& sc);

/// Initial body rate: explicit, or R(0)^T Omega_r(0) so the reference and the
/// body start with the same inertial angular velocity.
Vec3 initial_body_rate(const Scenario& sc, const Rotation& r0);

/// The four labelled initial boresights of the guidance study. Entry 1
/// (0-based) is the published one; the others are free-space picks.
std::vector<UnitVec3> study_initials();

/// Numerical study: published zones, goal, inertia, disturbance and gains,
/// starting from the fourth study initial with the tracking controller.
Scenario paper_sec4_scenario();

/// Comparison study: same configuration from the second study initial with the
/// inertia uncertainty enabled.
Scenario paper_sec5_scenario();

}  // namespace ptbore
