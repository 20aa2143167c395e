#include "ptbore/scenario.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "ptbore/errors.hpp"

namespace ptbore {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

}  // namespace

std::string_view to_string(ControllerKind kind) {
  switch (kind) {
    case ControllerKind::Ibgc: return "ibgc";
    case ControllerKind::Apf: return "apf";
    case ControllerKind::Pd: return "pd";
    case ControllerKind::None: return "none";
  }
  return "unknown";
}

ControllerKind parse_controller_kind(std::string_view name) {
  if (name == "ibgc") return ControllerKind::Ibgc;
  if (name == "apf") return ControllerKind::Apf;
  if (name == "pd") return ControllerKind::Pd;
  if (name == "none") return ControllerKind::None;
  throw DomainError("unknown controller kind '" + std::string(name) +
                    "' (expected ibgc, apf, pd or none)");
}

std::string_view to_string(GuidanceMode mode) {
  return mode == GuidanceMode::PrescribedTime ? "prescribed-time" : "baseline";
}

GuidanceMode parse_guidance_mode(std::string_view name) {
  if (name == "prescribed-time") return GuidanceMode::PrescribedTime;
  if (name == "baseline") return GuidanceMode::Baseline;
  throw DomainError("unknown guidance mode '" + std::string(name) +
                    "' (expected prescribed-time or baseline)");
}

std::vector<std::string> scenario_violations(const Scenario& sc) {
  std::vector<std::string> out = validate_config(sc.guidance).failures;

  const double tg_star = sc.guidance.schedule().saturation();
  const double tc_star = sc.gains.sched.saturation();
  if (!(tc_star <= tg_star)) {
    out.push_back("controller settling time T_c* = " + fmt(tc_star) +
                  " exceeds guidance settling time T_g* = " + fmt(tg_star));
  }
  const double rho_max = tube_level(sc.guidance.margin());
  if (!(sc.gains.rho > 0.0 && sc.gains.rho <= rho_max * (1.0 + 1e-12))) {
    out.push_back("tube level rho = " + fmt(sc.gains.rho) + " must lie in (0, 1 - cos(margin)] = (0, " +
                  fmt(rho_max) + "]");
  }
  if (!(sc.c1 > 0.0 && sc.gains.c2 > 0.0 && sc.gains.c3 > 0.0)) {
    out.push_back("observer/controller gains c1, c2, c3 must be positive");
  }
  if (!(sc.apf.kp >= 0.0 && sc.apf.kd >= 0.0 && sc.pd.kp >= 0.0 && sc.pd.kd >= 0.0)) {
    out.push_back("comparison controller gains must be non-negative");
  }

  if (auto why = inertia_defect(sc.plant.J0)) out.push_back(std::string("J0: ") + *why);
  if (sc.plant.delta_j_enabled && !inertia_defect(sc.plant.J0)) {
    for (double t = 0.0; t <= std::max(sc.t_end, 0.0); t += 0.5) {
      if (inertia_defect(plant_inertia(t, sc.plant))) {
        out.push_back("J0 + dJ(t) loses positive-definiteness at t = " + fmt(t));
        break;
      }
    }
  }
  if (sc.plant.torque_limit && !(*sc.plant.torque_limit > 0.0)) {
    out.push_back("torque limit must be positive when set");
  }

  if (!(sc.t_end > 0.0 && std::isfinite(sc.t_end))) out.push_back("t_end must be positive");
  if (!(sc.dt > 0.0 && std::isfinite(sc.dt))) out.push_back("dt must be positive");
  if (sc.output_decimation < 1) out.push_back("output_decimation must be >= 1");
  if (!(sc.convergence_threshold > 0.0)) {
    out.push_back("convergence threshold must be positive");
  }

  if (!in_free_space(sc.initial_boresight, sc.guidance)) {
    out.push_back("initial boresight lies inside a margin-augmented zone");
  }
  if (sc.initial_attitude) {
    const Vec3 x0 = sc.initial_attitude->matrix() * sc.gains.b_body.vec();
    if ((x0 - sc.initial_boresight.vec()).norm() > 1e-9) {
      out.push_back("initial attitude does not map the body boresight onto the initial boresight");
    }
  }
  if (sc.initial_omega && !sc.initial_omega->allFinite()) {
    out.push_back("initial body rate must be finite");
  }
  return out;
}

void validate_scenario(const Scenario& sc) {
  auto v = scenario_violations(sc);
  if (!v.empty()) throw ValidationError(std::move(v));
}

Rotation initial_attitude(const Scenario& sc) {
  if (sc.initial_attitude) return *sc.initial_attitude;
  return minimal_rotation(sc.gains.b_body, sc.initial_boresight);
}

Vec3 initial_body_rate(const Scenario& sc, const Rotation& r0) {
  if (sc.initial_omega) return *sc.initial_omega;
  const Vec3 omega_r0 =
      guidance_law(sc.initial_boresight.vec(), 0.0, sc.guidance_mode, sc.guidance);
  return r0.matrix().transpose() * omega_r0;
}

std::vector<UnitVec3> study_initials() {
  return {
      UnitVec3(-0.5113, -0.3103, -0.8014),
      UnitVec3(0.809, 0.587, 0.0308),
      UnitVec3(0.5, -0.6, 0.62),
      UnitVec3(0.6, 0.1, -0.79),
  };
}

Scenario paper_sec4_scenario() {
  const UnitVec3 goal(-0.939, -0.305, 0.1589);
  std::vector<ForbiddenZone> zones = {
      {UnitVec3(0.0, -0.453, -0.8915), 25.0 * kDeg, false},
      {UnitVec3(0.0, -0.951, 0.3092), 25.0 * kDeg, false},
      {UnitVec3(0.275, 0.847, -0.4549), 20.0 * kDeg, false},
      {UnitVec3(-0.769, 0.599, 0.2232), 25.0 * kDeg, false},
      {UnitVec3(0.345, 0.475, 0.8095), 20.0 * kDeg, false},
  };
  const double margin = 6.0 * kDeg;
  const double influence = 15.0 * kDeg;

  Mat3 J0;
  J0 << 20.0, 1.2, 0.9,
        1.2, 17.0, 1.4,
        0.9, 1.4, 15.0;

  Scenario sc{
      .name = "paper_sec4",
      .guidance = GuidanceConfig::with_virtual_zone(goal, 2.0 * kDeg, zones, margin, influence,
                                                    influence, 0.01, 0.1,
                                                    PptaSchedule(150.0, 149.0)),
      .guidance_mode = GuidanceMode::PrescribedTime,
      .gains = ControlGains{0.2, 0.2, tube_level(margin), UnitVec3::e3(),
                            PptaSchedule(15.0, 14.0)},
      .c1 = 0.2,
      .plant = PlantParams{J0, true, false, std::nullopt},
      .initial_boresight = study_initials()[3],
      .initial_attitude = std::nullopt,
      .initial_omega = std::nullopt,
      .t_end = 150.0,
      .dt = 0.01,
      .output_decimation = 10,
      .controller = ControllerKind::Ibgc,
      .apf = {5.0, 2.0},
      .pd = {0.05, 2.0},
      .convergence_threshold = 2.0 * kDeg,
      .seed = 1,
  };
  return sc;
}

Scenario paper_sec5_scenario() {
  Scenario sc = paper_sec4_scenario();
  sc.name = "paper_sec5";
  sc.initial_boresight = study_initials()[1];
  sc.plant.delta_j_enabled = true;
  return sc;
}

}  // namespace ptbore
