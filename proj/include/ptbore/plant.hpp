#pragma once

// Rigid-body plant parameters, the external disturbance torque and the
// time-varying inertia uncertainty.

#include <optional>

#include "ptbore/manifold.hpp"

namespace ptbore {

struct PlantParams {
  Mat3 J0 = Mat3::Identity();  // nominal inertia, kg m^2
  bool disturbance_enabled = true;
  bool delta_j_enabled = false;
  std::optional<double> torque_limit;  // per-axis clamp, N m

  bool operator==(const PlantParams&) const = default;
};

struct DisturbanceSample {
  Vec3 d;
  Vec3 d_dot;
};

/// Three-axis sinusoidal disturbance torque and its analytic rate.
DisturbanceSample disturbance(double t);

/// Upper bound on ||d_dot|| for the model above (sum of rate amplitudes per axis).
double disturbance_rate_bound();

/// diag[-3 tanh(0.1 t) - 1, 2 sin(0.05 t) + 3, cos(0.1 t) + 3] kg m^2.
Mat3 inertia_uncertainty(double t);

/// Inertia seen by the true plant: J0, plus the uncertainty when enabled.
Mat3 plant_inertia(double t, const PlantParams& plant);

/// Empty when J is symmetric positive-definite; otherwise a short reason.
std::optional<const char*> inertia_defect(const Mat3& J);

}  // namespace ptbore
