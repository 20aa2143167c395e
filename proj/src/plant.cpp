#include "ptbore/plant.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

namespace ptbore {

DisturbanceSample disturbance(double t) {
  DisturbanceSample s;
  s.d = 1e-3 * Vec3(3.0 * std::cos(0.2 * t) + 4.0 * std::sin(0.06 * t) - 1.0,
                    -1.5 * std::sin(0.04 * t) + 3.0 * std::cos(0.1 * t) + 1.5,
                    3.0 * std::sin(0.2 * t) - 8.0 * std::sin(0.08 * t) + 1.5);
  s.d_dot = 1e-3 * Vec3(-0.6 * std::sin(0.2 * t) + 0.24 * std::cos(0.06 * t),
                        -0.06 * std::cos(0.04 * t) - 0.3 * std::sin(0.1 * t),
                        0.6 * std::cos(0.2 * t) - 0.64 * std::cos(0.08 * t));
  return s;
}

double disturbance_rate_bound() {
  return 1e-3 * Vec3(0.6 + 0.24, 0.06 + 0.3, 0.6 + 0.64).norm();
}

Mat3 inertia_uncertainty(double t) {
  return Vec3(-3.0 * std::tanh(0.1 * t) - 1.0, 2.0 * std::sin(0.05 * t) + 3.0,
              std::cos(0.1 * t) + 3.0)
      .asDiagonal();
}

Mat3 plant_inertia(double t, const PlantParams& plant) {
  return plant.delta_j_enabled ? Mat3(plant.J0 + inertia_uncertainty(t)) : plant.J0;
}

std::optional<const char*> inertia_defect(const Mat3& J) {
  if (!J.allFinite()) return "inertia has non-finite entries";
  if ((J - J.transpose()).cwiseAbs().maxCoeff() > 1e-12) return "inertia is not symmetric";
  Eigen::SelfAdjointEigenSolver<Mat3> es(J, Eigen::EigenvaluesOnly);
  if (!(es.eigenvalues().minCoeff() > 0.0)) return "inertia is not positive-definite";
  return std::nullopt;
}

}  // namespace ptbore
