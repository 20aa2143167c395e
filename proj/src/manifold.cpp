#include "ptbore/manifold.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/SVD>

#include "ptbore/errors.hpp"

namespace ptbore {

UnitVec3::UnitVec3(const Vec3& v) {
  const double n2 = v.squaredNorm();
  if (!std::isfinite(n2) || n2 < 1e-300) {
    throw DomainError("UnitVec3: cannot normalize a zero or non-finite vector");
  }
  // Already-normalized input is kept exactly; this makes re-normalization a no-op.
  if (std::abs(n2 - 1.0) <= 4.0 * std::numeric_limits<double>::epsilon()) {
    v_ = v;
  } else {
    v_ = v / std::sqrt(n2);
  }
}

Rotation Rotation::from_matrix(const Mat3& m) {
  if (!m.allFinite() || orthogonality_error(m) > 1e-9 ||
      std::abs(m.determinant() - 1.0) > 1e-9) {
    throw DegenerateMatrix("Rotation::from_matrix: matrix is not in SO(3)");
  }
  return Rotation(m);
}

Mat3 cross_matrix(const Vec3& v) {
  Mat3 s;
  s << 0.0, -v.z(), v.y(),
       v.z(), 0.0, -v.x(),
       -v.y(), v.x(), 0.0;
  return s;
}

double geodesic_distance(const UnitVec3& x, const UnitVec3& y) {
  return std::acos(std::clamp(x.dot(y), -1.0, 1.0));
}

Rotation exp_so3(const Vec3& phi) {
  const double theta = phi.norm();
  const Mat3 k = cross_matrix(phi);
  if (theta < 1e-8) {
    return Rotation(Mat3::Identity() + k + 0.5 * k * k);
  }
  const double a = std::sin(theta) / theta;
  const double b = (1.0 - std::cos(theta)) / (theta * theta);
  return Rotation(Mat3::Identity() + a * k + b * k * k);
}

Rotation minimal_rotation(const UnitVec3& a, const UnitVec3& b) {
  const double c = a.dot(b);
  if (c <= -1.0 + 1e-9) {
    throw AntipodalInput("minimal_rotation: inputs are antipodal, axis undefined");
  }
  // R = I + [v]x + [v]x^2 / (1 + c), v = a x b; exact for any non-antipodal pair.
  const Vec3 v = a.vec().cross(b.vec());
  const Mat3 k = cross_matrix(v);
  return Rotation(Mat3::Identity() + k + (k * k) / (1.0 + c));
}

Rotation reorthonormalize(const Mat3& m) {
  if (!m.allFinite()) throw DegenerateMatrix("reorthonormalize: non-finite entries");
  Eigen::JacobiSVD<Mat3> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::Vector3d s = svd.singularValues();
  if (s.minCoeff() <= 1e-12 * std::max(1.0, s.maxCoeff()) || m.determinant() <= 0.0) {
    throw DegenerateMatrix("reorthonormalize: matrix is singular or improper");
  }
  const Mat3 r = svd.matrixU() * svd.matrixV().transpose();
  if (r.determinant() <= 0.0) {
    throw DegenerateMatrix("reorthonormalize: projection is not a proper rotation");
  }
  return Rotation(r);
}

double orthogonality_error(const Mat3& m) {
  return (m.transpose() * m - Mat3::Identity()).norm();
}

}  // namespace ptbore
