#pragma once

// Geometric primitives on the unit sphere S^2 and the rotation group SO(3).

#include <Eigen/Dense>

namespace ptbore {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Direction on S^2. Construction normalizes; a vector that is already unit
/// to within a few ulps is kept bit-for-bit, so normalization is idempotent.
class UnitVec3 {
public:
  UnitVec3() : v_(0.0, 0.0, 1.0) {}
  explicit UnitVec3(const Vec3& v);
  UnitVec3(double x, double y, double z) : UnitVec3(Vec3(x, y, z)) {}

  /// Wraps v without normalizing. Only for Runge-Kutta stage values, which sit
  /// O(h^2) off the sphere and must be evaluated as-is.
  static UnitVec3 unchecked(const Vec3& v) {
    UnitVec3 r;
    r.v_ = v;
    return r;
  }

  static UnitVec3 e1() { return UnitVec3(1.0, 0.0, 0.0); }
  static UnitVec3 e2() { return UnitVec3(0.0, 1.0, 0.0); }
  static UnitVec3 e3() { return UnitVec3(0.0, 0.0, 1.0); }

  const Vec3& vec() const { return v_; }
  double operator[](int i) const { return v_[i]; }
  double dot(const UnitVec3& o) const { return v_.dot(o.v_); }
  double dot(const Vec3& o) const { return v_.dot(o); }

  UnitVec3 operator-() const {
    UnitVec3 r;
    r.v_ = -v_;
    return r;
  }
  bool operator==(const UnitVec3& o) const { return v_ == o.v_; }

private:
  Vec3 v_;
};

/// Attitude matrix of the body frame with respect to the inertial frame.
class Rotation {
public:
  Rotation() : m_(Mat3::Identity()) {}

  static Rotation identity() { return Rotation(); }
  /// Accepts m only if it is in SO(3) to 1e-9; throws DegenerateMatrix otherwise.
  static Rotation from_matrix(const Mat3& m);

  /// Wraps m without any SO(3) check; for Runge-Kutta stage values.
  static Rotation unchecked(const Mat3& m) { return Rotation(m); }

  const Mat3& matrix() const { return m_; }
  Rotation transpose() const { return Rotation(m_.transpose()); }

  Vec3 operator*(const Vec3& v) const { return m_ * v; }
  UnitVec3 operator*(const UnitVec3& v) const { return UnitVec3(Vec3(m_ * v.vec())); }
  Rotation operator*(const Rotation& o) const { return Rotation(m_ * o.m_); }
  bool operator==(const Rotation& o) const { return m_ == o.m_; }

private:
  explicit Rotation(const Mat3& m) : m_(m) {}

  friend Rotation exp_so3(const Vec3& phi);
  friend Rotation minimal_rotation(const UnitVec3& a, const UnitVec3& b);
  friend Rotation reorthonormalize(const Mat3& m);

  Mat3 m_;
};

/// Skew matrix [v]x with [v]x y = v x y.
Mat3 cross_matrix(const Vec3& v);

/// arccos of the clamped dot product, in [0, pi].
double geodesic_distance(const UnitVec3& x, const UnitVec3& y);

/// Rodrigues exponential of a rotation vector; second-order series below 1e-8 rad.
Rotation exp_so3(const Vec3& phi);

/// Rotation about a x b by the angle between them, mapping a onto b.
/// Throws AntipodalInput when a.b <= -1 + 1e-9.
Rotation minimal_rotation(const UnitVec3& a, const UnitVec3& b);

/// Nearest rotation (polar factor). Throws DegenerateMatrix when the input is
/// singular or the projection is improper.
Rotation reorthonormalize(const Mat3& m);

/// Frobenius norm of R^T R - I.
double orthogonality_error(const Mat3& m);

}  // namespace ptbore
