#pragma once

// Independent reference formulas and helpers shared by the test binaries.
// Nothing here calls into the code under test except for value types.

#include <cmath>
#include <algorithm>
#include <functional>
#include <numbers>
#include <random>

#include "ptbore/manifold.hpp"

namespace oracle {

using ptbore::Mat3;
using ptbore::UnitVec3;
using ptbore::Vec3;

constexpr double kPi = std::numbers::pi;
constexpr double kDeg = kPi / 180.0;

inline Vec3 random_vec(std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> n(0.0, scale);
  return Vec3(n(rng), n(rng), n(rng));
}

inline UnitVec3 random_unit(std::mt19937_64& rng) {
  Vec3 v;
  do v = random_vec(rng); while (v.norm() < 1e-6);
  return UnitVec3(v);
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline Mat3 skew(const Vec3& v) {
  Mat3 s;
  s << 0, -v.z(), v.y(), v.z(), 0, -v.x(), -v.y(), v.x(), 0;
  return s;
}

/// Rodrigues via the Cayley-Hamilton form, written independently.
inline Mat3 rodrigues(const Vec3& axis_angle) {
  const double th = axis_angle.norm();
  if (th == 0.0) return Mat3::Identity();
  const Vec3 k = axis_angle / th;
  return std::cos(th) * Mat3::Identity() + std::sin(th) * skew(k) +
         (1.0 - std::cos(th)) * k * k.transpose();
}

inline Mat3 random_rotation(std::mt19937_64& rng) {
  return rodrigues(random_vec(rng) * 1.5);
}

// Saturated PTA gain, three branches.
inline double mu(double t, double T, double Ts) {
  const double mus = T / (T - Ts);
  if (t <= Ts) return T / (T - t);
  if (t < T) return mus * (1.0 + 2.0 / kPi * std::sin(kPi / 2.0 * (t - Ts) / (T - Ts)));
  return (1.0 + 2.0 / kPi) * mus;
}

// Repulsive function and its derivative in z = x.f.
inline double phi(double z, double e, double es) {
  if (z <= es) return 0.0;
  return (z - es) * (z - es) * std::log((e - es) / (e - z));
}

inline double phi_prime(double z, double e, double es) {
  if (z <= es) return 0.0;
  return 2.0 * (z - es) * std::log((e - es) / (e - z)) + (z - es) * (z - es) / (e - z);
}

/// Classical RK4 for y' = f(t, y), scalar. The step is shrunk to at most
/// h_max so that the last step lands exactly on t1.
inline double rk4_scalar(const std::function<double(double, double)>& f, double y, double t0,
                         double t1, double h_max,
                         const std::function<void(double, double)>& observe = {}) {
  double t = t0;
  const long n = std::max(1L, static_cast<long>(std::ceil((t1 - t0) / h_max - 1e-9)));
  const double h = (t1 - t0) / static_cast<double>(n);
  for (long k = 0; k < n; ++k) {
    const double k1 = f(t, y);
    const double k2 = f(t + h / 2, y + h / 2 * k1);
    const double k3 = f(t + h / 2, y + h / 2 * k2);
    const double k4 = f(t + h, y + h * k3);
    y += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
    t = t0 + static_cast<double>(k + 1) * h;
    if (observe) observe(t, y);
  }
  return y;
}

inline double rel_err(const Vec3& a, const Vec3& b) {
  return (a - b).norm() / std::max(b.norm(), 1e-300);
}

}  // namespace oracle
