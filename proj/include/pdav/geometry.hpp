#pragma once

#include <Eigen/Dense>

#include <stdexcept>

namespace pdav {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

class GeometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Skew-symmetric matrix of r, so that hat(r) * v == r.cross(v).
Mat3 hat(const Vec3& r);

/// Inverse of hat. Throws GeometryError when m is not skew-symmetric
/// within 1e-9 (max abs of m + m^T).
Vec3 vee(const Mat3& m);

/**
 * @brief Element of SO(3).
 *
 * Construction through from_matrix() validates R^T R = I and det R = +1
 * (both within 1e-9). Producers that build rotations from exact formulas
 * (exponential map, polar factor, products of rotations) use the
 * trusted constructor.
 */
class Rotation {
 public:
  static constexpr double kTolerance = 1e-9;

  Rotation() : m_(Mat3::Identity()) {}

  static Rotation from_matrix(const Mat3& m);
  static Rotation trusted(const Mat3& m) { return Rotation(m); }
  static Rotation identity() { return Rotation(); }

  const Mat3& matrix() const { return m_; }
  Rotation transpose() const { return Rotation(m_.transpose()); }
  Vec3 axis(int i) const { return m_.col(i); }

  /// ||R^T R - I||_F
  double orthogonality_error() const;

  Rotation operator*(const Rotation& other) const { return Rotation(m_ * other.m_); }
  Vec3 operator*(const Vec3& v) const { return m_ * v; }

 private:
  explicit Rotation(const Mat3& m) : m_(m) {}
  Mat3 m_;
};

/// Point on the two-sphere, ||q|| = 1 within 1e-12.
class UnitVec {
 public:
  static constexpr double kTolerance = 1e-12;

  UnitVec() : v_(Vec3::UnitZ()) {}

  /// Validates the norm; throws GeometryError otherwise.
  static UnitVec from_unit(const Vec3& v);
  /// Rescales any non-zero vector onto the sphere.
  static UnitVec normalized(const Vec3& v);

  const Vec3& vec() const { return v_; }
  double operator[](int i) const { return v_[i]; }
  UnitVec operator-() const { return UnitVec(-v_); }

 private:
  explicit UnitVec(const Vec3& v) : v_(v) {}
  Vec3 v_;
};

/// Vector in the tangent plane T_q S^2 (q . v = 0 within 1e-10).
struct TangentVec {
  UnitVec base;
  Vec3 vector = Vec3::Zero();
};

/**
 * Rotation by `angle` about `axis`, I + sin(a) K + (1 - cos(a)) K^2 with
 * K = hat(axis / |axis|).
 *
 * A non-unit axis is normalized and the angle scaled by its norm, so
 * rodrigues_exp(v, t) is exp(t hat(v)) for any v. Below |v| t < 1e-8 the
 * second-order Taylor expansion is used; the zero vector maps to I.
 */
Rotation rodrigues_exp(const Vec3& axis, double angle);

/// exp(hat(rotation_vector)).
inline Rotation exp_map(const Vec3& rotation_vector) { return rodrigues_exp(rotation_vector, 1.0); }

/// (I - q q^T) v.
TangentVec project_tangent(const UnitVec& q, const Vec3& v);

/**
 * Closest rotation (polar factor) to a near-orthogonal matrix.
 * Throws GeometryError when ||M^T M - I||_F >= 0.1 or det M <= 0.
 */
Rotation reorthonormalize(const Mat3& m);

}  // namespace pdav
