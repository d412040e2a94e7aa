#include "pdav/geometry.hpp"

#include <cmath>
#include <sstream>

namespace pdav {

Mat3 hat(const Vec3& r) {
  Mat3 m;
  m << 0.0, -r.z(), r.y(),
       r.z(), 0.0, -r.x(),
       -r.y(), r.x(), 0.0;
  return m;
}

Vec3 vee(const Mat3& m) {
  const double asym = (m + m.transpose()).cwiseAbs().maxCoeff();
  if (!(asym <= 1e-9)) {
    std::ostringstream os;
    os << "vee: matrix is not skew-symmetric (max |M + M^T| = " << asym << ")";
    throw GeometryError(os.str());
  }
  return Vec3(m(2, 1), m(0, 2), m(1, 0));
}

Rotation Rotation::from_matrix(const Mat3& m) {
  if (!m.allFinite()) throw GeometryError("rotation: non-finite entries");
  const double ortho = (m.transpose() * m - Mat3::Identity()).norm();
  const double det = m.determinant();
  if (ortho > kTolerance || std::abs(det - 1.0) > kTolerance) {
    std::ostringstream os;
    os << "rotation: matrix is not in SO(3) (||R^T R - I||_F = " << ortho << ", det = " << det << ")";
    throw GeometryError(os.str());
  }
  return Rotation(m);
}

double Rotation::orthogonality_error() const {
  return (m_.transpose() * m_ - Mat3::Identity()).norm();
}

UnitVec UnitVec::from_unit(const Vec3& v) {
  if (!v.allFinite() || std::abs(v.norm() - 1.0) > kTolerance) {
    std::ostringstream os;
    os << "unit vector: norm " << v.norm() << " is not 1";
    throw GeometryError(os.str());
  }
  return UnitVec(v);
}

UnitVec UnitVec::normalized(const Vec3& v) {
  const double n = v.norm();
  if (!(n > 0.0) || !std::isfinite(n)) throw GeometryError("unit vector: cannot normalize zero or non-finite vector");
  return UnitVec(v / n);
}

Rotation rodrigues_exp(const Vec3& axis, double angle) {
  const double norm = axis.norm();
  const double theta = norm * angle;
  if (norm == 0.0 || theta == 0.0) return Rotation::identity();
  if (std::abs(theta) < 1e-8) {
    const Mat3 k = hat(axis * angle);
    return Rotation::trusted(Mat3::Identity() + k + 0.5 * k * k);
  }
  const Mat3 k = hat(axis / norm);
  return Rotation::trusted(Mat3::Identity() + std::sin(theta) * k + (1.0 - std::cos(theta)) * (k * k));
}

TangentVec project_tangent(const UnitVec& q, const Vec3& v) {
  const Vec3& n = q.vec();
  return TangentVec{q, v - n * n.dot(v)};
}

Rotation reorthonormalize(const Mat3& m) {
  if (!m.allFinite()) throw GeometryError("reorthonormalize: non-finite entries");
  const double drift = (m.transpose() * m - Mat3::Identity()).norm();
  if (!(drift < 0.1)) {
    std::ostringstream os;
    os << "reorthonormalize: matrix too far from SO(3) (||M^T M - I||_F = " << drift << ")";
    throw GeometryError(os.str());
  }
  if (m.determinant() <= 0.0) throw GeometryError("reorthonormalize: matrix has non-positive determinant");
  Eigen::JacobiSVD<Mat3> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return Rotation::trusted(svd.matrixU() * svd.matrixV().transpose());
}

}  // namespace pdav
