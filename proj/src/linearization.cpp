#include "pdav/linearization.hpp"

#include <algorithm>
#include <numeric>

namespace pdav {

namespace {

// Function rather than a namespace constant so callers running during static
// initialization see a valid axis.
inline Vec3 e3() { return Vec3::UnitZ(); }

struct Point {
  Mat3 r;
  Vec3 w;
  Vec3 q;
  Vec3 q_dot;
  TrackingErrors err;
};

Point evaluate(const BodyState& state, const ReferenceSample& ref) {
  Point p;
  p.r = state.attitude.matrix();
  p.w = state.omega;
  p.q = p.r.col(2);
  p.q_dot = p.r * p.w.cross(e3());
  p.err = tracking_errors(state, ref);
  return p;
}

}  // namespace

PerturbedErrors perturbed_errors(const BodyState& state, const ReferenceSample& ref, const TangentVec& xi,
                                 const Vec3& delta_omega) {
  const Point p = evaluate(state, ref);
  const Vec3& qd = ref.pointing.vec();
  const Vec3& qd_dot = ref.pointing_rate;
  const Vec3& x = xi.vector;
  const Mat3 rt = p.r.transpose();

  PerturbedErrors out;
  out.e_q = rt * (hat(qd.cross(p.q)) - hat(qd) * hat(p.q)) * x;
  out.e_q_dot = rt * hat(qd_dot.cross(p.q) + qd.cross(p.q_dot)) * x - rt * hat(qd_dot) * hat(p.q) * x -
                rt * hat(qd) * hat(p.q_dot) * x - hat(rt * qd) * hat(e3()) * delta_omega +
                hat(p.err.e_q) * delta_omega - hat(p.w) * out.e_q;
  out.e_omega = delta_omega - rt * hat(ref.attitude.matrix() * ref.body_rate) * x;
  return out;
}

LinearizedSystem assemble_A(const BodyState& state, const ReferenceSample& ref, const GainSet& gains) {
  const Point p = evaluate(state, ref);
  const Mat3& r = p.r;
  const Mat3 rt = r.transpose();
  const Vec3& w = p.w;
  const Vec3& q = p.q;
  const Vec3& qd = ref.pointing.vec();
  const Vec3& qd_dot = ref.pointing_rate;
  const Vec3& eq = p.err.e_q;
  const Vec3& ew = p.err.e_omega;
  const Vec3& eq_dot = p.err.e_q_dot;
  const double lam = gains.attitude_gain + p.err.psi;
  const double eta = gains.rate_weight;
  const double gam = gains.convergence_rate;
  const Mat3 id = Mat3::Identity();

  const Vec3 wd_inertial = ref.attitude.matrix() * ref.body_rate;
  const Vec3 wd_dot_inertial = ref.attitude.matrix() * ref.body_accel;
  const Vec3 r_eq = r * eq;
  const Vec3 r_ew = r * ew;
  // e_q variation operator: e_q^ε = E ξ
  const Mat3 e_op = rt * (hat(qd.cross(q)) - hat(qd) * hat(q));
  // Ψ^ε = -q_d^T S(ξ) q = (q_d x q)^T ξ
  const Mat3 psi_gain = eq * r_eq.transpose();

  LinearizedSystem sys;
  sys.base = state;
  sys.reference = ref;
  sys.kinematic_attitude = q * q.transpose() * hat(r * w);
  sys.kinematic_rate = (id - q * q.transpose()) * r;

  const Mat3 eq_dot_op = rt * hat(qd_dot.cross(q) + qd.cross(p.q_dot)) - rt * hat(qd) * hat(r * hat(w) * e3()) -
                         rt * hat(qd_dot) * hat(q) - hat(w) * e_op;
  sys.dynamic_attitude =
      rt * hat(wd_dot_inertial) - hat(w) * rt * hat(wd_inertial) -
      (1.0 / eta) * (eq * r_ew.transpose() * hat(r_eq) + eq * r_eq.transpose() * hat(r_ew) +
                     eq_dot * qd.transpose() * hat(q) + lam * eq_dot_op +
                     (eq * r_ew.transpose() * r + (p.err.psi_dot + gam * lam) * id) * e_op +
                     gam * eq * qd.transpose() * hat(q) - (psi_gain * r + eta * gam * id) * rt * hat(wd_inertial));
  sys.dynamic_rate = hat(rt * wd_inertial) -
                     (1.0 / eta) * ((psi_gain * r + eta * gam * id) + lam * (hat(eq) - hat(rt * qd) * hat(e3())));

  sys.A.topLeftCorner<3, 3>() = sys.kinematic_attitude;
  sys.A.topRightCorner<3, 3>() = sys.kinematic_rate;
  sys.A.bottomLeftCorner<3, 3>() = sys.dynamic_attitude;
  sys.A.bottomRightCorner<3, 3>() = sys.dynamic_rate;
  return sys;
}

ConstraintRow constraint_row(const UnitVec& q) {
  ConstraintRow row;
  row.C.setZero();
  row.C.head<3>() = q.vec().transpose();
  return row;
}

Eigen::Matrix<double, 6, 5> nullspace_basis(const ConstraintRow& row) {
  const Vec3 q = row.C.head<3>().transpose().normalized();
  std::array<int, 3> order{0, 1, 2};
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return std::abs(q[a]) < std::abs(q[b]); });

  Eigen::Matrix<double, 6, 5> basis = Eigen::Matrix<double, 6, 5>::Zero();
  Vec3 t1 = Vec3::Unit(order[0]);
  t1 = (t1 - q * q.dot(t1)).normalized();
  Vec3 t2 = Vec3::Unit(order[1]);
  t2 = (t2 - q * q.dot(t2) - t1 * t1.dot(t2)).normalized();
  basis.block<3, 1>(0, 0) = t1;
  basis.block<3, 1>(0, 1) = t2;
  basis(3, 2) = 1.0;
  basis(4, 3) = 1.0;
  basis(5, 4) = 1.0;
  return basis;
}

Mat6 fd_jacobian(const BodyState& state, const ReferenceSample& ref, const GainSet& gains, double eps) {
  if (!(eps >= 1e-8 && eps <= 1e-4)) throw ParameterError("fd_jacobian: eps must lie in [1e-8, 1e-4]");
  const Vec3 q = state.attitude.matrix().col(2);
  const Vec3 q_dot = state.attitude.matrix() * state.omega.cross(e3());

  auto shifted = [&](const Vec3& xi, const Vec3& dw, double s) {
    BodyState x;
    x.attitude = Rotation::trusted(exp_map(s * eps * xi).matrix() * state.attitude.matrix());
    x.omega = state.omega + s * eps * dw;
    return x;
  };

  Mat6 jac;
  for (int j = 0; j < 6; ++j) {
    const Vec3 xi = j < 3 ? Vec3(Vec3::Unit(j)) : Vec3(Vec3::Zero());
    const Vec3 dw = j < 3 ? Vec3(Vec3::Zero()) : Vec3(Vec3::Unit(j - 3));
    const BodyState plus = shifted(xi, dw, 1.0);
    const BodyState minus = shifted(xi, dw, -1.0);
    const ClosedLoopRate fp = closed_loop_field(plus, ref, gains);
    const ClosedLoopRate fm = closed_loop_field(minus, ref, gains);
    // δq' = S(ξ') q + S(ξ) q', solved for the tangent part of ξ' plus the
    // q-parallel rate -(ξ . q') q that keeps q^T ξ constant.
    const Vec3 dq_dot = (fp.pointing_dot - fm.pointing_dot) / (2.0 * eps);
    const Vec3 xi_dot = hat(q) * (dq_dot - xi.cross(q_dot)) - xi.dot(q_dot) * q;
    jac.block<3, 1>(0, j) = xi_dot;
    jac.block<3, 1>(3, j) = (fp.omega_dot - fm.omega_dot) / (2.0 * eps);
  }
  return jac;
}

}  // namespace pdav
