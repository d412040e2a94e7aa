#include "pdav/dynamics.hpp"

#include <cmath>
#include <sstream>

namespace pdav {

namespace {

// Function rather than a namespace constant so callers running during static
// initialization see a valid axis.
inline Vec3 e3() { return Vec3::UnitZ(); }

void require(bool ok, const char* field, const char* what) {
  if (!ok) {
    std::ostringstream os;
    os << field << ": " << what;
    throw ParameterError(os.str());
  }
}

// α = ω x (R^T R_d ω_d) - R^T R_d ω_d'
Vec3 feedforward_term(const BodyState& state, const ReferenceSample& ref) {
  const Mat3 rel = state.attitude.matrix().transpose() * ref.attitude.matrix();
  return state.omega.cross(rel * ref.body_rate) - rel * ref.body_accel;
}

// Closed-loop body acceleration, shared by control_law and closed_loop_field.
Vec3 commanded_accel(const BodyState& state, const ReferenceSample& ref, const GainSet& gains,
                     const TrackingErrors& err) {
  const double weight = gains.attitude_gain + err.psi;
  const Vec3 s = sliding_vector(err.psi, err.e_q, err.e_omega, gains);
  return (-weight * err.e_q_dot - err.psi_dot * err.e_q - gains.convergence_rate * s) / gains.rate_weight -
         feedforward_term(state, ref);
}

// Gravity torque -S(d e3) m g R^T E3.
Vec3 gravity_torque(const BodyState& state, const PlantParams& plant) {
  const Vec3 up_body = state.attitude.matrix().transpose() * e3();
  return -(plant.axle_length * e3()).cross(plant.mass * plant.gravity * up_body);
}

}  // namespace

Mat3 default_inertia() {
  Mat3 j;
  j << 3.612, 0.762, 0.0,
       0.762, 8.709, 0.0,
       0.0, 0.0, 6.076;
  return j * 1e-5;
}

void PlantParams::validate() const {
  require(inertia.allFinite(), "plant.inertia", "must be finite");
  require((inertia - inertia.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * inertia.cwiseAbs().maxCoeff(),
          "plant.inertia", "must be symmetric");
  Eigen::SelfAdjointEigenSolver<Mat3> eig(inertia);
  require(eig.eigenvalues().minCoeff() > 0.0, "plant.inertia", "must be positive definite");
  require(mass >= 0.0, "plant.mass", "must be >= 0");
  require(axle_length >= 0.0, "plant.axle_length", "must be >= 0");
  require(gravity >= 0.0, "plant.gravity", "must be >= 0");
  require(drag_coeff >= 0.0, "plant.drag_coeff", "must be >= 0");
  require(thrust_coeff >= 0.0, "plant.thrust_coeff", "must be >= 0");
}

void GainSet::validate() const {
  require(attitude_gain > 0.0 && std::isfinite(attitude_gain), "gains.attitude_gain", "must be > 0");
  require(rate_weight > 0.0 && std::isfinite(rate_weight), "gains.rate_weight", "must be > 0");
  require(convergence_rate > 0.0 && std::isfinite(convergence_rate), "gains.convergence_rate", "must be > 0");
  require(std::isfinite(spin_rate), "gains.spin_rate", "must be finite");
}

void ReferenceSample::validate() const {
  const Vec3 axis = attitude.matrix().col(2);
  require((axis - pointing.vec()).norm() <= 1e-12, "reference.pointing", "must equal R_d e3");
  require(std::abs(pointing.vec().dot(pointing_rate)) <= 1e-10, "reference.pointing_rate",
          "must be tangent to the pointing direction");
}

ReferenceSample static_reference(const Rotation& attitude, double spin_rate) {
  ReferenceSample ref;
  ref.attitude = attitude;
  ref.pointing = UnitVec::normalized(attitude.matrix().col(2));
  ref.body_rate = spin_rate * e3();
  return ref;
}

double error_psi(const UnitVec& q, const UnitVec& q_d) { return 1.0 - q.vec().dot(q_d.vec()); }

Vec3 error_eq(const Rotation& attitude, const UnitVec& q_d) {
  const Vec3 q = attitude.matrix().col(2);
  return attitude.matrix().transpose() * q_d.vec().cross(q);
}

Vec3 error_eomega(const BodyState& state, const ReferenceSample& ref) {
  return state.omega - state.attitude.matrix().transpose() * (ref.attitude.matrix() * ref.body_rate);
}

ErrorRates error_rates(const BodyState& state, const ReferenceSample& ref) {
  const Mat3& r = state.attitude.matrix();
  const Vec3 q = r.col(2);
  const Vec3 q_dot = r * state.omega.cross(e3());
  const Vec3 e_q = error_eq(state.attitude, ref.pointing);
  const Vec3 e_omega = error_eomega(state, ref);
  ErrorRates out;
  out.psi_dot = (r * e_q).dot(r * e_omega);
  out.e_q_dot = r.transpose() * (ref.pointing_rate.cross(q) + ref.pointing.vec().cross(q_dot)) -
                state.omega.cross(e_q);
  return out;
}

TrackingErrors tracking_errors(const BodyState& state, const ReferenceSample& ref) {
  TrackingErrors err;
  err.psi = error_psi(UnitVec::normalized(state.attitude.matrix().col(2)), ref.pointing);
  err.e_q = error_eq(state.attitude, ref.pointing);
  err.e_omega = error_eomega(state, ref);
  const ErrorRates rates = error_rates(state, ref);
  err.psi_dot = rates.psi_dot;
  err.e_q_dot = rates.e_q_dot;
  return err;
}

Vec3 sliding_vector(double psi, const Vec3& e_q, const Vec3& e_omega, const GainSet& gains) {
  return (gains.attitude_gain + psi) * e_q + gains.rate_weight * e_omega;
}

double lyapunov(double psi, const Vec3& e_q, const Vec3& e_omega, const GainSet& gains) {
  return 0.5 * sliding_vector(psi, e_q, e_omega, gains).squaredNorm();
}

Vec3 propeller_drag(const Vec3& omega, const PlantParams& plant) {
  return -plant.drag_coeff * omega.z() * std::abs(omega.z()) * e3();
}

Vec3 propeller_thrust(const Vec3& omega, const PlantParams& plant) {
  return plant.thrust_coeff * omega.z() * std::abs(omega.z()) * e3();
}

Vec3 control_law(const BodyState& state, const ReferenceSample& ref, const GainSet& gains,
                 const PlantParams& plant) {
  const TrackingErrors err = tracking_errors(state, ref);
  const Vec3& w = state.omega;
  // f = M_p - S(d e3) m g R^T E3 - ω x J ω
  const Vec3 f = propeller_drag(w, plant) + gravity_torque(state, plant) - w.cross(plant.inertia * w);
  return plant.inertia * commanded_accel(state, ref, gains, err) - f;
}

OpenLoopRate open_loop_field(const BodyState& state, const Vec3& torque, const PlantParams& plant) {
  const Vec3& w = state.omega;
  const Vec3 net = torque + propeller_drag(w, plant) + gravity_torque(state, plant) - w.cross(plant.inertia * w);
  OpenLoopRate out;
  out.omega_dot = plant.inertia.ldlt().solve(net);
  out.attitude_dot = state.attitude.matrix() * hat(w);
  return out;
}

ClosedLoopRate closed_loop_field(const BodyState& state, const ReferenceSample& ref, const GainSet& gains) {
  const TrackingErrors err = tracking_errors(state, ref);
  ClosedLoopRate out;
  out.omega_dot = commanded_accel(state, ref, gains, err);
  out.attitude_dot = state.attitude.matrix() * hat(state.omega);
  out.pointing_dot = out.attitude_dot.col(2);
  return out;
}

std::array<PhasePoint, 2> equilibria_of(const ReferenceSample& ref) {
  if (ref.pointing_rate.norm() > 1e-12 || ref.body_accel.norm() > 1e-12) {
    throw ParameterError("equilibria_of: reference is not static (q_d' or ω_d' non-zero)");
  }
  return {PhasePoint{ref.pointing, ref.body_rate}, PhasePoint{-ref.pointing, -ref.body_rate}};
}

}  // namespace pdav
