#pragma once

#include "pdav/geometry.hpp"

#include <array>
#include <stdexcept>

namespace pdav {

class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Inertia of the out-runner shell/propeller assembly [kg m^2].
Mat3 default_inertia();

/// Rigid body on a frictionless pivot. Units: kg m^2, kg, m, m/s^2,
/// N m s^2/rad^2, N s^2/rad^2.
struct PlantParams {
  Mat3 inertia = default_inertia();
  double mass = 0.1;
  double axle_length = 0.0;
  double gravity = 9.81;
  double drag_coeff = 0.0;
  double thrust_coeff = 0.0;

  /// Throws ParameterError naming the offending field.
  void validate() const;
};

/// Controller gains Λ (attitude_gain), η (rate_weight), γ (convergence_rate)
/// and the commanded spin ω_d [rad/s].
struct GainSet {
  double attitude_gain = 25e6;
  double rate_weight = 12e3;
  double convergence_rate = 500.0;
  double spin_rate = 1000.0;

  void validate() const;
};

struct BodyState {
  Rotation attitude;
  Vec3 omega = Vec3::Zero();  // body frame [rad/s]

  UnitVec pointing() const { return UnitVec::normalized(attitude.matrix().col(2)); }
};

/// Desired attitude, pointing direction and body rates at one instant.
struct ReferenceSample {
  Rotation attitude;
  UnitVec pointing;
  Vec3 pointing_rate = Vec3::Zero();  // q_d dot [1/s]
  Vec3 body_rate = Vec3::Zero();      // [rad/s]
  Vec3 body_accel = Vec3::Zero();     // [rad/s^2]

  /// Checks q_d = R_d e3 (1e-12) and q_d . q_d_dot = 0 (1e-10).
  void validate() const;
};

/// A static command R_d with spin ω_d e3 about the pointing axis.
ReferenceSample static_reference(const Rotation& attitude, double spin_rate);

/// Attitude/rate errors and their time derivatives at one state.
struct TrackingErrors {
  double psi = 0.0;
  Vec3 e_q = Vec3::Zero();
  Vec3 e_omega = Vec3::Zero();
  double psi_dot = 0.0;
  Vec3 e_q_dot = Vec3::Zero();
};

/// Ψ = 1 - q . q_d, in [0, 2].
double error_psi(const UnitVec& q, const UnitVec& q_d);
/// e_q = R^T (q_d x q) with q = R e3.
Vec3 error_eq(const Rotation& attitude, const UnitVec& q_d);
/// e_ω = ω - R^T R_d ω_d.
Vec3 error_eomega(const BodyState& state, const ReferenceSample& ref);

struct ErrorRates {
  double psi_dot = 0.0;
  Vec3 e_q_dot = Vec3::Zero();
};
/// Ψ dot = (R e_q) . (R e_ω) and e_q dot = R^T(q_d' x q + q_d x q') - ω x e_q.
ErrorRates error_rates(const BodyState& state, const ReferenceSample& ref);

TrackingErrors tracking_errors(const BodyState& state, const ReferenceSample& ref);

/// s = (Λ + Ψ) e_q + η e_ω.
Vec3 sliding_vector(double psi, const Vec3& e_q, const Vec3& e_omega, const GainSet& gains);

/// V = |s|^2 / 2.
double lyapunov(double psi, const Vec3& e_q, const Vec3& e_omega, const GainSet& gains);

/// Propeller drag torque M_p = -c_drag ω3 |ω3| e3 (body frame).
Vec3 propeller_drag(const Vec3& omega, const PlantParams& plant);
/// Propeller thrust c_thrust ω3 |ω3| e3 (body frame). It acts along the
/// axle, so it exerts no torque about the pivot.
Vec3 propeller_thrust(const Vec3& omega, const PlantParams& plant);

/// Control torque [N m], body frame.
Vec3 control_law(const BodyState& state, const ReferenceSample& ref, const GainSet& gains,
                 const PlantParams& plant);

struct OpenLoopRate {
  Vec3 omega_dot = Vec3::Zero();
  Mat3 attitude_dot = Mat3::Zero();
};

/// Rigid-body attitude dynamics under torque u.
OpenLoopRate open_loop_field(const BodyState& state, const Vec3& torque, const PlantParams& plant);

struct ClosedLoopRate {
  Vec3 omega_dot = Vec3::Zero();
  Mat3 attitude_dot = Mat3::Zero();
  Vec3 pointing_dot = Vec3::Zero();
};

/// Closed loop under control_law. Independent of the plant parameters.
ClosedLoopRate closed_loop_field(const BodyState& state, const ReferenceSample& ref, const GainSet& gains);

struct PhasePoint {
  UnitVec q;
  Vec3 omega = Vec3::Zero();
};

/// [desired, antipodal] = [(q_d, ω_d), (-q_d, -ω_d)]. Throws ParameterError
/// when the reference is moving.
std::array<PhasePoint, 2> equilibria_of(const ReferenceSample& ref);

}  // namespace pdav
