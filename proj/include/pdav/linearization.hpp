#pragma once

#include "pdav/dynamics.hpp"

#include <array>

namespace pdav {

using Mat6 = Eigen::Matrix<double, 6, 6>;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Row6 = Eigen::Matrix<double, 1, 6>;

/// First-order variations of e_q, e_q dot and e_ω under R -> exp(ε hat(ξ)) R, ω -> ω + ε δω.
struct PerturbedErrors {
  Vec3 e_q = Vec3::Zero();
  Vec3 e_q_dot = Vec3::Zero();
  Vec3 e_omega = Vec3::Zero();
};

PerturbedErrors perturbed_errors(const BodyState& state, const ReferenceSample& ref, const TangentVec& xi,
                                 const Vec3& delta_omega);

/**
 * Linearized closed loop x' = A x with x = (ξ, δω):
 *
 *   ξ'  = Ξ_ξ ξ + Ξ_ω δω
 *   δω' = Ω_ξ ξ + Ω_ω δω
 *
 * ξ is the inertial rotation vector of the left perturbation of R.
 */
struct LinearizedSystem {
  Mat3 kinematic_attitude;  // Ξ_ξ
  Mat3 kinematic_rate;      // Ξ_ω
  Mat3 dynamic_attitude;    // Ω_ξ
  Mat3 dynamic_rate;        // Ω_ω
  Mat6 A;
  BodyState base;
  ReferenceSample reference;
};

/// Blocks evaluated pointwise; valid away from equilibria too.
LinearizedSystem assemble_A(const BodyState& state, const ReferenceSample& ref, const GainSet& gains);

/// C = [q^T, 0]; C x = 0 keeps ξ tangent to the sphere.
struct ConstraintRow {
  Row6 C;
  UnitVec q() const { return UnitVec::normalized(C.head<3>().transpose()); }
};

ConstraintRow constraint_row(const UnitVec& q);

/// Five orthonormal columns spanning N(C). The two tangent columns come from
/// the coordinate axes least aligned with q (lower index first on ties),
/// so q = ±e3 yields {e1, e2, e4, e5, e6}.
Eigen::Matrix<double, 6, 5> nullspace_basis(const ConstraintRow& row);

/**
 * Central-difference Jacobian of the closed loop in the (ξ, δω) coordinates
 * of assemble_A. Column j perturbs along the j-th basis direction with step
 * eps. Used as an independent check of the analytic blocks.
 */
Mat6 fd_jacobian(const BodyState& state, const ReferenceSample& ref, const GainSet& gains, double eps = 1e-6);

}  // namespace pdav
