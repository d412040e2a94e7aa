#pragma once

#include "pdav/dynamics.hpp"

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace pdav {

class IntegrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Right-trivialized tangent of SO(3) x R^3: R' = R hat(attitude_rate).
struct StateRate {
  Vec3 attitude_rate = Vec3::Zero();
  Vec3 omega_dot = Vec3::Zero();
};

using VectorField = std::function<StateRate(double t, const BodyState&)>;
using ReferenceFn = std::function<ReferenceSample(double t)>;

enum class Direction { forward, backward };

struct IntegratorConfig {
  double step = 1e-5;               // [s]
  int reorthonormalize_every = 100;  // steps; 0 disables
  int record_decimation = 1;

  void validate() const;
};

struct TraceSample {
  double t = 0.0;
  BodyState state;
  UnitVec q;
  double spin = 0.0;  // ω . e3
  // Filled by an annotator; NaN when not computed.
  double psi = std::numeric_limits<double>::quiet_NaN();
  double lyapunov = std::numeric_limits<double>::quiet_NaN();
  double dist_desired = std::numeric_limits<double>::quiet_NaN();
  double dist_antipodal = std::numeric_limits<double>::quiet_NaN();
};

struct FlowTrace {
  Direction direction = Direction::forward;
  std::vector<TraceSample> samples;
  bool truncated = false;
  std::string truncation_reason;
};

using SampleAnnotator = std::function<void(TraceSample&)>;

enum class BlowupPolicy { throw_error, truncate };

/**
 * One 4th-order Runge-Kutta-Munthe-Kaas step of size h.
 *
 * ω is advanced with the classical RK4 weights; the attitude is advanced by
 * R exp(hat(Θ)) where Θ combines the stage velocities mapped through the
 * inverse right Jacobian of SO(3). The backward direction integrates the
 * negated field with time running backwards from t.
 *
 * Throws IntegrationError if the result is not finite.
 */
BodyState step(const BodyState& state, double t, const VectorField& field, double h, Direction direction);

/**
 * Flow for `duration` seconds from time t0 on a uniform grid of
 * ceil(duration / cfg.step) steps. Samples every cfg.record_decimation steps
 * plus the final state; the attitude is re-projected onto SO(3) every
 * cfg.reorthonormalize_every steps.
 */
FlowTrace flow(const BodyState& initial, double t0, const VectorField& field, double duration, Direction direction,
               const IntegratorConfig& cfg, const SampleAnnotator& annotate = {},
               BlowupPolicy policy = BlowupPolicy::throw_error);

VectorField closed_loop_vector_field(ReferenceFn reference, const GainSet& gains);

/// The plant driven by control_law. Same trajectories as the closed loop up to rounding.
VectorField open_loop_vector_field(ReferenceFn reference, const GainSet& gains, const PlantParams& plant);

/// Inverse right Jacobian of SO(3).
Mat3 inverse_right_jacobian(const Vec3& theta);

}  // namespace pdav
