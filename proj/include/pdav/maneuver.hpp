#pragma once

#include "pdav/integrator.hpp"
#include "pdav/reference.hpp"

#include <string>
#include <vector>

namespace pdav {

/// One recorded instant of a tracking run.
struct ManeuverSample {
  TraceSample trace;        // distances are measured to the moving reference and its antipode
  double nutation_rate = 0.0;    // θ' of the 313 sequence [rad/s]
  double precession_rate = 0.0;  // φ' [rad/s]; 0 where the sequence is singular
  double psi_percent = 0.0;      // 100 Ψ / 2
  double e_omega3 = 0.0;         // spin error [rad/s]
  Vec3 torque = Vec3::Zero();    // control torque [N m]
};

struct ManeuverResult {
  std::vector<ManeuverSample> samples;
  double sample_rate = 0.0;  // [Hz]
};

/// Closed-loop tracking of a reference trajectory starting on the reference
/// (R = R_d(0), ω = ω_d(0)). Torques are evaluated with control_law on `plant`.
ManeuverResult simulate_maneuver(const TrajectoryConfig& trajectory, const GainSet& gains, const PlantParams& plant,
                                 const IntegratorConfig& cfg);

}  // namespace pdav
