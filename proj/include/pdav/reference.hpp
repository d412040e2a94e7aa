#pragma once

#include "pdav/dynamics.hpp"

#include <vector>

namespace pdav {

/// Rotation of `angle` about an inertial `axis`, spread over [t_start, t_end].
struct ManeuverSegment {
  UnitVec axis;
  double angle = 0.0;    // [rad]
  double t_start = 0.0;  // [s]
  double t_end = 0.0;    // [s]
};

struct TrajectoryConfig {
  std::vector<ManeuverSegment> segments;
  double spin = 1000.0;     // [rad/s]
  double duration = 1.7;    // [s]
  Rotation initial_attitude;

  /// Throws ParameterError when segments overlap or have no positive time span.
  void validate() const;
};

/// 90 deg about E1 over [0.1, 0.6] s, then 90 deg about E3 over [0.7, 1.2] s,
/// at 1000 rad/s spin, 1.7 s in total.
TrajectoryConfig default_maneuver();

struct ProfileSample {
  double s = 0.0;
  double ds = 0.0;
  double dds = 0.0;
  bool clamped = false;
};

/// Rest-to-rest minimum-snap blend s(τ) = 35τ^4 - 84τ^5 + 70τ^6 - 20τ^7 and its
/// first two derivatives with respect to τ. τ outside [0, 1] is clamped and flagged.
ProfileSample min_snap_profile(double tau);

/**
 * Reference command at time t.
 *
 * R_d(t) = exp(a_n hat(n_n)) ... exp(a_1 hat(n_1)) R_d(0) with a_k = angle_k s(τ_k).
 * The body rate is the pointing rate of R_d pulled back to the body frame
 * plus spin e3; its derivative and q_d' are analytic.
 */
ReferenceSample reference_at(const TrajectoryConfig& cfg, double t);

}  // namespace pdav
