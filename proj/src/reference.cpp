#include "pdav/reference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace pdav {

void TrajectoryConfig::validate() const {
  double previous_end = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const auto& seg = segments[i];
    std::ostringstream field;
    field << "trajectory.segments[" << i << "]";
    if (!(seg.t_end > seg.t_start)) throw ParameterError(field.str() + ": t_end must exceed t_start");
    if (seg.t_start < previous_end) throw ParameterError(field.str() + ": segments must be time-ordered and non-overlapping");
    if (!std::isfinite(seg.angle)) throw ParameterError(field.str() + ": angle must be finite");
    previous_end = seg.t_end;
  }
  if (!(duration > 0.0)) throw ParameterError("trajectory.duration: must be > 0");
  if (!std::isfinite(spin)) throw ParameterError("trajectory.spin: must be finite");
}

TrajectoryConfig default_maneuver() {
  TrajectoryConfig cfg;
  const double quarter = std::numbers::pi / 2.0;
  cfg.segments = {
      ManeuverSegment{UnitVec::from_unit(Vec3::UnitX()), quarter, 0.1, 0.6},
      ManeuverSegment{UnitVec::from_unit(Vec3::UnitZ()), quarter, 0.7, 1.2},
  };
  cfg.spin = 1000.0;
  cfg.duration = 1.7;
  return cfg;
}

ProfileSample min_snap_profile(double tau) {
  ProfileSample p;
  if (tau < 0.0 || tau > 1.0) {
    p.clamped = true;
    tau = std::clamp(tau, 0.0, 1.0);
  }
  const double t2 = tau * tau;
  const double t3 = t2 * tau;
  const double t4 = t3 * tau;
  p.s = t4 * (35.0 + tau * (-84.0 + tau * (70.0 - 20.0 * tau)));
  p.ds = t3 * (140.0 + tau * (-420.0 + tau * (420.0 - 140.0 * tau)));
  p.dds = t2 * (420.0 + tau * (-1680.0 + tau * (2100.0 - 840.0 * tau)));
  return p;
}

ReferenceSample reference_at(const TrajectoryConfig& cfg, double t) {
  Mat3 r_d = cfg.initial_attitude.matrix();
  // Inertial angular velocity of R_d and its derivative, accumulated while
  // composing the segment rotations from the inside out.
  Vec3 w_s = Vec3::Zero();
  Vec3 w_s_dot = Vec3::Zero();
  for (const auto& seg : cfg.segments) {
    const double span = seg.t_end - seg.t_start;
    const ProfileSample p = min_snap_profile((t - seg.t_start) / span);
    const double a = seg.angle * p.s;
    const double a_dot = p.clamped ? 0.0 : seg.angle * p.ds / span;
    const double a_ddot = p.clamped ? 0.0 : seg.angle * p.dds / (span * span);
    const Vec3& n = seg.axis.vec();
    const Mat3 step = rodrigues_exp(n, a).matrix();
    const Vec3 inner = step * w_s;
    w_s_dot = a_ddot * n + step * w_s_dot + (a_dot * n).cross(inner);
    w_s = a_dot * n + inner;
    r_d = step * r_d;
  }

  ReferenceSample ref;
  ref.attitude = Rotation::trusted(r_d);
  ref.pointing = UnitVec::normalized(r_d.col(2));
  ref.pointing_rate = w_s.cross(ref.pointing.vec());
  ref.body_rate = r_d.transpose() * w_s + cfg.spin * Vec3::UnitZ();
  ref.body_accel = r_d.transpose() * w_s_dot;
  return ref;
}

}  // namespace pdav
