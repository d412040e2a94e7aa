#include "pdav/maneuver.hpp"

#include "pdav/flow_explorer.hpp"
#include "pdav/spectral.hpp"

namespace pdav {

ManeuverResult simulate_maneuver(const TrajectoryConfig& trajectory, const GainSet& gains, const PlantParams& plant,
                                 const IntegratorConfig& cfg) {
  trajectory.validate();
  gains.validate();
  plant.validate();
  cfg.validate();

  const ReferenceFn reference = [trajectory](double t) { return reference_at(trajectory, t); };
  const ReferenceSample start = reference(0.0);
  BodyState initial;
  initial.attitude = start.attitude;
  initial.omega = start.body_rate;

  const SampleAnnotator annotate = [&](TraceSample& s) {
    const ReferenceSample ref = reference(s.t);
    equilibrium_annotator(ref, gains)(s);
  };
  const FlowTrace trace =
      flow(initial, 0.0, closed_loop_vector_field(reference, gains), trajectory.duration, Direction::forward, cfg,
           annotate);

  ManeuverResult result;
  result.sample_rate = 1.0 / (cfg.step * cfg.record_decimation);
  result.samples.reserve(trace.samples.size());
  for (const auto& s : trace.samples) {
    const ReferenceSample ref = reference(s.t);
    ManeuverSample m;
    m.trace = s;
    const Euler313 angles = euler313_extract(s.state.attitude);
    m.nutation_rate = nutation_rate(angles, s.state.omega);
    m.precession_rate = angles.singular ? 0.0 : euler_rates(angles, s.state.omega).phi_dot;
    m.psi_percent = 50.0 * s.psi;
    m.e_omega3 = error_eomega(s.state, ref).z();
    m.torque = control_law(s.state, ref, gains, plant);
    result.samples.push_back(m);
  }
  return result;
}

}  // namespace pdav
