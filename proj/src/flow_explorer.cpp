#include "pdav/flow_explorer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <thread>

namespace pdav {

const char* to_string(Equilibrium e) { return e == Equilibrium::desired ? "desired" : "antipodal"; }

void SeedSpec::validate() const {
  if (!(epsilon > 0.0)) throw ParameterError("seeds.epsilon: must be > 0");
  if (!(varsigma > 0.0)) throw ParameterError("seeds.varsigma: must be > 0");
  for (std::size_t i = 0; i < angles.size(); ++i) {
    for (std::size_t j = i + 1; j < angles.size(); ++j) {
      if (angles[i] == angles[j]) throw ParameterError("seeds.angles: values must be distinct");
    }
  }
}

std::vector<double> evenly_spaced_angles(int count) {
  std::vector<double> out;
  for (int k = 0; k < count; ++k) out.push_back(2.0 * std::numbers::pi * k / count);
  return out;
}

Rotation antipodal_frame(const Rotation& r_d, double zeta) {
  const Mat3& m = r_d.matrix();
  return rodrigues_exp(m.col(0), std::numbers::pi) * rodrigues_exp(m.col(2), zeta) * r_d;
}

BodyState equilibrium_state(const ReferenceSample& ref, Equilibrium which) {
  BodyState x;
  if (which == Equilibrium::desired) {
    x.attitude = ref.attitude;
    x.omega = ref.body_rate;
  } else {
    x.attitude = antipodal_frame(ref.attitude);
    x.omega = -ref.body_rate;
  }
  return x;
}

std::vector<Seed> seeds_saddle_from_vectors(const SeedSpec& spec, const Vec6c& v1, const Vec6c& v_secondary,
                                            const ReferenceSample& ref) {
  spec.validate();
  const BodyState eq = equilibrium_state(ref, Equilibrium::antipodal);
  const Vec6 stable = (spec.sigma * v1).real() * 2.0;
  const Vec6 secondary = v_secondary.real();

  std::vector<Seed> seeds;
  for (double angle : spec.angles) {
    const Vec6 p = spec.epsilon * std::cos(angle) * stable;
    const Vec6 rate = p + spec.varsigma * std::sin(angle) * secondary;
    Seed s;
    s.angle = angle;
    s.state.attitude = exp_map(p.head<3>()) * eq.attitude;
    s.state.omega = eq.omega + rate.tail<3>();
    // cos(π/2) is not exactly zero in floating point, so compare against the seed scale.
    const double floor = 1e-12 * (spec.epsilon + spec.varsigma);
    s.degenerate = p.head<3>().norm() <= floor && rate.tail<3>().norm() <= floor;
    seeds.push_back(s);
  }
  return seeds;
}

std::vector<Seed> seeds_saddle(const SeedSpec& spec, const EigenStructure& es_antipodal, const ReferenceSample& ref) {
  if (!es_antipodal.conventional_labeling || es_antipodal[0].lambda.real() >= 0.0) {
    throw SpectralError("seeds_saddle: no stable complex pair at the antipodal equilibrium");
  }
  const int secondary = spec.secondary == SecondaryMode::literal ? 2 : 3;
  return seeds_saddle_from_vectors(spec, es_antipodal[0].v, es_antipodal[secondary].v, ref);
}

std::vector<Seed> seeds_desired(double epsilon, double varsigma, const std::vector<double>& angles,
                                const ReferenceSample& ref) {
  std::vector<Seed> seeds;
  for (double angle : angles) {
    const Vec3 dir(std::cos(angle), std::sin(angle), 0.0);
    Seed s;
    s.angle = angle;
    s.state.attitude = exp_map(epsilon * dir) * ref.attitude;
    s.state.omega = ref.body_rate + epsilon * dir + varsigma * Vec3::UnitZ();
    s.degenerate = epsilon == 0.0 && varsigma == 0.0;
    seeds.push_back(s);
  }
  return seeds;
}

double distance_metric(const UnitVec& q1, const Vec3& w1, const UnitVec& q2, const Vec3& w2) {
  return error_psi(q1, q2) + (w1 - w2).norm();
}

SampleAnnotator equilibrium_annotator(const ReferenceSample& ref, const GainSet& gains) {
  const UnitVec q_d = ref.pointing;
  const Vec3 w_d = ref.body_rate;
  return [ref, gains, q_d, w_d](TraceSample& s) {
    const TrackingErrors err = tracking_errors(s.state, ref);
    s.psi = err.psi;
    s.lyapunov = lyapunov(err.psi, err.e_q, err.e_omega, gains);
    s.dist_desired = distance_metric(s.q, s.state.omega, q_d, w_d);
    s.dist_antipodal = distance_metric(s.q, s.state.omega, -q_d, -w_d);
  };
}

std::vector<FlowTrace> run_flow_batch(const std::vector<BodyState>& seeds, const ReferenceSample& ref,
                                      const GainSet& gains, Direction direction, double duration,
                                      const IntegratorConfig& cfg, unsigned threads) {
  cfg.validate();
  std::vector<FlowTrace> traces(seeds.size());
  const VectorField field = closed_loop_vector_field([ref](double) { return ref; }, gains);
  const SampleAnnotator annotate = equilibrium_annotator(ref, gains);

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(1, seeds.size())));

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i = next++; i < seeds.size(); i = next++) {
      traces[i] = flow(seeds[i], 0.0, field, duration, direction, cfg, annotate, BlowupPolicy::truncate);
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  return traces;
}

ConvergenceVerdict convergence_check(const FlowTrace& trace, Equilibrium target, double threshold) {
  ConvergenceVerdict v;
  v.target = target;
  if (trace.samples.empty()) {
    v.final_distance = std::numeric_limits<double>::infinity();
    return v;
  }
  auto dist = [target](const TraceSample& s) {
    return target == Equilibrium::desired ? s.dist_desired : s.dist_antipodal;
  };
  for (const auto& s : trace.samples) {
    if (dist(s) < threshold) {
      v.time_to_threshold = s.t;
      break;
    }
  }
  v.final_distance = dist(trace.samples.back());
  v.converged = v.final_distance < threshold;
  return v;
}

double min_distance(const FlowTrace& trace, Equilibrium target) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& s : trace.samples) {
    best = std::min(best, target == Equilibrium::desired ? s.dist_desired : s.dist_antipodal);
  }
  return best;
}

}  // namespace pdav
