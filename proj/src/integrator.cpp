#include "pdav/integrator.hpp"

#include <cmath>
#include <sstream>

namespace pdav {

void IntegratorConfig::validate() const {
  if (!(step > 0.0) || !std::isfinite(step)) throw ParameterError("integrator.step: must be > 0");
  if (reorthonormalize_every < 0) throw ParameterError("integrator.reorthonormalize_every: must be >= 0");
  if (record_decimation < 1) throw ParameterError("integrator.record_decimation: must be >= 1");
}

Mat3 inverse_right_jacobian(const Vec3& theta) {
  const double a = theta.norm();
  const Mat3 k = hat(theta);
  double c;
  if (a < 1e-4) {
    c = 1.0 / 12.0 + a * a / 720.0;
  } else {
    c = 1.0 / (a * a) - (1.0 + std::cos(a)) / (2.0 * a * std::sin(a));
  }
  return Mat3::Identity() + 0.5 * k + c * (k * k);
}

namespace {

struct Stage {
  Vec3 velocity;  // Lie-algebra velocity in exponential coordinates
  Vec3 accel;
};

BodyState advance(const BodyState& base, const Vec3& theta, const Vec3& d_omega) {
  BodyState out;
  out.attitude = Rotation::trusted(base.attitude.matrix() * exp_map(theta).matrix());
  out.omega = base.omega + d_omega;
  return out;
}

}  // namespace

BodyState step(const BodyState& state, double t, const VectorField& field, double h, Direction direction) {
  const double sgn = direction == Direction::forward ? 1.0 : -1.0;
  auto eval = [&](double tau, const BodyState& x, const Vec3& theta) {
    const StateRate r = field(t + sgn * tau, x);
    return Stage{inverse_right_jacobian(theta) * (sgn * r.attitude_rate), sgn * r.omega_dot};
  };

  const Stage k1 = eval(0.0, state, Vec3::Zero());
  const Vec3 th2 = 0.5 * h * k1.velocity;
  const Stage k2 = eval(0.5 * h, advance(state, th2, 0.5 * h * k1.accel), th2);
  const Vec3 th3 = 0.5 * h * k2.velocity;
  const Stage k3 = eval(0.5 * h, advance(state, th3, 0.5 * h * k2.accel), th3);
  const Vec3 th4 = h * k3.velocity;
  const Stage k4 = eval(h, advance(state, th4, h * k3.accel), th4);

  const Vec3 theta = (h / 6.0) * (k1.velocity + 2.0 * k2.velocity + 2.0 * k3.velocity + k4.velocity);
  const Vec3 d_omega = (h / 6.0) * (k1.accel + 2.0 * k2.accel + 2.0 * k3.accel + k4.accel);
  BodyState next = advance(state, theta, d_omega);
  if (!next.attitude.matrix().allFinite() || !next.omega.allFinite()) {
    std::ostringstream os;
    os << "non-finite state after step at t = " << t;
    throw IntegrationError(os.str());
  }
  return next;
}

namespace {

TraceSample make_sample(double t, const BodyState& state, const SampleAnnotator& annotate) {
  TraceSample s;
  s.t = t;
  s.state = state;
  s.q = UnitVec::normalized(state.attitude.matrix().col(2));
  s.spin = state.omega.z();
  if (annotate) annotate(s);
  return s;
}

}  // namespace

FlowTrace flow(const BodyState& initial, double t0, const VectorField& field, double duration, Direction direction,
               const IntegratorConfig& cfg, const SampleAnnotator& annotate, BlowupPolicy policy) {
  cfg.validate();
  if (!(duration > 0.0)) throw ParameterError("flow: duration must be > 0");
  const auto steps = static_cast<long>(std::ceil(duration / cfg.step - 1e-9));
  const double h = duration / static_cast<double>(steps);
  const double sgn = direction == Direction::forward ? 1.0 : -1.0;

  FlowTrace trace;
  trace.direction = direction;
  trace.samples.reserve(static_cast<std::size_t>(steps / cfg.record_decimation + 2));
  trace.samples.push_back(make_sample(t0, initial, annotate));

  BodyState x = initial;
  for (long k = 1; k <= steps; ++k) {
    const double t_prev = t0 + sgn * static_cast<double>(k - 1) * h;
    try {
      x = step(x, t_prev, field, h, direction);
      if (cfg.reorthonormalize_every > 0 && k % cfg.reorthonormalize_every == 0) {
        x.attitude = reorthonormalize(x.attitude.matrix());
      }
    } catch (const std::exception& e) {
      if (policy == BlowupPolicy::throw_error) throw IntegrationError(e.what());
      trace.truncated = true;
      trace.truncation_reason = e.what();
      return trace;
    }
    if (k % cfg.record_decimation == 0 || k == steps) {
      trace.samples.push_back(make_sample(t0 + sgn * static_cast<double>(k) * h, x, annotate));
    }
  }
  return trace;
}

VectorField closed_loop_vector_field(ReferenceFn reference, const GainSet& gains) {
  return [reference = std::move(reference), gains](double t, const BodyState& x) {
    const ReferenceSample ref = reference(t);
    return StateRate{x.omega, closed_loop_field(x, ref, gains).omega_dot};
  };
}

VectorField open_loop_vector_field(ReferenceFn reference, const GainSet& gains, const PlantParams& plant) {
  return [reference = std::move(reference), gains, plant](double t, const BodyState& x) {
    const ReferenceSample ref = reference(t);
    const Vec3 u = control_law(x, ref, gains, plant);
    return StateRate{x.omega, open_loop_field(x, u, plant).omega_dot};
  };
}

}  // namespace pdav
