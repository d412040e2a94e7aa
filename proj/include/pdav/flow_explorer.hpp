#pragma once

#include "pdav/integrator.hpp"
#include "pdav/spectral.hpp"

#include <vector>

namespace pdav {

enum class Equilibrium { desired, antipodal };

const char* to_string(Equilibrium e);

/// Which eigenvector multiplies the ς sin ϑ term of the saddle seeds.
enum class SecondaryMode {
  literal,    // v3 = e3: its rate part is zero, so the term is inert
  spin_mode,  // v4 = e6, the spin direction
};

struct SeedSpec {
  Equilibrium equilibrium = Equilibrium::antipodal;
  double epsilon = 1e-6;
  double varsigma = 1e-6;
  cdouble sigma{1.0, 1.0};
  std::vector<double> angles;  // ϑ values in [0, 2π)
  SecondaryMode secondary = SecondaryMode::literal;

  void validate() const;
};

/// ϑ_k = 2πk / count.
std::vector<double> evenly_spaced_angles(int count);

/// R_e = exp(π hat(R_d e1)) exp(ζ hat(R_d e3)) R_d, so that R_e e3 = -R_d e3.
Rotation antipodal_frame(const Rotation& r_d, double zeta = 0.0);

/// The equilibrium state for a static reference.
BodyState equilibrium_state(const ReferenceSample& ref, Equilibrium which);

struct Seed {
  BodyState state;
  double angle = 0.0;
  bool degenerate = false;  // seed coincides with the equilibrium
};

/**
 * Seeds on the local stable eigenspace of the antipodal equilibrium:
 *
 *   R = exp(hat(Δq p)) R_e,  ω = -ω_d + Δω (p + ς sin ϑ v_s)
 *   p = ε cos ϑ (σ v1 + conj(σ) conj(v1)) = 2 ε cos ϑ Re[σ v1]
 *
 * with v_s = v3 or v4 according to spec.secondary.
 */
std::vector<Seed> seeds_saddle(const SeedSpec& spec, const EigenStructure& es_antipodal, const ReferenceSample& ref);

/// Same construction from explicit eigenvectors.
std::vector<Seed> seeds_saddle_from_vectors(const SeedSpec& spec, const Vec6c& v1, const Vec6c& v_secondary,
                                            const ReferenceSample& ref);

/// R = exp(ε hat(cos ϑ e1 + sin ϑ e2)) R_d, ω = ω_d + ε (cos ϑ e1 + sin ϑ e2) + ς e3.
std::vector<Seed> seeds_desired(double epsilon, double varsigma, const std::vector<double>& angles,
                                const ReferenceSample& ref);

/// Ψ(q1, q2) + |ω1 - ω2|.
double distance_metric(const UnitVec& q1, const Vec3& w1, const UnitVec& q2, const Vec3& w2);

/// Fills psi, V and the distances to both equilibria of a static reference.
SampleAnnotator equilibrium_annotator(const ReferenceSample& ref, const GainSet& gains);

/// Flows every seed under the closed loop with a static reference. Blow-ups
/// truncate the affected trace only. Results are in seed order.
std::vector<FlowTrace> run_flow_batch(const std::vector<BodyState>& seeds, const ReferenceSample& ref,
                                      const GainSet& gains, Direction direction, double duration,
                                      const IntegratorConfig& cfg, unsigned threads = 0);

struct ConvergenceVerdict {
  Equilibrium target = Equilibrium::desired;
  double final_distance = 0.0;
  double time_to_threshold = -1.0;  // first sample below threshold, -1 if never
  bool converged = false;
};

ConvergenceVerdict convergence_check(const FlowTrace& trace, Equilibrium target, double threshold = 1e-6);

/// Smallest distance to the target equilibrium over the trace.
double min_distance(const FlowTrace& trace, Equilibrium target);

}  // namespace pdav
