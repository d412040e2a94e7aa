#pragma once

#include "pdav/linearization.hpp"

#include <array>
#include <complex>
#include <optional>
#include <vector>

namespace pdav {

using cdouble = std::complex<double>;
using Vec6c = Eigen::Matrix<cdouble, 6, 1>;

class SpectralError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Classification { unclassified, stable_focus, saddle, other };

const char* to_string(Classification c);

struct Eigenpair {
  cdouble lambda;
  Vec6c v;                // unit norm, largest component real positive
  int partner = -1;       // index of the conjugate pair member, -1 for real eigenvalues
  bool admissible = true;
};

/**
 * Six eigenpairs of a 6x6 real matrix.
 *
 * When the spectrum has two complex pairs and two real eigenvalues the
 * slots follow the conventional labeling
 *   [λ1, λ2, λ3, λ4, conj λ1, conj λ2]
 * with λ1 the complex pair of smaller |Re|, positive imaginary parts first,
 * and λ3, λ4 the real eigenvalues by increasing magnitude. Otherwise pairs
 * are ordered by real part (conventional_labeling = false).
 */
struct EigenStructure {
  std::array<Eigenpair, 6> pairs;
  bool conventional_labeling = false;
  Classification classification = Classification::unclassified;

  const Eigenpair& operator[](int i) const { return pairs[static_cast<std::size_t>(i)]; }
};

EigenStructure eig6(const Mat6& A);

/// Flags eigenvectors outside N(C) as inadmissible and classifies on the rest.
Classification classify_equilibrium(EigenStructure& es, const ConstraintRow& row);

struct ModalCoefficients {
  struct RealMode {
    int index;
    double a;
  };
  struct ComplexMode {
    int index;  // slot of the member with Im λ > 0
    cdouble c;
  };
  std::vector<RealMode> real;
  std::vector<ComplexMode> complex;
};

/// Solves x0 = Σ a_k v_k + 2 Re Σ c_k v_k. Throws SpectralError when the
/// eigenbasis condition number exceeds 1e12 or x0 excites an inadmissible mode.
ModalCoefficients modal_coefficients(const EigenStructure& es, const Vec6& x0);

/// x(t) = Σ a_k e^{λ_k t} v_k + 2 Re Σ c_k e^{λ_k t} v_k.
Vec6 linearized_solution(const EigenStructure& es, const ModalCoefficients& coeffs, double t);

/// R = R3(φ) R1(θ) R3(ψ).
struct Euler313 {
  double phi = 0.0;    // precession
  double theta = 0.0;  // nutation
  double psi = 0.0;    // spin
  bool singular = false;

  Mat3 matrix() const;
};

/// θ in [0, π]. When |sin θ| <= 1e-9 the result is flagged singular with
/// φ = 0 and ψ carrying the whole rotation about the vertical.
Euler313 euler313_extract(const Rotation& r);

struct EulerRates {
  double phi_dot = 0.0;
  double theta_dot = 0.0;
  double psi_dot = 0.0;
};

/// Body rates to 313 Euler rates. Throws SpectralError at the singularity.
EulerRates euler_rates(const Euler313& angles, const Vec3& omega);

/// θ' = cos ψ ω1 - sin ψ ω2. Defined at the singularity as well.
double nutation_rate(const Euler313& angles, const Vec3& omega);

struct NutationEstimate {
  double frequency_hz = 0.0;
  double mu1 = 0.0;     // imaginary part of the slow admissible pair
  int pair_index = -1;
};

/// f_n = (ω_d + μ1) / 2π with μ1 from the admissible complex pair of largest negative real part.
NutationEstimate nutation_freq_estimate(double spin_rate, const EigenStructure& es_desired);

struct NutationRate {
  double full = 0.0;  // both complex pairs
  double slow = 0.0;  // slow pair only
};

/// Nutation rate of the linearized motion near the desired equilibrium with ψ(t) = ω_d t + ψ0.
NutationRate nutation_rate_reconstruction(const EigenStructure& es, const ModalCoefficients& coeffs, double psi0,
                                          double spin_rate, double t);

struct SpectralPeak {
  double frequency_hz = 0.0;
  double magnitude = 0.0;  // single-sided amplitude
};

/// Dominant frequency of a real signal sampled at fs. The mean is removed,
/// a rectangular window applied and DC excluded; the peak bin is refined by
/// a parabola through its neighbours. An optional band limits the search.
SpectralPeak fft_peak(const std::vector<double>& signal, double fs,
                      std::optional<std::pair<double, double>> band = std::nullopt);

}  // namespace pdav
