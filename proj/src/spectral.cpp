#include "pdav/spectral.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace pdav {

const char* to_string(Classification c) {
  switch (c) {
    case Classification::unclassified: return "unclassified";
    case Classification::stable_focus: return "stable_focus";
    case Classification::saddle: return "saddle";
    case Classification::other: return "other";
  }
  return "unknown";
}

namespace {

// Scale so the first component within 1e-6 of the largest magnitude is real positive.
Vec6c normalize_phase(Vec6c v) {
  v.normalize();
  const double top = v.cwiseAbs().maxCoeff();
  for (int i = 0; i < 6; ++i) {
    const double m = std::abs(v[i]);
    if (m >= (1.0 - 1e-6) * top) {
      v *= std::conj(v[i]) / m;
      v[i] = cdouble(m, 0.0);
      break;
    }
  }
  return v;
}

void relink_partners(std::array<Eigenpair, 6>& pairs) {
  for (auto& p : pairs) p.partner = -1;
  for (int i = 0; i < 6; ++i) {
    if (pairs[i].lambda.imag() <= 0.0) continue;
    for (int j = 0; j < 6; ++j) {
      if (pairs[j].partner < 0 && pairs[j].lambda == std::conj(pairs[i].lambda) && j != i) {
        pairs[i].partner = j;
        pairs[j].partner = i;
        break;
      }
    }
  }
}

}  // namespace

EigenStructure eig6(const Mat6& A) {
  Eigen::EigenSolver<Mat6> solver;
  solver.setMaxIterations(10000);
  solver.compute(A, true);
  if (solver.info() != Eigen::Success) throw SpectralError("eig6: eigenvalue iteration did not converge");

  const Eigen::Matrix<cdouble, 6, 1> values = solver.eigenvalues();
  const Eigen::Matrix<cdouble, 6, 6> vectors = solver.eigenvectors();

  std::vector<Eigenpair> upper;
  std::vector<Eigenpair> reals;
  for (int i = 0; i < 6; ++i) {
    const cdouble lam = values[i];
    if (lam.imag() > 0.0) {
      upper.push_back({lam, normalize_phase(vectors.col(i)), -1, true});
    } else if (lam.imag() == 0.0) {
      Vec6c v = vectors.col(i);
      v = v.real().cast<cdouble>();
      reals.push_back({cdouble(lam.real(), 0.0), normalize_phase(v), -1, true});
    }
  }
  // The real Schur form delivers conjugates in matched pairs, so the lower
  // members are rebuilt exactly from the upper ones.
  if (2 * upper.size() + reals.size() != 6) throw SpectralError("eig6: unmatched complex eigenvalues");

  EigenStructure es;
  auto conj_of = [](const Eigenpair& p) { return Eigenpair{std::conj(p.lambda), p.v.conjugate(), -1, true}; };

  if (upper.size() == 2 && reals.size() == 2) {
    std::stable_sort(upper.begin(), upper.end(), [](const Eigenpair& a, const Eigenpair& b) {
      return std::abs(a.lambda.real()) < std::abs(b.lambda.real());
    });
    std::stable_sort(reals.begin(), reals.end(), [](const Eigenpair& a, const Eigenpair& b) {
      return std::abs(a.lambda) < std::abs(b.lambda);
    });
    es.pairs = {upper[0], upper[1], reals[0], reals[1], conj_of(upper[0]), conj_of(upper[1])};
    es.conventional_labeling = true;
  } else {
    std::vector<Eigenpair> all;
    for (const auto& p : upper) {
      all.push_back(p);
      all.push_back(conj_of(p));
    }
    all.insert(all.end(), reals.begin(), reals.end());
    std::stable_sort(all.begin(), all.end(), [](const Eigenpair& a, const Eigenpair& b) {
      if (a.lambda.real() != b.lambda.real()) return a.lambda.real() < b.lambda.real();
      return a.lambda.imag() > b.lambda.imag();
    });
    std::copy(all.begin(), all.end(), es.pairs.begin());
  }
  relink_partners(es.pairs);
  return es;
}

Classification classify_equilibrium(EigenStructure& es, const ConstraintRow& row) {
  double scale = 0.0;
  for (const auto& p : es.pairs) scale = std::max(scale, std::abs(p.lambda));
  const double tol = 1e-9 * std::max(scale, 1.0);

  bool any_negative = false;
  bool any_positive = false;
  bool any_neutral = false;
  for (auto& p : es.pairs) {
    const cdouble cv = (row.C.cast<cdouble>() * p.v)(0);
    p.admissible = std::abs(cv) <= 1e-8 * p.v.norm();
    if (!p.admissible) continue;
    const double re = p.lambda.real();
    if (re < -tol) {
      any_negative = true;
    } else if (re > tol) {
      any_positive = true;
    } else {
      any_neutral = true;
    }
  }
  if (any_negative && !any_positive && !any_neutral) {
    es.classification = Classification::stable_focus;
  } else if (any_negative && any_positive) {
    es.classification = Classification::saddle;
  } else {
    es.classification = Classification::other;
  }
  return es.classification;
}

ModalCoefficients modal_coefficients(const EigenStructure& es, const Vec6& x0) {
  Eigen::Matrix<cdouble, 6, 6> basis;
  for (int i = 0; i < 6; ++i) basis.col(i) = es[i].v;

  Eigen::JacobiSVD<Eigen::Matrix<cdouble, 6, 6>> svd(basis);
  const auto& sv = svd.singularValues();
  if (!(sv(5) > 0.0) || sv(0) / sv(5) > 1e12) throw SpectralError("modal_coefficients: defective eigenbasis");

  const Vec6c z = basis.fullPivLu().solve(x0.cast<cdouble>());
  const double scale = std::max(1.0, x0.norm());

  ModalCoefficients out;
  for (int i = 0; i < 6; ++i) {
    const Eigenpair& p = es[i];
    if (!p.admissible && std::abs(z[i]) > 1e-9 * scale) {
      throw SpectralError("modal_coefficients: x0 excites an inadmissible mode");
    }
    if (p.partner < 0) {
      out.real.push_back({i, z[i].real()});
    } else if (p.lambda.imag() > 0.0) {
      out.complex.push_back({i, z[i]});
    }
  }
  return out;
}

Vec6 linearized_solution(const EigenStructure& es, const ModalCoefficients& coeffs, double t) {
  Vec6 x = Vec6::Zero();
  for (const auto& m : coeffs.real) {
    x += m.a * std::exp(es[m.index].lambda.real() * t) * es[m.index].v.real();
  }
  for (const auto& m : coeffs.complex) {
    x += 2.0 * (m.c * std::exp(es[m.index].lambda * t) * es[m.index].v).real();
  }
  return x;
}

Mat3 Euler313::matrix() const {
  return (rodrigues_exp(Vec3::UnitZ(), phi) * rodrigues_exp(Vec3::UnitX(), theta) *
          rodrigues_exp(Vec3::UnitZ(), psi))
      .matrix();
}

Euler313 euler313_extract(const Rotation& r) {
  const Mat3& m = r.matrix();
  Euler313 e;
  e.theta = std::acos(std::clamp(m(2, 2), -1.0, 1.0));
  if (std::abs(std::sin(e.theta)) <= 1e-9) {
    e.singular = true;
    e.phi = 0.0;
    e.psi = std::atan2(-m(0, 1), m(0, 0));
    return e;
  }
  e.phi = std::atan2(m(0, 2), -m(1, 2));
  e.psi = std::atan2(m(2, 0), m(2, 1));
  return e;
}

EulerRates euler_rates(const Euler313& angles, const Vec3& omega) {
  const double st = std::sin(angles.theta);
  if (angles.singular || std::abs(st) <= 1e-9) throw SpectralError("euler_rates: 313 sequence is singular (sin θ = 0)");
  const double sp = std::sin(angles.psi);
  const double cp = std::cos(angles.psi);
  const double lateral = sp * omega.x() + cp * omega.y();
  EulerRates out;
  out.phi_dot = lateral / st;
  out.theta_dot = cp * omega.x() - sp * omega.y();
  out.psi_dot = omega.z() - lateral * std::cos(angles.theta) / st;
  return out;
}

double nutation_rate(const Euler313& angles, const Vec3& omega) {
  return std::cos(angles.psi) * omega.x() - std::sin(angles.psi) * omega.y();
}

NutationEstimate nutation_freq_estimate(double spin_rate, const EigenStructure& es_desired) {
  NutationEstimate best;
  double best_re = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < 6; ++i) {
    const Eigenpair& p = es_desired[i];
    if (p.partner < 0 || !p.admissible || p.lambda.imag() <= 0.0) continue;
    const double re = p.lambda.real();
    if (re < 0.0 && re > best_re) {
      best_re = re;
      best.pair_index = i;
      best.mu1 = std::abs(p.lambda.imag());
    }
  }
  if (best.pair_index < 0) throw SpectralError("nutation_freq_estimate: no admissible stable complex pair");
  best.frequency_hz = (spin_rate + best.mu1) / (2.0 * std::numbers::pi);
  return best;
}

NutationRate nutation_rate_reconstruction(const EigenStructure& es, const ModalCoefficients& coeffs, double psi0,
                                          double spin_rate, double t) {
  NutationRate out;
  const double c = std::cos(spin_rate * t + psi0);
  const double s = std::sin(spin_rate * t + psi0);
  bool first = true;
  for (const auto& m : coeffs.complex) {
    const Vec6 mode = (m.c * std::exp(es[m.index].lambda * t) * es[m.index].v).real();
    const double term = 2.0 * c * mode[3] - 2.0 * s * mode[4];
    out.full += term;
    if (first) out.slow = term;
    first = false;
  }
  return out;
}

SpectralPeak fft_peak(const std::vector<double>& signal, double fs, std::optional<std::pair<double, double>> band) {
  const std::size_t n = signal.size();
  if (n < 1024) throw SpectralError("fft_peak: at least 1024 samples required");
  if (!(fs > 0.0)) throw SpectralError("fft_peak: sampling rate must be > 0");

  double mean = 0.0;
  for (double x : signal) mean += x;
  mean /= static_cast<double>(n);
  std::vector<double> centered(n);
  double spread = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    centered[i] = signal[i] - mean;
    spread = std::max(spread, std::abs(centered[i]));
  }
  if (!(spread > 1e-14 * std::max(1.0, std::abs(mean)))) throw SpectralError("fft_peak: constant signal has no peak");

  Eigen::FFT<double> fft;
  std::vector<cdouble> spectrum;
  fft.fwd(spectrum, centered);

  const std::size_t half = n / 2;
  const double df = fs / static_cast<double>(n);
  std::size_t lo = 1;
  std::size_t hi = half;
  if (band) {
    lo = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(band->first / df)));
    hi = std::min(half, static_cast<std::size_t>(std::floor(band->second / df)));
    if (lo > hi) throw SpectralError("fft_peak: band contains no frequency bins");
  }

  std::size_t k = lo;
  for (std::size_t i = lo; i <= hi; ++i) {
    if (std::abs(spectrum[i]) > std::abs(spectrum[k])) k = i;
  }
  const double beta = std::abs(spectrum[k]);
  double offset = 0.0;
  double peak = beta;
  if (k > 1 && k < half) {
    const double alpha = std::abs(spectrum[k - 1]);
    const double gamma = std::abs(spectrum[k + 1]);
    const double denom = alpha - 2.0 * beta + gamma;
    if (denom != 0.0) {
      offset = 0.5 * (alpha - gamma) / denom;
      peak = beta - 0.25 * (alpha - gamma) * offset;
    }
  }
  return {(static_cast<double>(k) + offset) * df, 2.0 * peak / static_cast<double>(n)};
}

}  // namespace pdav
