#include "oracles.hpp"

#include <doctest.h>

#include "pdav/integrator.hpp"
#include "pdav/spectral.hpp"

#include <numbers>

using namespace pdav;
using std::numbers::pi;

namespace {

BodyState make_state(const Mat3& r, const Vec3& w) {
  BodyState s;
  s.attitude = Rotation::from_matrix(r);
  s.omega = w;
  return s;
}

const ReferenceSample kRef = static_reference(Rotation::identity(), 1000.0);
const BodyState kDesired = make_state(Mat3::Identity(), Vec3(0, 0, 1000));
const BodyState kAntipodal = make_state(oracle::rot_x(pi), Vec3(0, 0, -1000));

EigenStructure classified(const BodyState& eq) {
  EigenStructure es = eig6(assemble_A(eq, kRef, GainSet{}).A);
  classify_equilibrium(es, constraint_row(eq.pointing()));
  return es;
}

bool near(cdouble got, cdouble expected, double rel) { return std::abs(got - expected) <= rel * std::abs(expected); }

double overlap(const Vec6c& a, const Vec6c& b) { return std::abs(a.dot(b)) / (a.norm() * b.norm()); }

Vec6c vec6c(std::initializer_list<cdouble> xs) {
  Vec6c v;
  int i = 0;
  for (cdouble x : xs) v[i++] = x;
  return v;
}

using namespace std::complex_literals;

}  // namespace

TEST_CASE("eig6 of a diagonal matrix") {
  Mat6 a = Mat6::Zero();
  for (int i = 0; i < 6; ++i) a(i, i) = i + 1.0;
  const EigenStructure es = eig6(a);
  CHECK_FALSE(es.conventional_labeling);
  for (int i = 0; i < 6; ++i) {
    CHECK(es[i].lambda == cdouble(i + 1.0, 0.0));
    CHECK(es[i].partner == -1);
    Vec6c e = Vec6c::Zero();
    e[i] = 1.0;
    CHECK((es[i].v - e).norm() < 1e-15);
  }
}

TEST_CASE("desired equilibrium spectrum") {
  const EigenStructure es = classified(kDesired);
  REQUIRE(es.conventional_labeling);
  CHECK(near(es[0].lambda, cdouble(-14.1, 1005.5), 1e-2));
  CHECK(near(es[1].lambda, cdouble(-2569.3, 5.5), 1e-2));
  CHECK(std::abs(es[2].lambda) < 1e-9);
  CHECK(std::abs(es[3].lambda - cdouble(-500.0, 0.0)) <= 1e-9 * 500.0);
  CHECK(es[4].lambda == std::conj(es[0].lambda));
  CHECK(es[5].lambda == std::conj(es[1].lambda));
  CHECK(es.classification == Classification::stable_focus);
  CHECK_FALSE(es[2].admissible);
  for (int i : {0, 1, 3, 4, 5}) CHECK(es[i].admissible);

  const Vec6c e3 = vec6c({0, 0, 1, 0, 0, 0});
  const Vec6c e6 = vec6c({0, 0, 0, 0, 0, 1});
  CHECK(overlap(es[2].v, e3) > 0.999);
  CHECK(overlap(es[3].v, e6) > 0.999);
  const Vec6c v1 = vec6c({0.0007i, 0.0007, 0, -0.7071, 0.7071i, 0});
  const Vec6c v2 = vec6c({-0.0003i, 0.0003, 0, 0.7071i, -0.7071, 0});
  CHECK(overlap(es[0].v, v1) > 0.999);
  CHECK(overlap(es[1].v, v2) > 0.999);
}

TEST_CASE("antipodal equilibrium spectrum") {
  const EigenStructure es = classified(kAntipodal);
  REQUIRE(es.conventional_labeling);
  CHECK(near(es[0].lambda, cdouble(-783.6, 751.3), 1e-2));
  CHECK(near(es[1].lambda, cdouble(2367.0, 248.7), 1e-2));
  CHECK(std::abs(es[3].lambda - cdouble(-500.0, 0.0)) <= 1e-9 * 500.0);
  CHECK(es.classification == Classification::saddle);
  CHECK_FALSE(es[2].admissible);
  const Vec6c v1 = vec6c({-0.0005 + 0.0005i, 0.0005 + 0.0005i, 0, -0.7071i, 0.7071, 0});
  const Vec6c v2 = vec6c({0.0003, -0.0003i, 0, 0.7071, 0.7071i, 0});
  CHECK(overlap(es[0].v, v1) > 0.999);
  CHECK(overlap(es[1].v, v2) > 0.999);
}

TEST_CASE("eigenpairs satisfy their defining equation") {
  std::mt19937_64 rng(97);
  for (const BodyState& s : {kDesired, kAntipodal, make_state(oracle::random_rotation(rng), Vec3(30, -40, 900))}) {
    const Mat6 a = assemble_A(s, kRef, GainSet{}).A;
    const EigenStructure es = eig6(a);
    const double amax = a.cwiseAbs().maxCoeff();
    for (int i = 0; i < 6; ++i) {
      CHECK((a.cast<cdouble>() * es[i].v - es[i].lambda * es[i].v).norm() < 1e-8 * amax);
      CHECK(std::abs(es[i].v.norm() - 1.0) < 1e-12);
      if (es[i].partner >= 0) {
        const Eigenpair& p = es[es[i].partner];
        CHECK(p.lambda == std::conj(es[i].lambda));
        CHECK((p.v - es[i].v.conjugate()).norm() == 0.0);
      }
    }
  }
}

TEST_CASE("spectrum is invariant under a transverse axis swap") {
  Mat6 p = Mat6::Zero();
  for (auto [i, j] : {std::pair{0, 1}, {1, 0}, {2, 2}, {3, 4}, {4, 3}, {5, 5}}) p(i, j) = 1.0;
  for (const BodyState& s : {kDesired, kAntipodal}) {
    const Mat6 a = assemble_A(s, kRef, GainSet{}).A;
    const EigenStructure x = eig6(a);
    const EigenStructure y = eig6(p * a * p.transpose());
    for (int i = 0; i < 6; ++i) {
      // A reflection reverses the sense of rotation, so pairs may come back conjugated.
      const bool same = std::abs(x[i].lambda - y[i].lambda) <= 1e-8 * std::max(1.0, std::abs(x[i].lambda));
      const bool conj = std::abs(x[i].lambda - std::conj(y[i].lambda)) <= 1e-8 * std::max(1.0, std::abs(x[i].lambda));
      CHECK((same || conj));
    }
  }
}

TEST_CASE("classification of a uniformly stable matrix") {
  EigenStructure es = eig6(-Mat6::Identity());
  CHECK(classify_equilibrium(es, constraint_row(UnitVec::from_unit(Vec3::UnitZ()))) == Classification::stable_focus);
  int inadmissible = 0;
  for (const auto& p : es.pairs) inadmissible += p.admissible ? 0 : 1;
  CHECK(inadmissible == 1);
  CHECK_FALSE(es[2].admissible);
  CHECK(std::string(to_string(es.classification)) == "stable_focus");
}

TEST_CASE("modal coefficients") {
  const EigenStructure es = classified(kDesired);

  SUBCASE("spin mode alone") {
    const ModalCoefficients m = modal_coefficients(es, es[3].v.real());
    for (const auto& r : m.real) CHECK(std::abs(r.a - (r.index == 3 ? 1.0 : 0.0)) < 1e-12);
    for (const auto& c : m.complex) CHECK(std::abs(c.c) < 1e-12);
  }
  SUBCASE("one complex pair") {
    const ModalCoefficients m = modal_coefficients(es, 2.0 * es[0].v.real());
    for (const auto& c : m.complex) CHECK(std::abs(c.c - (c.index == 0 ? 1.0 : 0.0)) < 1e-12);
    for (const auto& r : m.real) CHECK(std::abs(r.a) < 1e-12);
  }
  SUBCASE("random admissible states reconstruct") {
    const auto basis = nullspace_basis(constraint_row(kDesired.pointing()));
    std::mt19937_64 rng(101);
    std::normal_distribution<double> n(0.0, 1.0);
    for (int k = 0; k < 20; ++k) {
      Eigen::Matrix<double, 5, 1> coords;
      for (int j = 0; j < 5; ++j) coords[j] = n(rng);
      const Vec6 x0 = basis * coords;
      const ModalCoefficients m = modal_coefficients(es, x0);
      Vec6 sum = Vec6::Zero();
      for (const auto& r : m.real) sum += r.a * es[r.index].v.real();
      for (const auto& c : m.complex) sum += 2.0 * (c.c * es[c.index].v).real();
      CHECK((sum - x0).norm() < 1e-9);
      CHECK((linearized_solution(es, m, 0.0) - x0).norm() < 1e-9);
    }
  }
  SUBCASE("excitation of the pointing-parallel mode is rejected") {
    Vec6 x0 = Vec6::Zero();
    x0[2] = 1.0;
    CHECK_THROWS_AS(modal_coefficients(es, x0), SpectralError);
  }
}

TEST_CASE("spin mode decays with the convergence rate") {
  const EigenStructure es = classified(kDesired);
  const ModalCoefficients m = modal_coefficients(es, es[3].v.real());
  const Vec6 x = linearized_solution(es, m, 0.002);
  CHECK(std::abs(x[5]) == doctest::Approx(std::exp(-1.0)).epsilon(1e-9));
  CHECK(x.head<5>().norm() < 1e-12);
}

TEST_CASE("linearized and nonlinear motion agree near the desired equilibrium") {
  const EigenStructure es = classified(kDesired);
  const auto basis = nullspace_basis(constraint_row(kDesired.pointing()));
  const VectorField f = closed_loop_vector_field([](double) { return kRef; }, GainSet{});
  IntegratorConfig cfg;
  cfg.step = 1e-7;
  cfg.record_decimation = 10;
  const double eps = 1e-6;
  // A is frozen at t = 0 while the body spins at 1000 rad/s, so the horizon
  // has to stay short against the spin period.
  const double t = 5e-6;
  std::mt19937_64 rng(103);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int k = 0; k < 5; ++k) {
    Eigen::Matrix<double, 5, 1> coords;
    for (int j = 0; j < 5; ++j) coords[j] = n(rng);
    const Vec6 x0 = basis * coords;
    const Vec6 lin = linearized_solution(es, modal_coefficients(es, x0), t);

    const BodyState seed = make_state(oracle::expm_series(oracle::skew(eps * x0.head<3>())), kDesired.omega + eps * x0.tail<3>());
    const BodyState end = flow(seed, 0.0, f, t, Direction::forward, cfg).samples.back().state;
    // Left perturbation relative to the unperturbed spinning equilibrium.
    const Mat3 base = oracle::rot_z(1000.0 * t);
    Vec6 nonlin;
    nonlin.head<3>() = oracle::log_rotation(end.attitude.matrix() * base.transpose()) / eps;
    nonlin.tail<3>() = (end.omega - kDesired.omega) / eps;
    const double rel = (lin - nonlin).norm() / nonlin.norm();
    MESSAGE("linear vs nonlinear relative error " << rel);
    CHECK(rel < 1e-2);
  }
}

TEST_CASE("313 Euler angles") {
  const Euler313 quarter = euler313_extract(rodrigues_exp(Vec3::UnitX(), pi / 2));
  CHECK_FALSE(quarter.singular);
  CHECK(std::abs(quarter.phi) < 1e-15);
  CHECK(quarter.theta == doctest::Approx(pi / 2));
  CHECK(std::abs(quarter.psi) < 1e-15);

  CHECK(euler313_extract(Rotation::identity()).singular);
  CHECK(euler313_extract(Rotation::from_matrix(oracle::rot_x(pi))).singular);

  std::mt19937_64 rng(107);
  for (int i = 0; i < 200; ++i) {
    const Mat3 r = oracle::random_rotation(rng);
    const Euler313 e = euler313_extract(Rotation::from_matrix(r));
    REQUIRE_FALSE(e.singular);
    CHECK(e.theta > 0.0);
    CHECK(e.theta < pi);
    const Mat3 back = oracle::rot_z(e.phi) * oracle::rot_x(e.theta) * oracle::rot_z(e.psi);
    CHECK((back - r).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((e.matrix() - r).cwiseAbs().maxCoeff() < 1e-10);
  }
  // Singular case still reconstructs.
  const Euler313 s = euler313_extract(Rotation::from_matrix(oracle::rot_z(0.7)));
  CHECK(s.singular);
  CHECK((s.matrix() - oracle::rot_z(0.7)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("313 Euler rates") {
  Euler313 e;
  e.theta = pi / 2;
  const EulerRates r = euler_rates(e, Vec3(2, 3, 5));
  CHECK(r.phi_dot == doctest::Approx(3.0));
  CHECK(r.theta_dot == doctest::Approx(2.0));
  CHECK(r.psi_dot == doctest::Approx(5.0));
  CHECK(nutation_rate(e, Vec3(2, 3, 5)) == doctest::Approx(2.0));

  const EulerRates zero = euler_rates(euler313_extract(Rotation::from_matrix(oracle::rot_x(0.4))), Vec3::Zero());
  CHECK(zero.phi_dot == 0.0);
  CHECK(zero.theta_dot == 0.0);
  CHECK(zero.psi_dot == 0.0);

  Euler313 singular;
  singular.singular = true;
  CHECK_THROWS_AS(euler_rates(singular, Vec3(1, 2, 3)), SpectralError);

  auto wrap = [](double a) { return std::remainder(a, 2 * pi); };
  std::mt19937_64 rng(109);
  const double h = 1e-6;
  for (int i = 0; i < 50; ++i) {
    const Mat3 r0 = oracle::random_rotation(rng);
    const Vec3 w = oracle::random_vec(rng, -5, 5);
    auto angles = [&](double dt) {
      return euler313_extract(Rotation::trusted(r0 * oracle::expm_series(oracle::skew(w * dt))));
    };
    const Euler313 e0 = angles(0.0);
    if (std::sin(e0.theta) < 0.05) continue;
    const EulerRates rates = euler_rates(e0, w);
    const Euler313 p = angles(h);
    const Euler313 m = angles(-h);
    CHECK(rates.phi_dot == doctest::Approx(wrap(p.phi - m.phi) / (2 * h)).epsilon(1e-5).scale(1.0));
    CHECK(rates.theta_dot == doctest::Approx((p.theta - m.theta) / (2 * h)).epsilon(1e-5).scale(1.0));
    CHECK(rates.psi_dot == doctest::Approx(wrap(p.psi - m.psi) / (2 * h)).epsilon(1e-5).scale(1.0));
  }
}

TEST_CASE("nutation frequency estimate") {
  SUBCASE("computed spectrum") {
    const EigenStructure es = classified(kDesired);
    const NutationEstimate est = nutation_freq_estimate(1000.0, es);
    CHECK(est.pair_index == 0);
    CHECK(est.mu1 == doctest::Approx(1005.5).epsilon(1e-3));
    CHECK(est.frequency_hz == doctest::Approx(319.18).epsilon(1e-3));
  }
  SUBCASE("synthetic spectrum") {
    EigenStructure es;
    for (int i = 0; i < 6; ++i) es.pairs[i].lambda = cdouble(-100.0 * (i + 1), 0.0);
    es.pairs[0] = {cdouble(-5.0, 1e-300), Vec6c::Zero(), 4, true};
    es.pairs[4] = {cdouble(-5.0, -1e-300), Vec6c::Zero(), 0, true};
    es.pairs[1] = {cdouble(-2000.0, 40.0), Vec6c::Zero(), 5, true};
    es.pairs[5] = {cdouble(-2000.0, -40.0), Vec6c::Zero(), 1, true};
    CHECK(nutation_freq_estimate(1000.0, es).frequency_hz == doctest::Approx(1000.0 / (2 * pi)));
    es.pairs[0].admissible = false;
    es.pairs[4].admissible = false;
    CHECK(nutation_freq_estimate(1000.0, es).frequency_hz == doctest::Approx(1040.0 / (2 * pi)));
    es.pairs[1].admissible = false;
    CHECK_THROWS_AS(nutation_freq_estimate(1000.0, es), SpectralError);
  }
}

TEST_CASE("nutation rate reconstruction") {
  const EigenStructure es = classified(kDesired);
  const double wd = 1000.0;

  ModalCoefficients none;
  none.complex = {{0, 0.0}, {1, 0.0}};
  CHECK(nutation_rate_reconstruction(es, none, 0.3, wd, 0.01).full == 0.0);

  ModalCoefficients m;
  const cdouble c1(0.4, -0.7);
  const cdouble c2(0.2, 0.1);
  m.complex = {{0, c1}, {1, c2}};
  const double psi0 = 0.25;
  const double pi1 = es[0].lambda.real();
  const double mu1 = es[0].lambda.imag();
  const double pi2 = es[1].lambda.real();

  // Slow-mode form written with the C/D coefficients of the first pair.
  double cc[2], dd[2];
  for (int i = 0; i < 2; ++i) {
    const cdouble v = es[0].v[3 + i];
    cc[i] = c1.real() * v.real() - c1.imag() * v.imag();
    dd[i] = -c1.real() * v.imag() - c1.imag() * v.real();
  }
  const double cb1 = std::cos(psi0) * cc[0] - std::sin(psi0) * cc[1];
  const double db1 = std::cos(psi0) * dd[0] - std::sin(psi0) * dd[1];
  const double cb2 = std::cos(psi0) * cc[1] + std::sin(psi0) * cc[0];
  const double db2 = std::cos(psi0) * dd[1] + std::sin(psi0) * dd[0];
  const double fast_bound = 4.0 * std::abs(c2) * es[1].v.norm();

  for (double t : {0.0, 1e-4, 3e-3, 0.02, 0.1}) {
    const NutationRate r = nutation_rate_reconstruction(es, m, psi0, wd, t);
    const double slow = 2.0 * std::exp(pi1 * t) *
                        (std::cos(wd * t) * (cb1 * std::cos(mu1 * t) + db1 * std::sin(mu1 * t)) -
                         std::sin(wd * t) * (cb2 * std::cos(mu1 * t) + db2 * std::sin(mu1 * t)));
    CHECK(r.slow == doctest::Approx(slow).epsilon(1e-9).scale(1.0));
    CHECK(std::abs(r.full - r.slow) <= fast_bound * std::exp(pi2 * t) + 1e-12);
  }

  // Spectrum of the slow signal sits at the sum frequency.
  const double fs = 10000.0;
  std::vector<double> signal(10000);
  for (std::size_t i = 0; i < signal.size(); ++i) {
    signal[i] = nutation_rate_reconstruction(es, m, psi0, wd, static_cast<double>(i) / fs).slow;
  }
  const SpectralPeak peak = fft_peak(signal, fs);
  const double expected = (wd + mu1) / (2 * pi);
  CHECK(std::abs(peak.frequency_hz - expected) <= fs / signal.size());
}

TEST_CASE("fft_peak") {
  const double fs = 10000.0;
  std::vector<double> tone(10000), mix(10000);
  for (std::size_t i = 0; i < tone.size(); ++i) {
    const double t = static_cast<double>(i) / fs;
    tone[i] = std::sin(2 * pi * 100.0 * t);
    mix[i] = tone[i] + 0.1 * std::sin(2 * pi * 300.0 * t);
  }
  const SpectralPeak p = fft_peak(tone, fs);
  CHECK(std::abs(p.frequency_hz - 100.0) < 0.1);
  CHECK(p.magnitude == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(std::abs(fft_peak(mix, fs).frequency_hz - 100.0) < 0.1);
  CHECK(std::abs(fft_peak(mix, fs, std::pair{200.0, 400.0}).frequency_hz - 300.0) < 0.1);

  // Off-bin tone refined by the parabola.
  std::vector<double> off(4096);
  for (std::size_t i = 0; i < off.size(); ++i) off[i] = std::cos(2 * pi * 123.4 * static_cast<double>(i) / fs) + 5.0;
  CHECK(std::abs(fft_peak(off, fs).frequency_hz - 123.4) < fs / off.size() / 2);

  CHECK_THROWS_AS(fft_peak(std::vector<double>(2048, 3.0), fs), SpectralError);
  CHECK_THROWS_AS(fft_peak(std::vector<double>(100, 0.0), fs), SpectralError);
  CHECK_THROWS_AS(fft_peak(tone, fs, std::pair{4.0001e3, 4.0002e3}), SpectralError);
}
