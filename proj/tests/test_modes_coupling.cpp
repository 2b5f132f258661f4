#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "sdq/errors.hpp"
#include "sdq/modes_coupling.hpp"
#include "sdq/squid_diode.hpp"

using namespace sdq;
using cplx = std::complex<double>;

namespace {

constexpr double kPi = std::numbers::pi;

double c3_at(double tau1, double tau2, double phi_b) {
  SquidConfig s;
  s.j1.tau = tau1;
  s.j2.tau = tau2;
  s.phi_b = phi_b;
  return characterize(s).c[2];
}

}  // namespace

TEST_CASE("mode asymmetry") {
  const AsymmetryModel m{0.5, 1.0};
  CHECK(mode_asymmetry(m, 0.0) == 0.0);
  CHECK(mode_asymmetry(m, 1e6) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(mode_asymmetry(m, 1.0) == doctest::Approx(0.5 * std::tanh(1.0)).epsilon(1e-15));
  CHECK(mode_asymmetry(m, 1.0) == doctest::Approx(0.3808).epsilon(1e-4));
  CHECK(mode_asymmetry(m, -0.7) == -mode_asymmetry(m, 0.7));

  const auto e = asymmetric_mode(1.0, 1.0, mode_asymmetry(m, 0.8));
  CHECK(std::norm(e.u_plus) + std::norm(e.u_minus) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK_THROWS_AS(validate(AsymmetryModel{1.0, 1.0}), ValidationError);
  CHECK_THROWS_AS(validate(AsymmetryModel{0.5, 0.0}), ValidationError);
}

TEST_CASE("direction shift") {
  const AsymmetryModel m{0.4, 0.5};
  auto shift = [&](double tau1, double tau2, double b) {
    const auto modes = default_mode_set(1.0, 0.01, 0.3, mode_asymmetry(m, b));
    return direction_shift(c3_at(tau1, tau2, b), b, modes)[0];
  };
  CHECK(shift(0.9, 0.8, 0.0) == 0.0);
  for (double b : {0.2, 0.9, 1.7}) CHECK(std::abs(shift(0.7, 0.7, b)) <= 1e-12);
  for (double b : {0.2, 0.6, 1.0, 1.4, 2.2}) {
    const double p = shift(0.9, 0.8, b);
    const double n = shift(0.9, 0.8, -b);
    CHECK(std::abs(p) > 0.0);
    CHECK(std::signbit(p) != std::signbit(n));
    CHECK(std::abs(p + n) <= 1e-12);
  }
  // Linear in zeta for fixed c3.
  const double c3 = c3_at(0.9, 0.8, 0.6);
  double ratios[3];
  const double zetas[3] = {0.01, 0.02, 0.04};
  for (int i = 0; i < 3; ++i) {
    const auto modes = default_mode_set(1.0, 0.01, 0.3, zetas[i]);
    ratios[i] = direction_shift(c3, 0.6, modes)[0] / zetas[i];
  }
  CHECK(ratios[1] == doctest::Approx(ratios[0]).epsilon(1e-12));
  CHECK(ratios[2] == doctest::Approx(ratios[0]).epsilon(1e-12));
}

TEST_CASE("mode mixing matrix") {
  auto modes = default_mode_set(1.0, 0.01, 0.3, 0.2);
  const auto m0 = mode_mixing_matrix(0.7, 0.0, modes);
  CHECK(m0(0, 0) == cplx(1.0, 0.0));
  CHECK(m0(1, 1) == cplx(1.0, 0.0));
  CHECK(m0(0, 1) == cplx(0.0, 0.0));

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 20; ++i) {
    ModeSet ms = modes;
    const cplx a(u(rng), u(rng));
    const cplx b(u(rng), u(rng));
    const double norm = std::sqrt(std::norm(a) + std::norm(b));
    ms.modes[0].u_plus = a / norm;
    ms.modes[0].u_minus = b / norm;
    const auto m = mode_mixing_matrix(u(rng), u(rng), ms);
    CHECK((m - m.adjoint()).cwiseAbs().maxCoeff() <= 1e-14);
  }
}

TEST_CASE("mode mixing eigen-split approaches the diagonal gap as c3 -> 0") {
  auto modes = default_mode_set(1.0, 0.01, 0.5, 0.3);
  modes.modes[0].omega_minus = 0.99;
  const double phi_b = 0.8;
  double previous = INFINITY;
  for (double c3 : {1e-2, 1e-3, 1e-4}) {
    const auto m = mode_mixing_matrix(c3, phi_b, modes);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(m);
    const double eig_split = es.eigenvalues()(1) - es.eigenvalues()(0);
    const double diag_gap = std::abs((m(0, 0) - m(1, 1)).real());
    const double deviation = std::abs(eig_split / diag_gap - 1.0);
    CHECK(deviation < previous);
    previous = deviation;
  }
  CHECK(previous < 1e-6);
}

TEST_CASE("complex coupling invariants") {
  const auto c = ComplexCoupling::from_parts(0.3, -0.4);
  CHECK(c.magnitude * c.magnitude == doctest::Approx(0.3 * 0.3 + 0.4 * 0.4).epsilon(1e-15));
  CHECK(c.phase == doctest::Approx(std::atan2(-0.4, 0.3)));
  const auto p = ComplexCoupling::from_polar(2.0, kPi / 3);
  CHECK(p.j_r == doctest::Approx(1.0));
  CHECK(p.j_nr == doctest::Approx(std::sqrt(3.0)));
}

TEST_CASE("qubit coupling: delta_omega = 0 gives a real coupling") {
  const auto modes = default_mode_set(1.0, 0.01, 0.3, 0.2);
  for (double w : {0.98, 1.0, 1.03}) {
    const auto c = qubit_coupling(0.05, w, 0.0, 0.3, modes, 0.0);
    CHECK(c.j_nr == 0.0);
    CHECK((c.phase == 0.0 || std::abs(c.phase) == doctest::Approx(kPi)));
  }
}

TEST_CASE("qubit coupling symmetries under port exchange") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.1, 0.9);
  for (int i = 0; i < 20; ++i) {
    ModeSet ms;
    ms.kappa = 0.02 * u(rng);
    ms.phi_zpf = 0.3;
    for (int k = 0; k < 3; ++k) ms.modes.push_back(asymmetric_mode(2.0 * u(rng), 1.0 + 0.1 * u(rng), u(rng) - 0.5));
    const double w = 1.0 + 0.05 * (u(rng) - 0.5);
    const double dw = 1e-3 * u(rng);
    const auto a = qubit_coupling(0.05, w, 0.1, 0.9, ms, dw);
    const auto b = qubit_coupling(0.05, w, 0.9, 0.1, ms, dw);
    CHECK(a.j_r == doctest::Approx(b.j_r).epsilon(1e-14));
    CHECK(a.j_nr == doctest::Approx(-b.j_nr).epsilon(1e-14));
    CHECK(a.phase == doctest::Approx(-b.phase).epsilon(1e-14));
    CHECK(std::abs(a.phase) <= kPi);
    CHECK(a.magnitude * a.magnitude == doctest::Approx(a.j_r * a.j_r + a.j_nr * a.j_nr).epsilon(1e-15));
  }
}

TEST_CASE("qubit coupling: j_nr is odd in the flux bias through delta_omega") {
  const AsymmetryModel m{0.4, 0.5};
  for (double b : {0.3, 1.2}) {
    const auto mp = default_mode_set(1.0, 0.01, 0.3, mode_asymmetry(m, b));
    const auto mm = default_mode_set(1.0, 0.01, 0.3, mode_asymmetry(m, -b));
    const double dp = direction_shift(c3_at(0.9, 0.8, b), b, mp)[0];
    const double dm = direction_shift(c3_at(0.9, 0.8, -b), -b, mm)[0];
    const auto cp = qubit_coupling(0.05, 1.0, 0.0, 1.0, mp, dp);
    const auto cm = qubit_coupling(0.05, 1.0, 0.0, 1.0, mm, dm);
    CHECK(cp.j_nr == doctest::Approx(-cm.j_nr).epsilon(1e-10));
  }
}

TEST_CASE("qubit coupling: phase is continuous across delta_omega = 0 when j_r > 0") {
  const auto modes = default_mode_set(1.0, 0.01, 0.3, 0.0);
  // Above resonance Re chi > 0, and k d = pi/4 keeps cos and sin positive.
  const double w = 1.02;
  const double d = 0.5;
  const auto lo = qubit_coupling(0.05, w, 0.0, d, modes, -1e-9);
  const auto mid = qubit_coupling(0.05, w, 0.0, d, modes, 0.0);
  const auto hi = qubit_coupling(0.05, w, 0.0, d, modes, 1e-9);
  CHECK(mid.j_r > 0.0);
  CHECK(std::abs(lo.phase - mid.phase) < 1e-6);
  CHECK(std::abs(hi.phase - mid.phase) < 1e-6);
}

TEST_CASE("qubit coupling matches a direct +-k Green's function sum") {
  // Single mode, k d = pi/2, omega = omega_k. Branches +k and -k carry unit
  // weight and sit at omega_k + dw/2 and omega_k - dw/2.
  const double g = 0.05;
  const double kappa = 0.01;
  const double dw = 1e-6 * kappa;
  const double omega_k = 1.0;
  const auto modes = default_mode_set(omega_k, kappa, 0.3, 0.0);
  const double k = modes.modes[0].k;
  const double xi = 0.0;
  const double xj = 1.0;
  REQUIRE(k * (xj - xi) == doctest::Approx(kPi / 2));

  cplx sum = 0.0;
  for (int s : {+1, -1}) {
    const double wb = omega_k + s * dw / 2;
    const cplx chi = 1.0 / cplx(omega_k - wb, kappa);
    const cplx psi_i = std::polar(1.0, s * k * xi);
    const cplx psi_j = std::polar(1.0, s * k * xj);
    sum += psi_i * chi * std::conj(psi_j);
  }
  const double direct = g * g * sum.imag();
  const auto c = qubit_coupling(g, omega_k, xi, xj, modes, dw);
  CHECK(c.j_nr == doctest::Approx(g * g * dw / (kappa * kappa)).epsilon(1e-12));
  // The direct sum cancels two terms of size 1/kappa, losing about kappa/dw of precision.
  CHECK(std::abs(c.j_nr - direct) <= 1e-7 * std::abs(direct));
}

TEST_CASE("mode set validation") {
  ModeSet empty;
  CHECK_THROWS_AS(validate(empty), EmptyModeSet);
  CHECK_THROWS_AS(qubit_coupling(0.1, 1.0, 0.0, 1.0, empty, 0.0), EmptyModeSet);
  auto ms = default_mode_set(1.0, 0.01, 0.3, 0.0);
  CHECK_THROWS_AS(qubit_coupling(0.1, 1.0, 0.5, 0.5, ms, 0.0), ValidationError);
  ms.modes[0].u_plus = 1.0;
  CHECK_THROWS_AS(validate(ms), ValidationError);
}
