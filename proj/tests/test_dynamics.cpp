#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include <Eigen/Eigenvalues>

#include "sdq/dynamics.hpp"
#include "sdq/errors.hpp"
#include "oracles.hpp"

using namespace sdq;
using cplx = std::complex<double>;
using Eigen::Matrix4cd;

namespace {

constexpr double kPi = std::numbers::pi;

TwoQubitParams params(double phi, double gamma, double g1 = 0.0, double g2 = 0.0,
                      CollectiveModel model = CollectiveModel::Correlated) {
  TwoQubitParams p;
  p.coupling = ComplexCoupling::from_polar(1.0, phi);
  p.gamma_collective = gamma;
  p.gamma1 = {g1, g2};
  p.model = model;
  return p;
}

cplx expect(const Matrix4cd& rho, const Matrix4cd& op) { return (rho * op).trace(); }

// Wootters concurrence from the non-Hermitian product rho * rho_tilde.
double brute_concurrence(const Matrix4cd& rho) {
  Matrix4cd yy = Matrix4cd::Zero();
  yy(0, 3) = -1.0;
  yy(1, 2) = 1.0;
  yy(2, 1) = 1.0;
  yy(3, 0) = -1.0;
  const Matrix4cd r = rho * yy * rho.conjugate() * yy;
  Eigen::ComplexEigenSolver<Matrix4cd> es(r);
  std::vector<double> l;
  for (int i = 0; i < 4; ++i) l.push_back(std::sqrt(std::max(0.0, es.eigenvalues()(i).real())));
  std::sort(l.rbegin(), l.rend());
  return std::max(0.0, l[0] - l[1] - l[2] - l[3]);
}

Eigen::Vector4cd bell_psi(double sign) {
  Eigen::Vector4cd v = Eigen::Vector4cd::Zero();
  v(k01) = 1.0;
  v(k10) = sign;
  return v / std::sqrt(2.0);
}

}  // namespace

TEST_CASE("hamiltonian structure") {
  const auto h0 = build_hamiltonian(params(0.0, 0.0));
  CHECK(h0(k01, k10) == cplx(1.0, 0.0));
  CHECK(h0(k10, k01) == cplx(1.0, 0.0));
  CHECK(h0(k01, k01) == cplx(0.0, 0.0));

  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-kPi, kPi);
  for (int i = 0; i < 20; ++i) {
    auto p = params(u(rng), 0.0);
    p.coupling = ComplexCoupling::from_polar(0.5 + std::abs(u(rng)), p.coupling.phase);
    const auto h = build_hamiltonian(p);
    CHECK((h - h.adjoint()).cwiseAbs().maxCoeff() <= 1e-15);
    CHECK(std::abs(h(k00, k01)) + std::abs(h(k00, k10)) + std::abs(h(k11, k01)) + std::abs(h(k00, k11)) == 0.0);
    Eigen::Matrix2cd block;
    block << h(k01, k01), h(k01, k10), h(k10, k01), h(k10, k10);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(block);
    CHECK(es.eigenvalues()(0) == doctest::Approx(-p.coupling.magnitude).epsilon(1e-14));
    CHECK(es.eigenvalues()(1) == doctest::Approx(p.coupling.magnitude).epsilon(1e-14));
  }
}

TEST_CASE("rate matrices") {
  const auto pc = params(0.0, 0.5, 0.1, 0.2);
  Eigen::Matrix2d expected;
  expected << 0.6, 0.5, 0.5, 0.7;
  CHECK((rate_matrix(pc) - expected).cwiseAbs().maxCoeff() == 0.0);
  CHECK(rate_matrix_positive(pc));
  const auto px = params(0.0, 0.5, 0.1, 0.2, CollectiveModel::CrossOnly);
  CHECK(rate_matrix(px)(0, 0) == 0.1);
  CHECK_FALSE(rate_matrix_positive(px));
  CHECK(rate_matrix_positive(params(0.0, 0.1, 0.1, 0.2, CollectiveModel::CrossOnly)));
}

TEST_CASE("closed-system generator is the commutator") {
  std::mt19937_64 rng(4);
  const auto p = params(0.7, 0.0);
  const Matrix4cd rho = oracle::random_density(rng);
  const Matrix4cd h = build_hamiltonian(p);
  const Matrix4cd expected = -cplx(0, 1) * (h * rho - rho * h);
  CHECK((lindblad_rhs(p, rho) - expected).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("generator is trace-free and reproduces the population equation of motion") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (auto model : {CollectiveModel::Correlated, CollectiveModel::CrossOnly}) {
    for (int trial = 0; trial < 25; ++trial) {
      const auto p = params(2 * kPi * u(rng), 2 * u(rng), u(rng), u(rng), model);
      const Matrix4cd rho = oracle::random_density(rng);
      const Matrix4cd drho = lindblad_rhs(p, rho);
      CHECK(std::abs(drho.trace()) <= 1e-14);

      const Eigen::Matrix2d r = rate_matrix(p);
      const cplx k = std::polar(p.coupling.magnitude, p.coupling.phase);
      const cplx a12 = expect(rho, ops::sigma_plus(1) * ops::sigma_minus(2));
      const cplx a21 = expect(rho, ops::sigma_plus(2) * ops::sigma_minus(1));
      const double g = p.gamma_collective;
      const cplx dz1 = -r(0, 0) * (expect(rho, ops::sigma_z(1)) + 1.0) - 2.0 * cplx(0, 1) * (std::conj(k) * a12 - k * a21) -
                       g * (a12 + a21);
      const cplx dz2 = -r(1, 1) * (expect(rho, ops::sigma_z(2)) + 1.0) - 2.0 * cplx(0, 1) * (k * a21 - std::conj(k) * a12) -
                       g * (a12 + a21);
      CHECK(std::abs(expect(drho, ops::sigma_z(1)) - dz1) <= 1e-12);
      CHECK(std::abs(expect(drho, ops::sigma_z(2)) - dz2) <= 1e-12);
    }
  }
}

TEST_CASE("density-matrix trajectory matches direct expectation-value integration") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const std::vector<double> times = [] {
    std::vector<double> t;
    for (int i = 0; i <= 30; ++i) t.push_back(0.1 * i);
    return t;
  }();
  for (auto model : {CollectiveModel::Correlated, CollectiveModel::CrossOnly}) {
    for (int trial = 0; trial < 4; ++trial) {
      const auto p = params(2 * kPi * u(rng), 2 * u(rng), 0.3 * u(rng), 0.3 * u(rng), model);
      Eigen::Vector4cd psi = Eigen::Vector4cd::Zero();
      psi(k01) = cplx(u(rng), u(rng));
      psi(k10) = cplx(u(rng), u(rng));
      const auto rho0 = TwoQubitState::pure(psi);
      const auto result = evolve_at(p, rho0, times);
      const oracle::Moments m0{rho0.rho(k10, k10).real(), rho0.rho(k01, k01).real(), rho0.rho(k01, k10)};
      const auto ref = oracle::integrate_moments(p, m0, times, 1e-4);
      for (std::size_t i = 0; i < times.size(); ++i) {
        CHECK(std::abs(result.n1[i] - ref[i].n1) <= 1e-8);
        CHECK(std::abs(result.n2[i] - ref[i].n2) <= 1e-8);
      }
    }
  }
}

TEST_CASE("relaxation to the ground state") {
  const auto p = params(0.3, 0.0, 0.5, 0.5);
  DtPolicy policy;
  policy.samples = 11;
  const auto r = evolve(p, TwoQubitState::basis(k11), 20.0 / 0.5, policy);
  CHECK(r.final_rho(k00, k00).real() >= 0.999);
}

TEST_CASE("closed-system Rabi oscillation") {
  DtPolicy policy;
  policy.samples = 401;
  const auto r = evolve(params(0.4, 0.0), TwoQubitState::basis(k01), 2 * kPi, policy);
  for (std::size_t i = 0; i < r.times.size(); ++i) {
    const double s = std::sin(r.times[i]);
    CHECK(std::abs(r.n1[i] - s * s) <= 1e-9);
    CHECK(std::abs(r.n2[i] - (1 - s * s)) <= 1e-9);
  }
  const auto half = evolve_at(params(0.4, 0.0), TwoQubitState::basis(k01), {0.0, kPi / 2, kPi});
  CHECK(half.n1[1] == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(half.n2[2] == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("reciprocity at phi = 0 and mirror symmetry at phi = +-pi/2") {
  DtPolicy policy;
  policy.samples = 301;
  const auto a = evolve(params(0.0, 0.5), TwoQubitState::basis(k01), 6.0, policy);
  const auto b = evolve(params(0.0, 0.5), TwoQubitState::basis(k10), 6.0, policy);
  for (std::size_t i = 0; i < a.times.size(); ++i) {
    CHECK(std::abs(a.n1[i] - b.n2[i]) <= 1e-9);
    CHECK(std::abs(a.n2[i] - b.n1[i]) <= 1e-9);
  }
  const auto c = evolve(params(kPi / 2, 0.5), TwoQubitState::basis(k01), 6.0, policy);
  const auto d = evolve(params(-kPi / 2, 0.5), TwoQubitState::basis(k10), 6.0, policy);
  for (std::size_t i = 0; i < c.times.size(); ++i) {
    CHECK(std::abs(c.n1[i] - d.n2[i]) <= 1e-9);
    CHECK(std::abs(c.n2[i] - d.n1[i]) <= 1e-9);
  }
}

TEST_CASE("conservation properties") {
  DtPolicy policy;
  policy.samples = 201;
  policy.keep_snapshots = true;
  const auto open = evolve(params(1.0, 1.5, 0.2, 0.1), TwoQubitState::basis(k01), 8.0, policy);
  CHECK(open.max_trace_drift <= 1e-9);
  CHECK(open.max_hermiticity_error <= 1e-10);
  CHECK(open.physical);

  const auto p = params(0.9, 0.0);
  const auto closed = evolve(p, TwoQubitState::pure(bell_psi(1.0) + Eigen::Vector4cd::Unit(k01)), 8.0, policy);
  const Matrix4cd h = build_hamiltonian(p);
  const double e0 = expect(closed.rho_at.front(), h).real();
  for (const auto& rho : closed.rho_at) {
    CHECK(std::abs(expect(rho, h).real() - e0) <= 1e-9);
    CHECK(std::abs(rho(k00, k00)) + std::abs(rho(k11, k11)) <= 1e-10);
  }
}

TEST_CASE("phase gauge: phi and phi + 2 pi give the same dynamics") {
  DtPolicy policy;
  policy.samples = 51;
  const auto a = evolve(params(0.8, 0.7), TwoQubitState::basis(k01), 3.0, policy);
  const auto b = evolve(params(0.8 + 2 * kPi, 0.7), TwoQubitState::basis(k01), 3.0, policy);
  for (std::size_t i = 0; i < a.times.size(); ++i) {
    CHECK(std::abs(a.n1[i] - b.n1[i]) <= 1e-9);
    CHECK(std::abs(a.concurrence[i] - b.concurrence[i]) <= 1e-9);
  }
}

TEST_CASE("half-iSWAP produces the phase-tunable Bell state") {
  for (double phi : {0.0, kPi / 4, -kPi / 4, kPi / 2, -kPi / 2, 2.0}) {
    const auto s = half_iswap_state(params(phi, 0.0), TwoQubitState::basis(k01));
    const Eigen::Vector4cd target = half_iswap_target(phi);
    CHECK(target.dot(s.rho * target).real() >= 1 - 1e-9);
    CHECK(concurrence(s) == doctest::Approx(1.0).epsilon(1e-9));
  }
  const auto minus = half_iswap_state(params(kPi / 2, 0.0), TwoQubitState::basis(k01));
  CHECK(bell_psi(-1.0).dot(minus.rho * bell_psi(-1.0)).real() >= 1 - 1e-9);
  const auto plus = half_iswap_state(params(-kPi / 2, 0.0), TwoQubitState::basis(k01));
  CHECK(bell_psi(1.0).dot(plus.rho * bell_psi(1.0)).real() >= 1 - 1e-9);

  CHECK_THROWS_AS(half_iswap_state(params(0.0, 0.0), TwoQubitState::basis(k11)), ValidationError);
}

TEST_CASE("concurrence") {
  CHECK(concurrence(TwoQubitState::basis(k01)) == 0.0);
  CHECK(concurrence(TwoQubitState::pure(bell_psi(-1.0))) == doctest::Approx(1.0).epsilon(1e-12));
  const Matrix4cd singlet = TwoQubitState::pure(bell_psi(-1.0)).rho;
  for (double w : {0.2, 0.5, 0.8}) {
    const TwoQubitState werner{w * singlet + (1 - w) * Matrix4cd::Identity() / 4.0};
    const double closed = std::max(0.0, (3 * w - 1) / 2);
    CHECK(concurrence(werner) == doctest::Approx(closed).epsilon(1e-12));
    CHECK(concurrence(werner) == doctest::Approx(brute_concurrence(werner.rho)).epsilon(1e-10));
  }
  std::mt19937_64 rng(21);
  for (int i = 0; i < 20; ++i) {
    const TwoQubitState s{oracle::random_density(rng)};
    CHECK(std::abs(concurrence(s) - brute_concurrence(s.rho)) <= 1e-8);
  }
  // Rank-two X state: C = 2 (1 - p) |a b| exactly.
  for (double p : {0.0, 0.3, 0.7}) {
    Eigen::Vector4cd psi = Eigen::Vector4cd::Zero();
    psi(k01) = std::polar(std::sqrt(0.8), 0.4);
    psi(k10) = std::polar(std::sqrt(0.2), -1.1);
    Matrix4cd rho = (1 - p) * psi * psi.adjoint();
    rho(k00, k00) += p;
    CHECK(std::abs(concurrence(TwoQubitState{rho}) - 2 * (1 - p) * 0.4) <= 1e-13);
  }
  Matrix4cd bad = Matrix4cd::Zero();
  bad(k00, k00) = 1.2;
  bad(k11, k11) = -0.2;
  CHECK_THROWS_AS(concurrence(TwoQubitState{bad}), NonPhysicalState);
}

TEST_CASE("contrast map structure") {
  std::vector<double> phis;
  for (int i = -4; i <= 4; ++i) phis.push_back(i * kPi / 4);
  std::vector<double> gammas;
  for (int i = 0; i <= 8; ++i) gammas.push_back(0.5 * i);
  const auto m = contrast_map(params(0.0, 0.0), phis, gammas, kPi / 4, 2);
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    CHECK(std::abs(m(4, j)) <= 1e-9);
    for (Eigen::Index i = 0; i < m.rows(); ++i) CHECK(std::abs(m(i, j) + m(8 - i, j)) <= 1e-9);
  }
  Eigen::Index r = 0;
  Eigen::Index c = 0;
  m.cwiseAbs().maxCoeff(&r, &c);
  CHECK(std::abs(std::abs(phis[r]) - kPi / 2) < 1e-12);
  CHECK(gammas[c] == 2.0);

  std::vector<double> times{0.0, 0.5, kPi / 4, 1.5};
  const auto tm = contrast_time_map(params(0.0, 2.0), phis, times, 2);
  CHECK(tm(6, 2) == doctest::Approx(m(6, 4)).epsilon(1e-8));
  for (Eigen::Index i = 0; i < tm.rows(); ++i) CHECK(tm(i, 0) == 0.0);
}

TEST_CASE("cross-only model flags the non-positive rate matrix") {
  const auto r = evolve(params(kPi / 2, 1.0, 0.0, 0.0, CollectiveModel::CrossOnly), TwoQubitState::basis(k01), 1.0);
  REQUIRE_FALSE(r.warnings.empty());
  CHECK(r.warnings.front().rfind("NonPositiveRateMatrix", 0) == 0);
  const auto ok = evolve(params(kPi / 2, 1.0), TwoQubitState::basis(k01), 1.0);
  CHECK(ok.warnings.empty());
}

TEST_CASE("parameter and state validation") {
  auto p = params(0.0, -0.1);
  CHECK_THROWS_AS(validate(p), ValidationError);
  p = params(0.0, 0.1, -1.0);
  CHECK_THROWS_AS(validate(p), ValidationError);
  Matrix4cd rho = Matrix4cd::Zero();
  rho(0, 0) = 0.5;
  CHECK_THROWS_AS(validate(TwoQubitState{rho}), ValidationError);
  rho(0, 0) = 1.0;
  rho(0, 1) = 0.3;
  CHECK_THROWS_AS(validate(TwoQubitState{rho}), ValidationError);
  CHECK_THROWS_AS(evolve_at(params(0.0, 0.0), TwoQubitState::basis(k01), {0.5, 1.0}), ValidationError);
}
