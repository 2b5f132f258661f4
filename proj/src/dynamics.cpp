#include "sdq/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <numbers>

#include <boost/numeric/odeint.hpp>

#include "sdq/errors.hpp"
#include "sdq/parallel.hpp"

namespace sdq {
namespace {

using cplx = std::complex<double>;
using Matrix4cd = Eigen::Matrix4cd;
using OdeState = std::array<double, 32>;

constexpr cplx kI{0.0, 1.0};
constexpr double kConcurrenceCutoff = 1e-14;

Matrix4cd kron(const Eigen::Matrix2cd& a, const Eigen::Matrix2cd& b) {
  Matrix4cd out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
  return out;
}

struct Operators {
  std::array<Matrix4cd, 2> minus;
  std::array<Matrix4cd, 2> plus;
  std::array<Matrix4cd, 2> z;

  Operators() {
    Eigen::Matrix2cd lower = Eigen::Matrix2cd::Zero();
    lower(0, 1) = 1.0;  // |0><1|
    const Eigen::Matrix2cd id = Eigen::Matrix2cd::Identity();
    Eigen::Matrix2cd pz = Eigen::Matrix2cd::Zero();
    pz(0, 0) = -1.0;
    pz(1, 1) = 1.0;
    minus = {kron(lower, id), kron(id, lower)};
    plus = {minus[0].adjoint(), minus[1].adjoint()};
    z = {kron(pz, id), kron(id, pz)};
  }
};

const Operators& operators() {
  static const Operators instance;
  return instance;
}

void pack(const Matrix4cd& m, OdeState& x) {
  for (int i = 0; i < 16; ++i) {
    x[2 * i] = m(i / 4, i % 4).real();
    x[2 * i + 1] = m(i / 4, i % 4).imag();
  }
}

Matrix4cd unpack(const OdeState& x) {
  Matrix4cd m;
  for (int i = 0; i < 16; ++i) m(i / 4, i % 4) = cplx(x[2 * i], x[2 * i + 1]);
  return m;
}

double min_eigenvalue(const Matrix4cd& rho) {
  const Matrix4cd herm = 0.5 * (rho + rho.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix4cd> es(herm, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

int qubit_index(int qubit) {
  if (qubit != 1 && qubit != 2) throw ValidationError("qubit label must be 1 or 2");
  return qubit - 1;
}

}  // namespace

namespace ops {
const Matrix4cd& sigma_minus(int qubit) { return operators().minus[qubit_index(qubit)]; }
const Matrix4cd& sigma_plus(int qubit) { return operators().plus[qubit_index(qubit)]; }
const Matrix4cd& sigma_z(int qubit) { return operators().z[qubit_index(qubit)]; }
}  // namespace ops

TwoQubitState TwoQubitState::basis(int index) {
  TwoQubitState s;
  s.rho(index, index) = 1.0;
  return s;
}

TwoQubitState TwoQubitState::pure(const Eigen::Vector4cd& psi) {
  const Eigen::Vector4cd v = psi.normalized();
  return {v * v.adjoint()};
}

void validate(const TwoQubitParams& p) {
  if (!(p.gamma1[0] >= 0.0) || !(p.gamma1[1] >= 0.0)) throw ValidationError("qubits.gamma1 must be >= 0");
  if (!(p.gamma_collective >= 0.0)) throw ValidationError("qubits.gamma_collective must be >= 0");
  if (!std::isfinite(p.coupling.magnitude) || !std::isfinite(p.coupling.phase)) {
    throw ValidationError("qubits.coupling must be finite");
  }
}

void validate(const TwoQubitState& s) {
  if ((s.rho - s.rho.adjoint()).cwiseAbs().maxCoeff() > 1e-12) throw ValidationError("state: rho must be Hermitian");
  if (std::abs(s.rho.trace() - 1.0) > 1e-10) throw ValidationError("state: trace(rho) must equal 1");
  if (min_eigenvalue(s.rho) < -1e-10) throw ValidationError("state: rho must be positive semidefinite");
}

Matrix4cd build_hamiltonian(const TwoQubitParams& p) {
  const auto& o = operators();
  const cplx j = std::polar(p.coupling.magnitude, p.coupling.phase);
  const Matrix4cd exchange = j * o.minus[0] * o.plus[1];
  return 0.5 * p.omega1 * o.z[0] + 0.5 * p.omega2 * o.z[1] + exchange + Matrix4cd(exchange.adjoint());
}

Eigen::Matrix2d rate_matrix(const TwoQubitParams& p) {
  const double g = p.gamma_collective;
  const double diag = p.model == CollectiveModel::Correlated ? g : 0.0;
  Eigen::Matrix2d r;
  r << p.gamma1[0] + diag, g, g, p.gamma1[1] + diag;
  return r;
}

bool rate_matrix_positive(const TwoQubitParams& p) {
  const auto r = rate_matrix(p);
  return r(0, 0) >= 0.0 && r(1, 1) >= 0.0 && r(0, 0) * r(1, 1) - r(0, 1) * r(1, 0) >= -1e-15;
}

LindbladGenerator::LindbladGenerator(const TwoQubitParams& p) : h_(build_hamiltonian(p)), rates_(rate_matrix(p)) {
  const auto& o = operators();
  Matrix4cd decay = Matrix4cd::Zero();
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) decay += rates_(i, j) * o.plus[i] * o.minus[j];
  h_eff_ = h_ - 0.5 * kI * decay;
}

Matrix4cd LindbladGenerator::operator()(const Matrix4cd& rho) const {
  const auto& o = operators();
  Matrix4cd out = -kI * (h_eff_ * rho - rho * h_eff_.adjoint());
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      if (rates_(i, j) != 0.0) out += rates_(i, j) * o.minus[j] * rho * o.plus[i];
    }
  }
  return out;
}

Matrix4cd lindblad_rhs(const TwoQubitParams& p, const Matrix4cd& rho) { return LindbladGenerator(p)(rho); }

std::array<double, 2> populations(const Matrix4cd& rho) {
  return {rho(k10, k10).real() + rho(k11, k11).real(), rho(k01, k01).real() + rho(k11, k11).real()};
}

DynamicsResult evolve(const TwoQubitParams& p, const TwoQubitState& rho0, double t_final, const DtPolicy& policy) {
  if (!(t_final >= 0.0)) throw ValidationError("t_final must be >= 0");
  const std::size_t n = std::max<std::size_t>(policy.samples, 2);
  std::vector<double> times(n);
  for (std::size_t i = 0; i < n; ++i) times[i] = t_final * static_cast<double>(i) / static_cast<double>(n - 1);
  return evolve_at(p, rho0, times, policy);
}

DynamicsResult evolve_at(const TwoQubitParams& p, const TwoQubitState& rho0, const std::vector<double>& times,
                         const DtPolicy& policy) {
  namespace odeint = boost::numeric::odeint;
  validate(p);
  validate(rho0);
  if (times.empty() || times.front() != 0.0) throw ValidationError("evolve: sample times must start at 0");
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (!(times[i] >= times[i - 1])) throw ValidationError("evolve: sample times must be ascending");
  }

  DynamicsResult result;
  if (!rate_matrix_positive(p)) {
    result.warnings.emplace_back("NonPositiveRateMatrix: collective rate matrix has a negative eigenvalue");
  }

  const LindbladGenerator generator(p);
  const auto rhs = [&generator](const OdeState& x, OdeState& dxdt, double) { pack(generator(unpack(x)), dxdt); };

  auto observe = [&](const OdeState& x, double t) {
    const Matrix4cd rho = unpack(x);
    const auto n = populations(rho);
    result.times.push_back(t);
    result.n1.push_back(n[0]);
    result.n2.push_back(n[1]);
    result.max_trace_drift = std::max(result.max_trace_drift, std::abs(rho.trace() - 1.0));
    result.max_hermiticity_error =
        std::max(result.max_hermiticity_error, (rho - rho.adjoint()).cwiseAbs().maxCoeff());
    const double lowest = min_eigenvalue(rho);
    result.min_eigenvalue = std::min(result.min_eigenvalue, lowest);
    double c = 0.0;
    try {
      c = concurrence({0.5 * (rho + rho.adjoint())});
    } catch (const NonPhysicalState&) {
      c = std::numeric_limits<double>::quiet_NaN();
    }
    result.concurrence.push_back(c);
    if (policy.keep_snapshots) result.rho_at.push_back(rho);
    result.final_rho = rho;
  };

  OdeState x{};
  pack(rho0.rho, x);
  if (times.back() == 0.0) {
    for (std::size_t i = 0; i < times.size(); ++i) observe(x, 0.0);
  } else {
    auto stepper = odeint::make_controlled(policy.atol, policy.rtol, odeint::runge_kutta_dopri5<OdeState>());
    const double dt0 = std::min(1e-3, times.back() / 10.0);
    try {
      odeint::integrate_times(stepper, rhs, x, times.begin(), times.end(), dt0, observe,
                              odeint::max_step_checker(1000000));
    } catch (const std::exception& e) {
      throw StepFailure(std::string("evolve: adaptive integrator failed: ") + e.what());
    }
  }

  if (result.min_eigenvalue < -1e-6) {
    result.physical = false;
    result.warnings.emplace_back("NonPhysicalState: rho developed eigenvalue " +
                                 std::to_string(result.min_eigenvalue));
  }
  return result;
}

TwoQubitState half_iswap_state(const TwoQubitParams& p, const TwoQubitState& rho0) {
  const double leak = std::abs(rho0.rho(k00, k00)) + std::abs(rho0.rho(k11, k11));
  if (leak > 1e-12) throw ValidationError("half_iswap_state: initial state must lie in the single-excitation sector");
  if (!(p.coupling.magnitude > 0.0)) throw ValidationError("half_iswap_state: |J| must be > 0");
  const double t = std::numbers::pi / (4.0 * p.coupling.magnitude);
  DtPolicy policy;
  policy.samples = 2;
  return {evolve(p, rho0, t, policy).final_rho};
}

Eigen::Vector4cd half_iswap_target(double phi) {
  Eigen::Vector4cd psi = Eigen::Vector4cd::Zero();
  psi(k10) = 1.0;
  psi(k01) = kI * std::polar(1.0, phi);
  return psi / std::numbers::sqrt2;
}

double concurrence(const TwoQubitState& s) {
  Eigen::SelfAdjointEigenSolver<Matrix4cd> es(s.rho);
  if (es.eigenvalues().minCoeff() < -1e-8) throw NonPhysicalState("concurrence: rho has a negative eigenvalue");
  // rho = V V^dagger; the Wootters lambdas are the singular values of V^T (sy x sy) V.
  // Eigenvalues at round-off level are zeroed so rank-deficient states do not pick
  // up sqrt(round-off) noise.
  Eigen::Vector4d root = Eigen::Vector4d::Zero();
  for (int i = 0; i < 4; ++i) {
    const double mu = es.eigenvalues()(i);
    if (mu > kConcurrenceCutoff) root(i) = std::sqrt(mu);
  }
  const Matrix4cd v = es.eigenvectors() * root.asDiagonal();
  Matrix4cd yy = Matrix4cd::Zero();
  yy(0, 3) = -1.0;
  yy(1, 2) = 1.0;
  yy(2, 1) = 1.0;
  yy(3, 0) = -1.0;
  const Matrix4cd tau = v.transpose() * yy * v;
  Eigen::JacobiSVD<Matrix4cd> svd(tau);
  const Eigen::Vector4d lambda = svd.singularValues();  // descending
  const double c = lambda(0) - lambda(1) - lambda(2) - lambda(3);
  return std::clamp(c, 0.0, 1.0);
}

Eigen::MatrixXd contrast_map(const TwoQubitParams& base, const std::vector<double>& phi_grid,
                             const std::vector<double>& gamma_grid, double t_eval, unsigned threads) {
  if (phi_grid.empty() || gamma_grid.empty()) throw ValidationError("contrast_map: grids must be nonempty");
  Eigen::MatrixXd out(phi_grid.size(), gamma_grid.size());
  const std::size_t cols = gamma_grid.size();
  DtPolicy policy;
  policy.samples = 2;
  parallel_for(phi_grid.size() * cols, threads, [&](std::size_t cell) {
    TwoQubitParams p = base;
    p.coupling = ComplexCoupling::from_polar(base.coupling.magnitude, phi_grid[cell / cols]);
    p.gamma_collective = gamma_grid[cell % cols];
    const auto a = evolve(p, TwoQubitState::basis(k01), t_eval, policy);
    const auto b = evolve(p, TwoQubitState::basis(k10), t_eval, policy);
    out(cell / cols, cell % cols) = a.concurrence.back() - b.concurrence.back();
  });
  return out;
}

Eigen::MatrixXd contrast_time_map(const TwoQubitParams& base, const std::vector<double>& phi_grid,
                                  const std::vector<double>& times, unsigned threads) {
  if (phi_grid.empty() || times.empty()) throw ValidationError("contrast_time_map: grids must be nonempty");
  Eigen::MatrixXd out(phi_grid.size(), times.size());
  parallel_for(phi_grid.size(), threads, [&](std::size_t row) {
    TwoQubitParams p = base;
    p.coupling = ComplexCoupling::from_polar(base.coupling.magnitude, phi_grid[row]);
    const auto a = evolve_at(p, TwoQubitState::basis(k01), times);
    const auto b = evolve_at(p, TwoQubitState::basis(k10), times);
    for (std::size_t i = 0; i < times.size(); ++i) out(row, i) = a.concurrence[i] - b.concurrence[i];
  });
  return out;
}

}  // namespace sdq
