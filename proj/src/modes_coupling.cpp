#include "sdq/modes_coupling.hpp"

#include <cmath>
#include <numbers>

#include "sdq/errors.hpp"

namespace sdq {

ComplexCoupling ComplexCoupling::from_parts(double j_r, double j_nr) {
  return {j_r, j_nr, std::hypot(j_r, j_nr), std::atan2(j_nr, j_r)};
}

ComplexCoupling ComplexCoupling::from_polar(double magnitude, double phase) {
  return {magnitude * std::cos(phase), magnitude * std::sin(phase), magnitude, phase};
}

void validate(const ModeSet& m) {
  if (m.modes.empty()) throw EmptyModeSet("mode set has no modes");
  if (!(m.kappa > 0.0)) throw ValidationError("modes.kappa must be > 0");
  for (const auto& e : m.modes) {
    if (!(e.omega_k > 0.0) || !(e.omega_minus > 0.0)) throw ValidationError("modes.omega_k must be > 0");
    const double norm = std::norm(e.u_plus) + std::norm(e.u_minus);
    if (std::abs(norm - 1.0) > 1e-12) throw ValidationError("modes: |u+|^2 + |u-|^2 must equal 1");
  }
}

void validate(const AsymmetryModel& a) {
  if (!(std::abs(a.zeta0) < 1.0)) throw ValidationError("asymmetry.zeta0 must satisfy |zeta0| < 1");
  if (!(a.phi_s > 0.0)) throw ValidationError("asymmetry.phi_s must be > 0");
}

double mode_asymmetry(const AsymmetryModel& model, double phi_b) {
  if (phi_b == 0.0) return 0.0;
  const double sign = phi_b > 0.0 ? 1.0 : -1.0;
  return model.zeta0 * sign * std::tanh(std::abs(phi_b) / model.phi_s);
}

ModeEntry asymmetric_mode(double k, double omega_k, double zeta) {
  ModeEntry e;
  e.k = k;
  e.omega_k = omega_k;
  e.omega_minus = omega_k;
  e.u_plus = std::sqrt(0.5 * (1.0 + zeta));
  e.u_minus = std::sqrt(0.5 * (1.0 - zeta));
  return e;
}

ModeSet default_mode_set(double omega_k, double kappa, double phi_zpf, double zeta, double port_separation) {
  ModeSet m;
  m.modes.push_back(asymmetric_mode(0.5 * std::numbers::pi / port_separation, omega_k, zeta));
  m.kappa = kappa;
  m.phi_zpf = phi_zpf;
  return m;
}

double direction_shift(double c3, double phi_b, const ModeEntry& mode, double phi_zpf) {
  // Mean-field flux C = phi_b in natural units.
  const double prefactor = 0.5 * phi_b * c3 * phi_zpf * phi_zpf * phi_zpf;
  return prefactor * (std::norm(mode.u_plus) - std::norm(mode.u_minus));
}

std::vector<double> direction_shift(double c3, double phi_b, const ModeSet& modes) {
  std::vector<double> out;
  out.reserve(modes.modes.size());
  for (const auto& e : modes.modes) out.push_back(direction_shift(c3, phi_b, e, modes.phi_zpf));
  return out;
}

Eigen::Matrix2cd mode_mixing_matrix(double c3, double phi_b, const ModeSet& modes, std::size_t index) {
  if (index >= modes.modes.size()) throw EmptyModeSet("mode index out of range");
  const auto& e = modes.modes[index];
  const double prefactor = 0.5 * phi_b * c3 * std::pow(modes.phi_zpf, 3);
  const std::complex<double> psi[2] = {e.u_plus, e.u_minus};
  Eigen::Matrix2cd m;
  for (int r = 0; r < 2; ++r) {
    for (int c = 0; c < 2; ++c) m(r, c) = prefactor * std::conj(psi[r]) * psi[c];
  }
  m(0, 0) += e.omega_k;
  m(1, 1) += e.omega_minus;
  return m;
}

std::complex<double> mode_susceptibility(double omega, double omega_k, double kappa) {
  return 1.0 / std::complex<double>(omega - omega_k, kappa);
}

ComplexCoupling qubit_coupling(double g, double omega, double x_i, double x_j, const ModeSet& modes,
                               double delta_omega) {
  validate(modes);
  if (!(g > 0.0)) throw ValidationError("coupling g must be > 0");
  if (x_i == x_j) throw ValidationError("port positions must differ");
  const double separation = x_j - x_i;
  double j_r = 0.0;
  double j_nr = 0.0;
  for (const auto& e : modes.modes) {
    const auto chi = mode_susceptibility(omega, e.omega_k, modes.kappa);
    const double weight = std::norm(e.u_plus) + std::norm(e.u_minus);
    j_r += chi.real() * weight * std::cos(e.k * separation);
    j_nr += std::norm(chi) * std::sin(e.k * separation) * delta_omega;
  }
  return ComplexCoupling::from_parts(g * g * j_r, g * g * j_nr);
}

}  // namespace sdq
