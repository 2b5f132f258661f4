#pragma once

#include <complex>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

namespace sdq {

/// One standing-wave pair of counter-propagating resonator modes.
struct ModeEntry {
  double k = 1.0;                    ///< wavenumber (rad per unit length)
  double omega_k = 1.0;              ///< angular frequency of the +k branch
  double omega_minus = 1.0;          ///< angular frequency of the -k branch
  std::complex<double> u_plus{std::numbers::sqrt2 / 2.0, 0.0};
  std::complex<double> u_minus{std::numbers::sqrt2 / 2.0, 0.0};
};

struct ModeSet {
  std::vector<ModeEntry> modes;
  double kappa = 1.0;    ///< decay rate entering the mode susceptibility
  double phi_zpf = 1.0;  ///< zero-point flux (radians)
};

/// Flux-dependent imbalance between the +k and -k amplitudes.
struct AsymmetryModel {
  double zeta0 = 0.0;  ///< saturation value, |zeta0| < 1
  double phi_s = 1.0;  ///< saturation flux scale, > 0
};

struct ComplexCoupling {
  double j_r = 0.0;
  double j_nr = 0.0;
  double magnitude = 0.0;
  double phase = 0.0;  ///< atan2(j_nr, j_r), in (-pi, pi]

  static ComplexCoupling from_parts(double j_r, double j_nr);
  static ComplexCoupling from_polar(double magnitude, double phase);
};

void validate(const ModeSet& m);
void validate(const AsymmetryModel& a);

/// zeta = zeta0 * sign(phi_b) * tanh(|phi_b| / phi_s).
double mode_asymmetry(const AsymmetryModel& model, double phi_b);

/// Mode entry at `k` whose amplitudes are sqrt((1 +- zeta)/2).
ModeEntry asymmetric_mode(double k, double omega_k, double zeta);

/// Single-mode set with k chosen so that k (x2 - x1) = pi/2.
ModeSet default_mode_set(double omega_k, double kappa, double phi_zpf, double zeta, double port_separation = 1.0);

/// omega_{+k} - omega_{-k} generated by c3 at the flux-biased operating point.
double direction_shift(double c3, double phi_b, const ModeEntry& mode, double phi_zpf);
std::vector<double> direction_shift(double c3, double phi_b, const ModeSet& modes);

/// Bilinear two-mode matrix [[w_k + L_kk, L_k-k], [L_-kk, w_-k + L_-k-k]] for modes[index].
Eigen::Matrix2cd mode_mixing_matrix(double c3, double phi_b, const ModeSet& modes, std::size_t index = 0);

/// Retarded single-branch susceptibility 1 / ((omega - omega_k) + i kappa).
std::complex<double> mode_susceptibility(double omega, double omega_k, double kappa);

/// Qubit-qubit exchange mediated by the mode set between ports x_i and x_j.
ComplexCoupling qubit_coupling(double g, double omega, double x_i, double x_j, const ModeSet& modes,
                               double delta_omega);

}  // namespace sdq
