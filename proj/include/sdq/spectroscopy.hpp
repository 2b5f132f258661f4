#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

namespace sdq {

enum class Direction { Forward, Backward };

/// Lumped-element resonator with a diode-split kinetic inductance.
///
/// Any consistent unit system works; the CLI uses natural units where
/// omega_r = 1 and currents are in nA.
struct CircuitConfig {
  double l0 = 1.0;
  double c_shunt = 1.0;
  double r_loss = 0.0;
  double z0 = 1.0;
  double omega_r = 1.0;  ///< must equal 1/sqrt(l0 c_shunt)
  double kappa1 = 0.5e-4;
  double kappa2 = 0.5e-4;
  double lambda_kerr = 0.0;
  double i_applied = 0.0;
  double ic_plus = 1.0;
  double ic_minus = 1.0;

  double kappa() const { return kappa1 + kappa2; }
};

struct DriveConfig {
  double eps_pump = 0.0;
  double omega_pump = 1.0;
  double eps_probe = 0.0;
  std::vector<double> probe_grid;
  /// Forward/backward resonance split; resonance_split(circuit) when unset.
  std::optional<double> split;
  /// Keep the idler term of the two-tone response (A_in[-Omega] = A_in[Omega]).
  bool idler = false;
};

struct SpectrumTrace {
  std::vector<double> omega;
  std::vector<std::complex<double>> s_forward;
  std::vector<std::complex<double>> s_backward;
  std::vector<double> r_ratio;
  std::size_t zero_points = 0;  ///< points where both transmissions vanish
};

void validate(const CircuitConfig& c);
/// Returns warnings (e.g. weak-probe assumption violated).
std::vector<std::string> validate(const DriveConfig& d);

/// L_0 [1 + (I_a / I_c^dir)^2].
double kinetic_inductance(const CircuitConfig& c, Direction dir);

/// omega_+ - omega_- from the kinetic-inductance asymmetry, 0.5 omega_r [(I_a/I_c-)^2 - (I_a/I_c+)^2].
double resonance_split(const CircuitConfig& c);

/// Z_0 / (Z_0 + R + i(omega L_dir - 1/(omega C))).
std::vector<std::complex<double>> classical_transmission(const CircuitConfig& c, Direction dir,
                                                         const std::vector<double>& omega_grid);

struct PumpSolution {
  std::complex<double> alpha;
  double photons = 0.0;
  double detuning = 0.0;  ///< Delta_eff for this direction
  bool bistable = false;
  std::vector<double> roots;  ///< every positive real photon-number root, ascending
};

/// Direction-dependent detuning offset, +split/2 forward and -split/2 backward.
double direction_detuning(const CircuitConfig& c, const DriveConfig& d, Direction dir);

/// Classical pump amplitude in the frame rotating at omega_pump (low branch on bistability).
PumpSolution pump_steady_state(const CircuitConfig& c, const DriveConfig& d, Direction dir);

/// Linearized pump-probe transmission over d.probe_grid.
std::vector<std::complex<double>> linearized_spectrum(const CircuitConfig& c, const DriveConfig& d, Direction dir);

struct RatioResult {
  std::vector<double> values;
  std::size_t zero_points = 0;
};

/// (|S+| - |S-|)/(|S+| + |S-|); 0 where both vanish.
RatioResult nonreciprocity_ratio(const std::vector<std::complex<double>>& s_forward,
                                 const std::vector<std::complex<double>>& s_backward);

SpectrumTrace quantum_spectrum(const CircuitConfig& c, const DriveConfig& d);
SpectrumTrace classical_spectrum(const CircuitConfig& c, const std::vector<double>& omega_grid);

/// n evenly spaced points over [lo, hi].
std::vector<double> linear_grid(double lo, double hi, std::size_t n);

}  // namespace sdq
