#pragma once

#include <array>
#include <string>
#include <vector>

namespace sdq {

/// Single Josephson junction in the short-junction (Andreev) limit.
struct JunctionParams {
  double tau = 0.0;    ///< transmission, [0, 1]
  double delta = 1.0;  ///< superconducting gap; sets the energy unit
};

/// Asymmetric two-junction SQUID threaded by a bias flux.
///
/// Energies are in units of the gap of junction 1, currents in units of
/// e*Delta/(2*hbar), phases and fluxes in radians. `temperature` is
/// k_B T / Delta and only enters the current-phase relation.
struct SquidConfig {
  JunctionParams j1;
  JunctionParams j2;
  double phi_b = 0.0;
  double temperature = 0.0;
};

void validate(const JunctionParams& j, const std::string& field = "junction");
void validate(const SquidConfig& s);

/// Supercurrent of one junction at phase `phi`.
double junction_cpr(const JunctionParams& j, double phi, double temperature = 0.0);

/// Zero-temperature Andreev energy U(phi) = -Delta sqrt(1 - tau sin^2(phi/2)).
double junction_potential(const JunctionParams& j, double phi);

/// n-th phase derivative (0 <= n <= 4) of junction_potential, in closed form.
double junction_potential_derivative(const JunctionParams& j, double phi, int order);

double squid_potential(const SquidConfig& s, double phi);
double squid_potential_derivative(const SquidConfig& s, double phi, int order);

/// Total loop current I_1(phi) + I_2(phi - phi_b).
double squid_cpr(const SquidConfig& s, double phi);

struct PotentialMinimum {
  double phi = 0.0;
  double energy = 0.0;
  /// Set when a second local minimum matches the global one within 1e-12.
  bool degenerate = false;
  double alternate_phi = 0.0;
};

/// Global minimizer of squid_potential on [-pi, pi).
///
/// A 2048-point scan brackets every local minimum, each is polished with a
/// safeguarded Newton iteration on dU/dphi. On an energy tie the minimizer
/// with smaller |phi| wins (on an exact |phi| tie, the one whose sign matches
/// phi_b, positive for phi_b = 0) and the result is flagged as degenerate.
PotentialMinimum find_phi_min(const SquidConfig& s);

/// c_1..c_4: phase derivatives of the SQUID potential at `phi_min`.
std::array<double, 4> taylor_coefficients(const SquidConfig& s, double phi_min);

struct CriticalCurrents {
  double ic_plus = 0.0;
  double ic_minus = 0.0;
};

/// Extremes of squid_cpr over one period.
CriticalCurrents critical_currents(const SquidConfig& s);

/// |(I+ - I-)/(I+ + I-)|; throws InvalidCurrent unless both inputs are > 0.
double diode_efficiency(double ic_plus, double ic_minus);

struct DiodeCharacterization {
  double ic_plus = 0.0;
  double ic_minus = 0.0;
  double eta = 0.0;
  double phi_min = 0.0;
  std::array<double, 4> c{};  ///< c_1..c_4
  bool degenerate_minimum = false;
};

DiodeCharacterization characterize(const SquidConfig& s);

}  // namespace sdq
