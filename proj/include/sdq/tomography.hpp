#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include <Eigen/Dense>

#include "sdq/dynamics.hpp"

namespace sdq {

enum class Pauli : int { I = 0, X = 1, Y = 2, Z = 3 };

const Eigen::Matrix2cd& pauli_matrix(Pauli p);
/// sigma_a (x) sigma_b with qubit 1 on the left.
Eigen::Matrix4cd pauli_product(Pauli a, Pauli b);
char pauli_label(Pauli p);

/// Sixteen two-qubit Pauli expectation values.
struct TomographyRecord {
  std::map<std::pair<Pauli, Pauli>, double> expectations;
  std::uint64_t shots = 0;  ///< per setting; 0 = exact
};

enum class BellState { PsiPlus, PsiMinus, PhiPlus, PhiMinus };

/// Psi+- = (|01> +- |10>)/sqrt2, Phi+- = (|00> +- |11>)/sqrt2.
Eigen::Vector4cd bell_vector(BellState b);
std::string bell_key(BellState b);  ///< psi_plus, psi_minus, phi_plus, phi_minus

struct ReconstructionResult {
  Eigen::Matrix4cd rho_est = Eigen::Matrix4cd::Zero();
  std::map<BellState, double> fidelity_targets;
  bool physical = true;  ///< smallest eigenvalue >= -1e-9
};

/// Exact (shots == 0) or binomially sampled Pauli expectations; `seed` feeds a mt19937_64.
TomographyRecord measure_expectations(const TwoQubitState& s, std::uint64_t shots = 0, std::uint64_t seed = 0);

/// rho = (1/4) sum_ab <s_a s_b> s_a (x) s_b; throws IncompleteRecord when a setting is missing.
ReconstructionResult linear_reconstruct(const TomographyRecord& record);

/// Re <psi|rho|psi>, clipped to [0, 1].
double bell_fidelity(const Eigen::Matrix4cd& rho, BellState target);
double state_fidelity(const Eigen::Matrix4cd& rho, const Eigen::Vector4cd& psi);

struct DensityMatrixReport {
  Eigen::Matrix4d re;
  Eigen::Matrix4d im;
};

DensityMatrixReport density_matrix_report(const ReconstructionResult& result);

/// {"re": [[..]], "im": [[..]], "fidelities": {...}, "physical": bool}
std::string to_json(const ReconstructionResult& result, int indent = 2);

}  // namespace sdq
