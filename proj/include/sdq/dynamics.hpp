#pragma once

#include <array>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sdq/modes_coupling.hpp"

namespace sdq {

/// How the collective channel Gamma enters the dissipator's rate matrix.
enum class CollectiveModel {
  /// [[g1 + G, G], [G, g2 + G]]: individual decay plus one shared jump sqrt(G)(s1- + s2-).
  Correlated,
  /// [[g1, G], [G, g2]]: cross terms only; not positive for G > sqrt(g1 g2).
  CrossOnly,
};

/// Two qubits exchanging excitations through J e^{i phi}, in the frame where
/// the qubit frequencies are measured (rotating frame: omega1 = omega2 = 0).
struct TwoQubitParams {
  double omega1 = 0.0;
  double omega2 = 0.0;
  ComplexCoupling coupling = ComplexCoupling::from_polar(1.0, 0.0);
  std::array<double, 2> gamma1{0.0, 0.0};
  double gamma_collective = 0.0;
  CollectiveModel model = CollectiveModel::Correlated;
};

/// Basis order |00>, |01>, |10>, |11>, with qubit 1 the left factor and
/// |1> the excited state.
enum BasisIndex : int { k00 = 0, k01 = 1, k10 = 2, k11 = 3 };

struct TwoQubitState {
  Eigen::Matrix4cd rho = Eigen::Matrix4cd::Zero();

  static TwoQubitState basis(int index);
  static TwoQubitState pure(const Eigen::Vector4cd& psi);
};

void validate(const TwoQubitParams& p);
/// Hermitian within 1e-12, unit trace within 1e-10, eigenvalues >= -1e-10.
void validate(const TwoQubitState& s);

namespace ops {
const Eigen::Matrix4cd& sigma_minus(int qubit);  ///< qubit in {1, 2}
const Eigen::Matrix4cd& sigma_plus(int qubit);
const Eigen::Matrix4cd& sigma_z(int qubit);
}  // namespace ops

Eigen::Matrix4cd build_hamiltonian(const TwoQubitParams& p);
Eigen::Matrix2d rate_matrix(const TwoQubitParams& p);
bool rate_matrix_positive(const TwoQubitParams& p);

/// Precomputed master-equation generator d(rho)/dt = L[rho].
class LindbladGenerator {
 public:
  explicit LindbladGenerator(const TwoQubitParams& p);
  Eigen::Matrix4cd operator()(const Eigen::Matrix4cd& rho) const;
  const Eigen::Matrix4cd& hamiltonian() const { return h_; }

 private:
  Eigen::Matrix4cd h_;
  Eigen::Matrix4cd h_eff_;
  Eigen::Matrix2d rates_;
};

Eigen::Matrix4cd lindblad_rhs(const TwoQubitParams& p, const Eigen::Matrix4cd& rho);

struct DtPolicy {
  std::size_t samples = 201;  ///< output points on [0, t_final], endpoints included
  double rtol = 1e-10;
  double atol = 1e-12;
  bool keep_snapshots = false;
};

struct DynamicsResult {
  std::vector<double> times;
  std::vector<double> n1;
  std::vector<double> n2;
  std::vector<double> concurrence;
  std::vector<Eigen::Matrix4cd> rho_at;  ///< filled when DtPolicy::keep_snapshots
  Eigen::Matrix4cd final_rho;
  double max_trace_drift = 0.0;
  double max_hermiticity_error = 0.0;
  double min_eigenvalue = 1.0;
  bool physical = true;  ///< false once min_eigenvalue < -1e-6
  std::vector<std::string> warnings;
};

/// Adaptive Dormand-Prince integration of the master equation.
DynamicsResult evolve(const TwoQubitParams& p, const TwoQubitState& rho0, double t_final,
                      const DtPolicy& policy = {});
/// Same, sampled at caller-supplied ascending times starting at 0.
DynamicsResult evolve_at(const TwoQubitParams& p, const TwoQubitState& rho0, const std::vector<double>& times,
                         const DtPolicy& policy = {});

/// Excitation probabilities (<sigma_z> + 1)/2 for qubits 1 and 2.
std::array<double, 2> populations(const Eigen::Matrix4cd& rho);

/// Evolve for t = pi/(4|J|); rho0 must live in the single-excitation sector.
TwoQubitState half_iswap_state(const TwoQubitParams& p, const TwoQubitState& rho0);

/// Ideal closed-system half-iSWAP output from |01>: (|10> + i e^{i phi}|01>)/sqrt(2).
Eigen::Vector4cd half_iswap_target(double phi);

/// Wootters concurrence.
double concurrence(const TwoQubitState& s);

/// Delta C = C_01(t) - C_10(t) over (phi, Gamma); rows follow phi_grid, columns gamma_grid.
Eigen::MatrixXd contrast_map(const TwoQubitParams& base, const std::vector<double>& phi_grid,
                             const std::vector<double>& gamma_grid, double t_eval, unsigned threads = 0);

/// Delta C(t) over (phi, t) at the base Gamma; rows follow phi_grid, columns times.
Eigen::MatrixXd contrast_time_map(const TwoQubitParams& base, const std::vector<double>& phi_grid,
                                  const std::vector<double>& times, unsigned threads = 0);

}  // namespace sdq
