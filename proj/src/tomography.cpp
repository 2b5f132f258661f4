#include "sdq/tomography.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <json.hpp>

#include "sdq/errors.hpp"

namespace sdq {
namespace {

using cplx = std::complex<double>;
constexpr std::array<Pauli, 4> kPaulis{Pauli::I, Pauli::X, Pauli::Y, Pauli::Z};
constexpr std::array<BellState, 4> kBells{BellState::PsiPlus, BellState::PsiMinus, BellState::PhiPlus,
                                          BellState::PhiMinus};

std::array<Eigen::Matrix2cd, 4> make_paulis() {
  std::array<Eigen::Matrix2cd, 4> m;
  m[0] = Eigen::Matrix2cd::Identity();
  m[1] << 0, 1, 1, 0;
  m[2] << 0, cplx(0, -1), cplx(0, 1), 0;
  m[3] << 1, 0, 0, -1;
  return m;
}

}  // namespace

const Eigen::Matrix2cd& pauli_matrix(Pauli p) {
  static const auto table = make_paulis();
  return table[static_cast<int>(p)];
}

Eigen::Matrix4cd pauli_product(Pauli a, Pauli b) {
  const auto& ma = pauli_matrix(a);
  const auto& mb = pauli_matrix(b);
  Eigen::Matrix4cd out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) out.block<2, 2>(2 * i, 2 * j) = ma(i, j) * mb;
  return out;
}

char pauli_label(Pauli p) { return "IXYZ"[static_cast<int>(p)]; }

Eigen::Vector4cd bell_vector(BellState b) {
  Eigen::Vector4cd v = Eigen::Vector4cd::Zero();
  switch (b) {
    case BellState::PsiPlus: v(k01) = 1.0; v(k10) = 1.0; break;
    case BellState::PsiMinus: v(k01) = 1.0; v(k10) = -1.0; break;
    case BellState::PhiPlus: v(k00) = 1.0; v(k11) = 1.0; break;
    case BellState::PhiMinus: v(k00) = 1.0; v(k11) = -1.0; break;
  }
  return v / std::numbers::sqrt2;
}

std::string bell_key(BellState b) {
  switch (b) {
    case BellState::PsiPlus: return "psi_plus";
    case BellState::PsiMinus: return "psi_minus";
    case BellState::PhiPlus: return "phi_plus";
    case BellState::PhiMinus: return "phi_minus";
  }
  return {};
}

TomographyRecord measure_expectations(const TwoQubitState& s, std::uint64_t shots, std::uint64_t seed) {
  TomographyRecord record;
  record.shots = shots;
  std::mt19937_64 rng(seed);
  for (Pauli a : kPaulis) {
    for (Pauli b : kPaulis) {
      const double exact = std::clamp((s.rho * pauli_product(a, b)).trace().real(), -1.0, 1.0);
      double value = exact;
      if (shots > 0 && !(a == Pauli::I && b == Pauli::I)) {
        // Outcome +1 with probability (1 + <O>)/2.
        std::binomial_distribution<std::uint64_t> draw(shots, 0.5 * (1.0 + exact));
        const auto up = draw(rng);
        value = (2.0 * static_cast<double>(up) - static_cast<double>(shots)) / static_cast<double>(shots);
      }
      record.expectations[{a, b}] = value;
    }
  }
  record.expectations[{Pauli::I, Pauli::I}] = 1.0;
  return record;
}

double state_fidelity(const Eigen::Matrix4cd& rho, const Eigen::Vector4cd& psi) {
  const double f = psi.dot(rho * psi).real();
  return std::clamp(f, 0.0, 1.0);
}

double bell_fidelity(const Eigen::Matrix4cd& rho, BellState target) { return state_fidelity(rho, bell_vector(target)); }

ReconstructionResult linear_reconstruct(const TomographyRecord& record) {
  ReconstructionResult result;
  for (Pauli a : kPaulis) {
    for (Pauli b : kPaulis) {
      const auto it = record.expectations.find({a, b});
      if (it == record.expectations.end()) {
        throw IncompleteRecord(std::string("tomography record is missing setting ") + pauli_label(a) +
                               pauli_label(b));
      }
      result.rho_est += 0.25 * it->second * pauli_product(a, b);
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(result.rho_est, Eigen::EigenvaluesOnly);
  result.physical = es.eigenvalues().minCoeff() >= -1e-9;
  for (BellState b : kBells) result.fidelity_targets[b] = bell_fidelity(result.rho_est, b);
  return result;
}

DensityMatrixReport density_matrix_report(const ReconstructionResult& result) {
  return {result.rho_est.real(), result.rho_est.imag()};
}

std::string to_json(const ReconstructionResult& result, int indent) {
  const auto report = density_matrix_report(result);
  auto rows = [](const Eigen::Matrix4d& m) {
    nlohmann::json out = nlohmann::json::array();
    for (int i = 0; i < 4; ++i) {
      nlohmann::json row = nlohmann::json::array();
      for (int j = 0; j < 4; ++j) row.push_back(m(i, j));
      out.push_back(row);
    }
    return out;
  };
  nlohmann::ordered_json doc;
  doc["re"] = rows(report.re);
  doc["im"] = rows(report.im);
  nlohmann::ordered_json fid;
  for (BellState b : kBells) fid[bell_key(b)] = result.fidelity_targets.at(b);
  doc["fidelities"] = fid;
  doc["physical"] = result.physical;
  return doc.dump(indent);
}

}  // namespace sdq
