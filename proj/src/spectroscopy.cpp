#include "sdq/spectroscopy.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "sdq/errors.hpp"

namespace sdq {
namespace {

using cplx = std::complex<double>;
constexpr cplx kI{0.0, 1.0};

// Positive real roots of a3 n^3 + a2 n^2 + a1 n + a0, ascending.
std::vector<double> positive_cubic_roots(double a3, double a2, double a1, double a0) {
  Eigen::Matrix3d companion = Eigen::Matrix3d::Zero();
  companion(0, 0) = -a2 / a3;
  companion(0, 1) = -a1 / a3;
  companion(0, 2) = -a0 / a3;
  companion(1, 0) = 1.0;
  companion(2, 1) = 1.0;
  const Eigen::Vector3cd eig = companion.eigenvalues();
  const double scale = eig.cwiseAbs().maxCoeff();
  std::vector<double> roots;
  for (int i = 0; i < 3; ++i) {
    if (std::abs(eig(i).imag()) > 1e-7 * std::max(scale, 1.0)) continue;
    double n = eig(i).real();
    for (int it = 0; it < 50; ++it) {
      const double f = ((a3 * n + a2) * n + a1) * n + a0;
      const double df = (3.0 * a3 * n + 2.0 * a2) * n + a1;
      if (df == 0.0) break;
      const double step = f / df;
      n -= step;
      if (std::abs(step) <= 1e-15 * std::max(std::abs(n), 1e-300)) break;
    }
    if (n > 0.0) roots.push_back(n);
  }
  std::sort(roots.begin(), roots.end());
  roots.erase(std::unique(roots.begin(), roots.end(),
                          [](double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(a, b); }),
              roots.end());
  return roots;
}

}  // namespace

void validate(const CircuitConfig& c) {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ValidationError(std::string("circuit.") + name + " must be > 0");
  };
  positive(c.l0, "l0");
  positive(c.c_shunt, "c_shunt");
  positive(c.z0, "z0");
  positive(c.omega_r, "omega_r");
  positive(c.kappa1, "kappa1");
  positive(c.kappa2, "kappa2");
  positive(c.ic_plus, "ic_plus");
  positive(c.ic_minus, "ic_minus");
  if (!(c.r_loss >= 0.0)) throw ValidationError("circuit.r_loss must be >= 0");
  if (!std::isfinite(c.lambda_kerr)) throw ValidationError("circuit.lambda_kerr must be finite");
  if (!(c.i_applied >= 0.0) || !(c.i_applied < std::min(c.ic_plus, c.ic_minus))) {
    throw ValidationError("circuit.i_applied must lie in [0, min(ic_plus, ic_minus))");
  }
  const double expected = 1.0 / std::sqrt(c.l0 * c.c_shunt);
  if (std::abs(c.omega_r - expected) > 1e-12 * expected) {
    throw ValidationError("circuit.omega_r must equal 1/sqrt(l0*c_shunt)");
  }
}

std::vector<std::string> validate(const DriveConfig& d) {
  std::vector<std::string> warnings;
  if (!(d.omega_pump > 0.0)) throw ValidationError("drive.omega_pump must be > 0");
  if (!(d.eps_pump >= 0.0) || !(d.eps_probe >= 0.0)) throw ValidationError("drive amplitudes must be >= 0");
  if (d.probe_grid.empty()) throw ValidationError("drive.probe_grid must be nonempty");
  for (std::size_t i = 1; i < d.probe_grid.size(); ++i) {
    if (!(d.probe_grid[i] > d.probe_grid[i - 1])) throw ValidationError("drive.probe_grid must be strictly increasing");
  }
  if (d.eps_pump > 0.0 && d.eps_probe > 0.1 * d.eps_pump) {
    warnings.emplace_back("WeakProbe: eps_probe/eps_pump > 0.1");
  }
  return warnings;
}

double kinetic_inductance(const CircuitConfig& c, Direction dir) {
  const double ic = dir == Direction::Forward ? c.ic_plus : c.ic_minus;
  const double ratio = c.i_applied / ic;
  return c.l0 * (1.0 + ratio * ratio);
}

double resonance_split(const CircuitConfig& c) {
  const double rm = c.i_applied / c.ic_minus;
  const double rp = c.i_applied / c.ic_plus;
  return 0.5 * c.omega_r * (rm * rm - rp * rp);
}

std::vector<cplx> classical_transmission(const CircuitConfig& c, Direction dir, const std::vector<double>& omega_grid) {
  const double l = kinetic_inductance(c, dir);
  std::vector<cplx> s;
  s.reserve(omega_grid.size());
  for (double w : omega_grid) {
    if (w == 0.0) throw ZeroFrequency("classical_transmission: grid contains omega = 0");
    const cplx z{c.z0 + c.r_loss, w * l - 1.0 / (w * c.c_shunt)};
    s.push_back(c.z0 / z);
  }
  return s;
}

double direction_detuning(const CircuitConfig& c, const DriveConfig& d, Direction dir) {
  const double split = d.split.value_or(resonance_split(c));
  const double base = c.omega_r - d.omega_pump;
  return base + (dir == Direction::Forward ? 0.5 : -0.5) * split;
}

PumpSolution pump_steady_state(const CircuitConfig& c, const DriveConfig& d, Direction dir) {
  PumpSolution p;
  p.detuning = direction_detuning(c, d, dir);
  const double kappa = c.kappa();
  const double eps2 = d.eps_pump * d.eps_pump;
  if (eps2 == 0.0) return p;
  const double lam = c.lambda_kerr;
  const double a1 = p.detuning * p.detuning + 0.25 * kappa * kappa;
  if (lam == 0.0) {
    p.roots = {eps2 / a1};
  } else {
    p.roots = positive_cubic_roots(0.25 * lam * lam, lam * p.detuning, a1, -eps2);
  }
  if (p.roots.empty()) throw SingularSusceptibility("pump_steady_state: no positive photon-number root");
  p.bistable = p.roots.size() == 3;
  p.photons = p.roots.front();
  p.alpha = d.eps_pump / cplx(0.5 * kappa, p.detuning + 0.5 * lam * p.photons);
  return p;
}

std::vector<cplx> linearized_spectrum(const CircuitConfig& c, const DriveConfig& d, Direction dir) {
  const auto pump = pump_steady_state(c, d, dir);
  const double half_kappa = 0.5 * c.kappa();
  const double delta = pump.detuning;
  const double lambda = c.lambda_kerr * pump.photons;
  const double gain = std::sqrt(c.kappa1 * c.kappa2);
  std::vector<cplx> s;
  s.reserve(d.probe_grid.size());
  for (double w : d.probe_grid) {
    const double big_omega = w - d.omega_pump;
    const cplx a = half_kappa - kI * big_omega;
    const cplx det = a * a + delta * delta - lambda * lambda;
    if (std::abs(det) < 1e-30) {
      throw SingularSusceptibility("linearized_spectrum: |D(Omega)| < 1e-30 at omega = " + std::to_string(w));
    }
    const cplx chi11 = (half_kappa - kI * (delta + big_omega)) / det;
    cplx value = -gain * chi11;
    if (d.idler) value += -gain * (-kI * lambda / det);
    s.push_back(value);
  }
  return s;
}

RatioResult nonreciprocity_ratio(const std::vector<cplx>& s_forward, const std::vector<cplx>& s_backward) {
  if (s_forward.size() != s_backward.size()) throw ValidationError("nonreciprocity_ratio: trace lengths differ");
  RatioResult r;
  r.values.reserve(s_forward.size());
  for (std::size_t i = 0; i < s_forward.size(); ++i) {
    const double p = std::abs(s_forward[i]);
    const double m = std::abs(s_backward[i]);
    if (p + m < 1e-30) {
      r.values.push_back(0.0);
      ++r.zero_points;
    } else {
      r.values.push_back((p - m) / (p + m));
    }
  }
  return r;
}

SpectrumTrace quantum_spectrum(const CircuitConfig& c, const DriveConfig& d) {
  SpectrumTrace t;
  t.omega = d.probe_grid;
  t.s_forward = linearized_spectrum(c, d, Direction::Forward);
  t.s_backward = linearized_spectrum(c, d, Direction::Backward);
  auto ratio = nonreciprocity_ratio(t.s_forward, t.s_backward);
  t.r_ratio = std::move(ratio.values);
  t.zero_points = ratio.zero_points;
  return t;
}

SpectrumTrace classical_spectrum(const CircuitConfig& c, const std::vector<double>& omega_grid) {
  SpectrumTrace t;
  t.omega = omega_grid;
  t.s_forward = classical_transmission(c, Direction::Forward, omega_grid);
  t.s_backward = classical_transmission(c, Direction::Backward, omega_grid);
  auto ratio = nonreciprocity_ratio(t.s_forward, t.s_backward);
  t.r_ratio = std::move(ratio.values);
  t.zero_points = ratio.zero_points;
  return t;
}

std::vector<double> linear_grid(double lo, double hi, std::size_t n) {
  std::vector<double> g(n);
  if (n == 1) {
    g[0] = lo;
    return g;
  }
  for (std::size_t i = 0; i < n; ++i) g[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  return g;
}

}  // namespace sdq
