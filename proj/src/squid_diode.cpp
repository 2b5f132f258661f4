#include "sdq/squid_diode.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/tools/minima.hpp>

#include "sdq/errors.hpp"

namespace sdq {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kScanPoints = 2048;

double wrap_phase(double phi) {
  double w = std::fmod(phi + kPi, 2.0 * kPi);
  if (w < 0.0) w += 2.0 * kPi;
  return w - kPi;
}

// Safeguarded Newton on f = dU/dphi inside [lo, hi] where f(lo) < 0 < f(hi).
double polish_minimum(const SquidConfig& s, double lo, double hi) {
  double x = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    const double f = squid_potential_derivative(s, x, 1);
    const double df = squid_potential_derivative(s, x, 2);
    if (f == 0.0) return x;
    if (f < 0.0) lo = x; else hi = x;
    double next = (df > 0.0) ? x - f / df : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - x) <= 4.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(x))) {
      return next;
    }
    x = next;
  }
  return x;
}

}  // namespace

void validate(const JunctionParams& j, const std::string& field) {
  if (!(j.tau >= 0.0 && j.tau <= 1.0)) {
    throw ValidationError(field + ": tau must lie in [0,1] (got " + std::to_string(j.tau) + ")");
  }
  if (!(j.delta > 0.0) || !std::isfinite(j.delta)) {
    throw ValidationError(field + ": delta must be > 0");
  }
}

void validate(const SquidConfig& s) {
  validate(s.j1, "squid.j1");
  validate(s.j2, "squid.j2");
  if (!std::isfinite(s.phi_b)) throw ValidationError("squid.phi_b must be finite");
  if (!(s.temperature >= 0.0)) throw ValidationError("squid.temperature must be >= 0");
}

double junction_cpr(const JunctionParams& j, double phi, double temperature) {
  const double half = std::sin(0.5 * phi);
  const double eps = std::sqrt(1.0 - j.tau * half * half);
  if (eps == 0.0) return 0.0;
  double current = j.delta * j.tau * std::sin(phi) / eps;
  if (temperature > 0.0) current *= std::tanh(j.delta * eps / (2.0 * temperature));
  return current;
}

double junction_potential(const JunctionParams& j, double phi) {
  const double half = std::sin(0.5 * phi);
  return -j.delta * std::sqrt(1.0 - j.tau * half * half);
}

double junction_potential_derivative(const JunctionParams& j, double phi, int order) {
  if (order == 0) return junction_potential(j, phi);
  // U = -delta * sqrt(A), A = 1 - tau/2 + (tau/2) cos(phi); Faa di Bruno up to 4th order.
  const double t2 = 0.5 * j.tau;
  const double s = std::sin(phi);
  const double c = std::cos(phi);
  const double a = 1.0 - t2 + t2 * c;
  const double a1 = -t2 * s;
  const double a2 = -t2 * c;
  const double a3 = t2 * s;
  const double a4 = t2 * c;
  const double r = std::sqrt(a);
  const double g1 = 0.5 / r;
  const double g2 = -0.25 / (a * r);
  const double g3 = 0.375 / (a * a * r);
  const double g4 = -0.9375 / (a * a * a * r);
  double f = 0.0;
  switch (order) {
    case 1: f = g1 * a1; break;
    case 2: f = g1 * a2 + g2 * a1 * a1; break;
    case 3: f = g1 * a3 + 3.0 * g2 * a1 * a2 + g3 * a1 * a1 * a1; break;
    case 4:
      f = g1 * a4 + g2 * (4.0 * a1 * a3 + 3.0 * a2 * a2) + 6.0 * g3 * a1 * a1 * a2 +
          g4 * a1 * a1 * a1 * a1;
      break;
    default: throw ValidationError("derivative order must be in [0,4]");
  }
  return -j.delta * f;
}

double squid_potential(const SquidConfig& s, double phi) {
  return junction_potential(s.j1, phi) + junction_potential(s.j2, phi - s.phi_b);
}

double squid_potential_derivative(const SquidConfig& s, double phi, int order) {
  return junction_potential_derivative(s.j1, phi, order) +
         junction_potential_derivative(s.j2, phi - s.phi_b, order);
}

double squid_cpr(const SquidConfig& s, double phi) {
  return junction_cpr(s.j1, phi, s.temperature) + junction_cpr(s.j2, phi - s.phi_b, s.temperature);
}

PotentialMinimum find_phi_min(const SquidConfig& s) {
  const double h = 2.0 * kPi / kScanPoints;
  std::vector<double> u(kScanPoints);
  for (int i = 0; i < kScanPoints; ++i) u[i] = squid_potential(s, -kPi + h * i);

  const auto [lo_it, hi_it] = std::minmax_element(u.begin(), u.end());
  if (*hi_it - *lo_it < 1e-14) {
    // Flat potential (both junctions opaque): every phase is a minimum.
    return {0.0, *lo_it, true, 0.0};
  }

  struct Candidate {
    double phi;
    double energy;
  };
  std::vector<Candidate> found;
  for (int i = 0; i < kScanPoints; ++i) {
    const double prev = u[(i + kScanPoints - 1) % kScanPoints];
    const double next = u[(i + 1) % kScanPoints];
    if (!(u[i] <= prev && u[i] < next)) continue;
    const double centre = -kPi + h * i;
    const double phi = wrap_phase(polish_minimum(s, centre - h, centre + h));
    const double energy = squid_potential(s, phi);
    const bool duplicate = std::any_of(found.begin(), found.end(), [&](const Candidate& c) {
      return std::abs(wrap_phase(c.phi - phi)) < 1e-6;
    });
    if (!duplicate) found.push_back({phi, energy});
  }

  const auto best = std::min_element(found.begin(), found.end(),
                                     [](const Candidate& a, const Candidate& b) { return a.energy < b.energy; });
  PotentialMinimum result{best->phi, best->energy, false, 0.0};
  for (const auto& c : found) {
    if (&c == &*best || std::abs(c.energy - best->energy) > 1e-12) continue;
    result.degenerate = true;
    // On an exact |phi| tie take the sign of phi_b, so phi_b -> -phi_b mirrors the choice.
    const bool towards_bias = std::signbit(s.phi_b) ? c.phi < result.phi : c.phi > result.phi;
    const bool prefer_c = std::abs(c.phi) < std::abs(result.phi) - 1e-12 ||
                          (std::abs(std::abs(c.phi) - std::abs(result.phi)) <= 1e-12 && towards_bias);
    if (prefer_c) {
      result.alternate_phi = result.phi;
      result.phi = c.phi;
      result.energy = c.energy;
    } else {
      result.alternate_phi = c.phi;
    }
  }
  return result;
}

std::array<double, 4> taylor_coefficients(const SquidConfig& s, double phi_min) {
  std::array<double, 4> c{};
  for (int n = 1; n <= 4; ++n) c[n - 1] = squid_potential_derivative(s, phi_min, n);
  return c;
}

CriticalCurrents critical_currents(const SquidConfig& s) {
  const double h = 2.0 * kPi / kScanPoints;
  int imax = 0;
  int imin = 0;
  double vmax = -std::numeric_limits<double>::infinity();
  double vmin = std::numeric_limits<double>::infinity();
  for (int i = 0; i < kScanPoints; ++i) {
    const double v = squid_cpr(s, h * i);
    if (v > vmax) { vmax = v; imax = i; }
    if (v < vmin) { vmin = v; imin = i; }
  }
  constexpr int bits = std::numeric_limits<double>::digits;
  const double xmax = h * imax;
  const auto up = boost::math::tools::brent_find_minima(
      [&](double x) { return -squid_cpr(s, x); }, xmax - h, xmax + h, bits);
  const double xmin = h * imin;
  const auto down = boost::math::tools::brent_find_minima(
      [&](double x) { return squid_cpr(s, x); }, xmin - h, xmin + h, bits);
  return {std::max(vmax, -up.second), std::abs(std::min(vmin, down.second))};
}

double diode_efficiency(double ic_plus, double ic_minus) {
  if (!(ic_plus > 0.0) || !(ic_minus > 0.0)) {
    throw InvalidCurrent("critical currents must be > 0");
  }
  return std::abs((ic_plus - ic_minus) / (ic_plus + ic_minus));
}

DiodeCharacterization characterize(const SquidConfig& s) {
  validate(s);
  DiodeCharacterization d;
  const auto ic = critical_currents(s);
  d.ic_plus = ic.ic_plus;
  d.ic_minus = ic.ic_minus;
  d.eta = diode_efficiency(ic.ic_plus, ic.ic_minus);
  const auto minimum = find_phi_min(s);
  d.phi_min = minimum.phi;
  d.degenerate_minimum = minimum.degenerate;
  d.c = taylor_coefficients(s, minimum.phi);
  return d;
}

}  // namespace sdq
