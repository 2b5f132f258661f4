#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "sdq/dynamics.hpp"
#include "sdq/spectroscopy.hpp"
#include "sdq/squid_diode.hpp"

namespace sdq {

enum class Experiment { DiodeChar, Spectroscopy, Dynamics, ContrastMap, Tomography };

std::string to_string(Experiment e);
Experiment parse_experiment(const std::string& text);

/// Junction and flux parameters as written in a run file.
struct SquidSection {
  double tau1 = 0.9;
  double tau2 = 0.8;
  double delta1 = 1.0;
  double delta2 = 1.0;
  double phi_b = 0.0;
  double temperature = 0.0;
  bool operator==(const SquidSection&) const = default;
};

/// Frequencies and rates are ratios to omega_r; omega_r_ghz is the absolute
/// anchor (omega_r / 2pi in GHz). Currents are in nA. l0 and c_shunt are in
/// ohm/omega_r and 1/(ohm omega_r), so l0 * c_shunt = 1 and sqrt(l0/c_shunt)
/// is the resonator impedance in ohm.
struct CircuitSection {
  double omega_r_ghz = 5.0;
  double l0 = 50.0;
  double c_shunt = 0.02;
  double r_loss = 0.0;
  double z0 = 50.0;
  double kappa1 = 0.5e-4;
  double kappa2 = 0.5e-4;
  double lambda_kerr = 1e-7;
  double i_applied = 0.0;
  double ic_plus = 1.0;
  double ic_minus = 1.0;
  bool operator==(const CircuitSection&) const = default;
};

enum class SpectrumMethod { Quantum, Classical };

struct DriveSection {
  double eps_pump = 0.0;
  double omega_pump = 0.99;
  double eps_probe = 0.0;
  std::vector<double> probe;
  std::optional<double> split_mhz;  ///< forward/backward split delta omega / 2pi; from currents when unset
  SpectrumMethod method = SpectrumMethod::Quantum;
  bool idler = false;
  bool operator==(const DriveSection&) const = default;
};

enum class InitialState { Q01, Q10, Both };

struct QubitsSection {
  double j = 1.0;
  double phase = 0.0;
  double omega1 = 0.0;
  double omega2 = 0.0;
  double gamma1_1 = 0.0;
  double gamma1_2 = 0.0;
  double gamma_collective = 0.0;
  CollectiveModel collective_model = CollectiveModel::Correlated;
  InitialState initial = InitialState::Both;
  double t_final = 5.0;
  std::optional<double> t_eval;  ///< defaults to pi / (4 |J|)
  std::size_t samples = 501;
  bool operator==(const QubitsSection&) const = default;
};

struct TomographySection {
  std::uint64_t shots = 0;
  bool operator==(const TomographySection&) const = default;
};

/// Sweep axes. Each is written as "start:stop:n" or a comma list.
struct GridsSection {
  std::vector<double> phi_b;
  std::vector<double> tau1;
  std::vector<double> phi;
  std::vector<double> gamma;
  std::vector<double> time;
  bool operator==(const GridsSection&) const = default;
};

struct RunConfig {
  Experiment experiment = Experiment::DiodeChar;
  std::string label;  ///< output file prefix; defaults to the experiment name
  std::uint64_t seed = 0;
  std::string output_dir = "out";
  std::optional<SquidSection> squid;
  std::optional<CircuitSection> circuit;
  std::optional<DriveSection> drive;
  std::optional<QubitsSection> qubits;
  std::optional<TomographySection> tomography;
  GridsSection grids;
  bool operator==(const RunConfig&) const = default;

  std::string prefix() const { return label.empty() ? to_string(experiment) : label; }
};

/// Accepts plain numbers and multiples of pi: "0.5", "-pi/2", "3*pi/4", "2pi".
double parse_number(const std::string& text, const std::string& field);
/// "start:stop:n" (n >= 1) or "a, b, c".
std::vector<double> parse_grid(const std::string& text, const std::string& field);

RunConfig parse_config_text(const std::string& text);
RunConfig parse_config(const std::filesystem::path& path);
/// Full semantic check; parse_config calls it.
void validate(const RunConfig& cfg);
/// Canonical run-file text; parse_config_text(serialize(cfg)) == cfg.
std::string serialize(const RunConfig& cfg);

/// Library-facing conversions.
SquidConfig to_squid(const SquidSection& s);
CircuitConfig to_circuit(const CircuitSection& c);
DriveConfig to_drive(const DriveSection& d, const CircuitSection& c);
TwoQubitParams to_qubits(const QubitsSection& q);

struct ManifestFile {
  std::string name;
  std::uintmax_t bytes = 0;
  std::string sha256;
};

struct RunManifest {
  std::string config_hash;
  std::string version;
  std::string started_utc;
  std::string finished_utc;
  std::vector<ManifestFile> files;
  std::vector<std::string> warnings;
  std::filesystem::path path;
};

struct RunOptions {
  unsigned threads = 0;  ///< 0 = hardware concurrency
  std::optional<std::filesystem::path> output_dir;  ///< overrides cfg.output_dir
};

/// Executes the experiment, writes <label>_<quantity>.{csv,json} and then
/// <label>_manifest.json. Module errors are rethrown with the label prefixed.
RunManifest run_experiment(const RunConfig& cfg, const RunOptions& options = {});

std::vector<std::string> list_presets();
/// Throws ValidationError for an unknown name.
RunConfig preset_config(const std::string& name);

std::string sha256_hex(const std::string& bytes);
std::string format_double(double v);  ///< 17 significant digits
const char* tool_version();

}  // namespace sdq
