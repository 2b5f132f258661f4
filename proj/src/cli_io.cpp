#include "sdq/cli_io.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <map>
#include <numbers>
#include <regex>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <json.hpp>
#include <openssl/evp.h>

#include "sdq/errors.hpp"
#include "sdq/parallel.hpp"
#include "sdq/tomography.hpp"

namespace sdq {
namespace {

namespace pt = boost::property_tree;
using json = nlohmann::ordered_json;
constexpr double kPi = std::numbers::pi;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::uint64_t parse_unsigned(const std::string& raw, const std::string& field) {
  const std::string text = trim(raw);
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
    throw ParseError(field + ": expected a non-negative integer, got '" + raw + "'");
  }
  return v;
}

bool parse_bool(const std::string& raw, const std::string& field) {
  const std::string t = lower(trim(raw));
  if (t == "true" || t == "1" || t == "yes") return true;
  if (t == "false" || t == "0" || t == "no") return false;
  throw ParseError(field + ": expected true or false, got '" + raw + "'");
}

const std::map<std::string, std::set<std::string>>& allowed_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"run", {"experiment", "label", "seed", "output_dir"}},
      {"squid", {"tau1", "tau2", "delta1", "delta2", "phi_b", "temperature"}},
      {"circuit",
       {"omega_r_ghz", "l0", "c_shunt", "r_loss", "z0", "kappa1", "kappa2", "lambda_kerr", "i_applied", "ic_plus",
        "ic_minus"}},
      {"drive", {"eps_pump", "omega_pump", "eps_probe", "probe", "split_mhz", "method", "idler"}},
      {"qubits",
       {"j", "phase", "omega1", "omega2", "gamma1_1", "gamma1_2", "gamma_collective", "collective_model", "initial",
        "t_final", "t_eval", "samples"}},
      {"tomography", {"shots"}},
      {"grids", {"phi_b", "tau1", "phi", "gamma", "time"}},
  };
  return keys;
}

/// Typed accessors over one INI section.
class Section {
 public:
  Section(std::string name, const pt::ptree& tree) : name_(std::move(name)), tree_(tree) {}

  std::optional<std::string> raw(const std::string& key) const {
    const auto v = tree_.get_optional<std::string>(pt::ptree::path_type(key, '\0'));
    if (!v) return std::nullopt;
    return *v;
  }
  std::string field(const std::string& key) const { return name_ + "." + key; }

  void number(const std::string& key, double& out) const {
    if (auto v = raw(key)) out = parse_number(*v, field(key));
  }
  void number(const std::string& key, std::optional<double>& out) const {
    if (auto v = raw(key)) out = parse_number(*v, field(key));
  }
  void grid(const std::string& key, std::vector<double>& out) const {
    if (auto v = raw(key)) out = parse_grid(*v, field(key));
  }

 private:
  std::string name_;
  const pt::ptree& tree_;
};

std::string to_string(SpectrumMethod m) { return m == SpectrumMethod::Quantum ? "quantum" : "classical"; }
std::string to_string(InitialState s) {
  switch (s) {
    case InitialState::Q01: return "01";
    case InitialState::Q10: return "10";
    case InitialState::Both: return "both";
  }
  return {};
}
std::string to_string(CollectiveModel m) { return m == CollectiveModel::Correlated ? "correlated" : "cross-only"; }

std::string grid_text(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += format_double(v[i]);
  }
  return out;
}

void require_finite(const std::vector<double>& v, const std::string& field) {
  for (double x : v) {
    if (!std::isfinite(x)) throw ValidationError(field + " must contain finite values");
  }
}

std::string utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

/// In-memory output file; written to disk once the experiment finishes.
struct OutputFile {
  std::string name;
  std::string content;
};

struct ExperimentOutput {
  std::vector<OutputFile> files;
  std::vector<std::string> warnings;

  void warn(const std::string& w) {
    if (std::find(warnings.begin(), warnings.end(), w) == warnings.end()) warnings.push_back(w);
  }
};

class CsvWriter {
 public:
  explicit CsvWriter(const std::vector<std::string>& header) {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (i) out_ << ',';
      out_ << header[i];
    }
    out_ << '\n';
  }
  CsvWriter& cell(double v) { return cell(format_double(v)); }
  CsvWriter& cell(const std::string& s) {
    if (!first_) out_ << ',';
    out_ << s;
    first_ = false;
    return *this;
  }
  void end_row() {
    out_ << '\n';
    first_ = true;
  }
  std::string str() const { return out_.str(); }

 private:
  std::ostringstream out_;
  bool first_ = true;
};

std::string matrix_csv(const std::string& corner, const std::vector<double>& rows, const std::vector<double>& cols,
                       const Eigen::MatrixXd& m) {
  std::vector<std::string> header{corner};
  for (double c : cols) header.push_back(format_double(c));
  CsvWriter w(header);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    w.cell(rows[i]);
    for (std::size_t j = 0; j < cols.size(); ++j) w.cell(m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
    w.end_row();
  }
  return w.str();
}

std::vector<double> or_single(const std::vector<double>& grid, double fallback) {
  return grid.empty() ? std::vector<double>{fallback} : grid;
}

std::vector<InitialState> initial_states(InitialState s) {
  if (s == InitialState::Both) return {InitialState::Q01, InitialState::Q10};
  return {s};
}

TwoQubitState initial_rho(InitialState s) { return TwoQubitState::basis(s == InitialState::Q01 ? k01 : k10); }

double eval_time(const QubitsSection& q) { return q.t_eval ? *q.t_eval : kPi / (4.0 * std::abs(q.j)); }

ExperimentOutput run_diode_char(const RunConfig& cfg, unsigned threads) {
  ExperimentOutput out;
  const auto& sq = *cfg.squid;
  const auto phis = or_single(cfg.grids.phi_b, sq.phi_b);
  const auto taus = or_single(cfg.grids.tau1, sq.tau1);
  std::vector<DiodeCharacterization> cells(phis.size() * taus.size());
  parallel_for(cells.size(), threads, [&](std::size_t idx) {
    SquidSection s = sq;
    s.tau1 = taus[idx / phis.size()];
    s.phi_b = phis[idx % phis.size()];
    cells[idx] = characterize(to_squid(s));
  });

  CsvWriter table({"tau1", "phi_b", "ic_plus", "ic_minus", "eta", "phi_min", "c1", "c2", "c3", "c4", "degenerate"});
  Eigen::MatrixXd c3(taus.size(), phis.size());
  std::size_t degenerate = 0;
  for (std::size_t idx = 0; idx < cells.size(); ++idx) {
    const auto& d = cells[idx];
    const std::size_t i = idx / phis.size();
    const std::size_t j = idx % phis.size();
    table.cell(taus[i]).cell(phis[j]).cell(d.ic_plus).cell(d.ic_minus).cell(d.eta).cell(d.phi_min);
    for (double c : d.c) table.cell(c);
    table.cell(d.degenerate_minimum ? "1" : "0");
    table.end_row();
    c3(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = d.c[2];
    if (d.degenerate_minimum) ++degenerate;
  }
  if (degenerate > 0) {
    out.warn("DegenerateMinimum: " + std::to_string(degenerate) +
             " grid cell(s) had two equal minima; the smaller |phi| branch was used");
  }
  out.files.push_back({cfg.prefix() + "_characterization.csv", table.str()});
  out.files.push_back({cfg.prefix() + "_c3.csv", matrix_csv("tau1\\phi_b", taus, phis, c3)});
  return out;
}

ExperimentOutput run_spectroscopy(const RunConfig& cfg) {
  ExperimentOutput out;
  const auto circuit = to_circuit(*cfg.circuit);
  const auto drive = to_drive(*cfg.drive, *cfg.circuit);
  for (const auto& w : validate(drive)) out.warn(w);

  const double split = drive.split ? *drive.split : resonance_split(circuit);
  json summary;
  summary["method"] = to_string(cfg.drive->method);
  summary["split_over_omega_r"] = split;
  summary["split_mhz"] = split * cfg.circuit->omega_r_ghz * 1e3;

  SpectrumTrace trace;
  if (cfg.drive->method == SpectrumMethod::Quantum) {
    trace = quantum_spectrum(circuit, drive);
    json pump = json::array();
    for (Direction dir : {Direction::Forward, Direction::Backward}) {
      const auto sol = pump_steady_state(circuit, drive, dir);
      const std::string name = dir == Direction::Forward ? "forward" : "backward";
      if (sol.bistable) out.warn("BistableRegion: " + name + " pump response has three steady states; low branch used");
      json p;
      p["direction"] = name;
      p["photons"] = sol.photons;
      p["re_alpha"] = sol.alpha.real();
      p["im_alpha"] = sol.alpha.imag();
      p["detuning"] = sol.detuning;
      p["bistable"] = sol.bistable;
      p["roots"] = sol.roots;
      pump.push_back(p);
    }
    summary["pump"] = pump;
  } else {
    trace = classical_spectrum(circuit, drive.probe_grid);
  }
  if (trace.zero_points > 0) {
    out.warn("ZeroTransmission: " + std::to_string(trace.zero_points) + " probe point(s) with both transmissions zero");
  }
  summary["zero_points"] = trace.zero_points;

  CsvWriter csv({"omega_over_omega_r", "re_s21", "im_s21", "re_s12", "im_s12", "abs_s21", "abs_s12", "r_ratio"});
  for (std::size_t i = 0; i < trace.omega.size(); ++i) {
    csv.cell(trace.omega[i])
        .cell(trace.s_forward[i].real())
        .cell(trace.s_forward[i].imag())
        .cell(trace.s_backward[i].real())
        .cell(trace.s_backward[i].imag())
        .cell(std::abs(trace.s_forward[i]))
        .cell(std::abs(trace.s_backward[i]))
        .cell(trace.r_ratio[i]);
    csv.end_row();
  }
  out.files.push_back({cfg.prefix() + "_spectrum.csv", csv.str()});
  out.files.push_back({cfg.prefix() + "_summary.json", summary.dump(2) + "\n"});
  return out;
}

void collect(ExperimentOutput& out, const DynamicsResult& r) {
  for (const auto& w : r.warnings) out.warn(w);
}

ExperimentOutput run_dynamics(const RunConfig& cfg, unsigned threads) {
  ExperimentOutput out;
  const auto& q = *cfg.qubits;
  const auto phis = or_single(cfg.grids.phi, q.phase);
  const auto inits = initial_states(q.initial);
  std::vector<DynamicsResult> results(phis.size() * inits.size());
  DtPolicy policy;
  policy.samples = q.samples;
  parallel_for(results.size(), threads, [&](std::size_t idx) {
    QubitsSection cell = q;
    cell.phase = phis[idx / inits.size()];
    results[idx] = evolve(to_qubits(cell), initial_rho(inits[idx % inits.size()]), q.t_final, policy);
  });

  CsvWriter csv({"phi", "init", "time", "n1", "n2", "concurrence"});
  json summary = json::array();
  for (std::size_t idx = 0; idx < results.size(); ++idx) {
    const auto& r = results[idx];
    const double phi = phis[idx / inits.size()];
    const std::string init = to_string(inits[idx % inits.size()]);
    collect(out, r);
    std::size_t peak = 0;
    for (std::size_t k = 0; k < r.times.size(); ++k) {
      csv.cell(phi).cell(init).cell(r.times[k]).cell(r.n1[k]).cell(r.n2[k]).cell(r.concurrence[k]);
      csv.end_row();
      if (r.concurrence[k] > r.concurrence[peak]) peak = k;
    }
    json s;
    s["phi"] = phi;
    s["init"] = init;
    s["peak_concurrence"] = r.concurrence[peak];
    s["peak_time"] = r.times[peak];
    s["max_trace_drift"] = r.max_trace_drift;
    s["min_eigenvalue"] = r.min_eigenvalue;
    s["physical"] = r.physical;
    summary.push_back(s);
  }
  out.files.push_back({cfg.prefix() + "_dynamics.csv", csv.str()});
  out.files.push_back({cfg.prefix() + "_summary.json", summary.dump(2) + "\n"});
  return out;
}

ExperimentOutput run_contrast(const RunConfig& cfg, unsigned threads) {
  ExperimentOutput out;
  const auto& q = *cfg.qubits;
  const TwoQubitParams base = to_qubits(q);
  const auto& phis = cfg.grids.phi;
  Eigen::MatrixXd map;
  if (!cfg.grids.gamma.empty()) {
    for (double g : cfg.grids.gamma) {
      TwoQubitParams p = base;
      p.gamma_collective = g;
      if (!rate_matrix_positive(p)) {
        out.warn("NonPositiveRateMatrix: collective rate matrix has a negative eigenvalue for part of the gamma grid");
      }
    }
    map = contrast_map(base, phis, cfg.grids.gamma, eval_time(q), threads);
    out.files.push_back({cfg.prefix() + "_contrast.csv", matrix_csv("phi\\gamma", phis, cfg.grids.gamma, map)});
  } else {
    if (!rate_matrix_positive(base)) {
      out.warn("NonPositiveRateMatrix: collective rate matrix has a negative eigenvalue");
    }
    map = contrast_time_map(base, phis, cfg.grids.time, threads);
    out.files.push_back({cfg.prefix() + "_contrast.csv", matrix_csv("phi\\time", phis, cfg.grids.time, map)});
  }
  if (map.hasNaN()) out.warn("NonPhysicalState: some contrast cells are undefined (nan)");
  return out;
}

ExperimentOutput run_tomography(const RunConfig& cfg, unsigned threads) {
  ExperimentOutput out;
  const auto& q = *cfg.qubits;
  const auto phis = or_single(cfg.grids.phi, q.phase);
  const auto gammas = or_single(cfg.grids.gamma, q.gamma_collective);
  const std::uint64_t shots = cfg.tomography ? cfg.tomography->shots : 0;
  const double t = eval_time(q);
  std::vector<ReconstructionResult> results(phis.size() * gammas.size());
  std::vector<std::vector<std::string>> warnings(results.size());
  DtPolicy policy;
  policy.samples = 2;
  parallel_for(results.size(), threads, [&](std::size_t idx) {
    QubitsSection cell = q;
    cell.phase = phis[idx / gammas.size()];
    cell.gamma_collective = gammas[idx % gammas.size()];
    const auto r = evolve(to_qubits(cell), initial_rho(q.initial), t, policy);
    warnings[idx] = r.warnings;
    TwoQubitState final_state{0.5 * (r.final_rho + r.final_rho.adjoint())};
    results[idx] = linear_reconstruct(measure_expectations(final_state, shots, cfg.seed + idx));
  });

  json cells = json::array();
  CsvWriter csv({"phi", "gamma", "psi_plus", "psi_minus", "phi_plus", "phi_minus", "physical"});
  for (std::size_t idx = 0; idx < results.size(); ++idx) {
    for (const auto& w : warnings[idx]) out.warn(w);
    const auto& r = results[idx];
    const double phi = phis[idx / gammas.size()];
    const double gamma = gammas[idx % gammas.size()];
    json cell;
    cell["phi"] = phi;
    cell["gamma"] = gamma;
    cell["time"] = t;
    cell["shots"] = shots;
    const json report = json::parse(to_json(r));
    for (const auto& [k, v] : report.items()) cell[k] = v;
    cells.push_back(cell);
    csv.cell(phi).cell(gamma);
    for (BellState b : {BellState::PsiPlus, BellState::PsiMinus, BellState::PhiPlus, BellState::PhiMinus}) {
      csv.cell(r.fidelity_targets.at(b));
    }
    csv.cell(r.physical ? "1" : "0");
    csv.end_row();
    if (!r.physical) out.warn("NonPhysicalEstimate: linear reconstruction returned a non-PSD matrix");
  }
  out.files.push_back({cfg.prefix() + "_tomography.json", cells.dump(2) + "\n"});
  out.files.push_back({cfg.prefix() + "_fidelities.csv", csv.str()});
  return out;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
  f.write(content.data(), static_cast<std::streamsize>(content.size()));
  f.flush();
  if (!f) throw std::runtime_error("failed writing " + path.string());
}

}  // namespace

std::string to_string(Experiment e) {
  switch (e) {
    case Experiment::DiodeChar: return "diode-char";
    case Experiment::Spectroscopy: return "spectroscopy";
    case Experiment::Dynamics: return "dynamics";
    case Experiment::ContrastMap: return "contrast-map";
    case Experiment::Tomography: return "tomography";
  }
  return {};
}

Experiment parse_experiment(const std::string& text) {
  const std::string t = lower(trim(text));
  for (Experiment e : {Experiment::DiodeChar, Experiment::Spectroscopy, Experiment::Dynamics, Experiment::ContrastMap,
                       Experiment::Tomography}) {
    if (t == to_string(e)) return e;
  }
  throw ParseError("run.experiment: unknown experiment '" + text +
                   "' (expected diode-char, spectroscopy, dynamics, contrast-map or tomography)");
}

const char* tool_version() { return "1.0.0"; }

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_number(const std::string& raw, const std::string& field) {
  const std::string text = trim(raw);
  if (text.empty()) throw ParseError(field + ": empty value");
  double value = 0.0;
  if (lower(text).find("pi") == std::string::npos) {
    char* end = nullptr;
    value = std::strtod(text.c_str(), &end);
    if (end != text.c_str() + text.size()) throw ParseError(field + ": cannot parse number '" + raw + "'");
  } else {
    static const std::regex re(
        R"(^([+-])?\s*(\d+\.?\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)?\s*\*?\s*pi\s*(?:/\s*(\d+\.?\d*(?:[eE][+-]?\d+)?))?$)",
        std::regex::icase);
    std::smatch m;
    if (!std::regex_match(text, m, re)) throw ParseError(field + ": cannot parse number '" + raw + "'");
    const double coeff = m[2].matched ? std::strtod(m[2].str().c_str(), nullptr) : 1.0;
    const double denom = m[3].matched ? std::strtod(m[3].str().c_str(), nullptr) : 1.0;
    if (denom == 0.0) throw ParseError(field + ": division by zero in '" + raw + "'");
    value = coeff * kPi / denom;
    if (m[1].matched && m[1].str() == "-") value = -value;
  }
  if (!std::isfinite(value)) throw ValidationError(field + " must be finite");
  return value;
}

std::vector<double> parse_grid(const std::string& raw, const std::string& field) {
  const std::string text = trim(raw);
  if (text.empty()) throw ParseError(field + ": empty grid");
  std::vector<double> values;
  if (text.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
    if (parts.size() != 3) throw ParseError(field + ": range grids are written start:stop:n");
    const double lo = parse_number(parts[0], field);
    const double hi = parse_number(parts[1], field);
    const auto n = parse_unsigned(parts[2], field);
    if (n == 0) throw ValidationError(field + ": grid must have at least one point");
    if (n == 1) {
      if (lo != hi) throw ValidationError(field + ": a one-point range needs start == stop");
      values = {lo};
    } else {
      values = linear_grid(lo, hi, n);
    }
  } else {
    std::stringstream ss(text);
    for (std::string p; std::getline(ss, p, ',');) values.push_back(parse_number(p, field));
  }
  require_finite(values, field);
  return values;
}

SquidConfig to_squid(const SquidSection& s) {
  SquidConfig out;
  out.j1 = {s.tau1, s.delta1};
  out.j2 = {s.tau2, s.delta2};
  out.phi_b = s.phi_b;
  out.temperature = s.temperature;
  return out;
}

CircuitConfig to_circuit(const CircuitSection& c) {
  CircuitConfig out;
  out.l0 = c.l0;
  out.c_shunt = c.c_shunt;
  out.r_loss = c.r_loss;
  out.z0 = c.z0;
  out.omega_r = 1.0 / std::sqrt(c.l0 * c.c_shunt);
  out.kappa1 = c.kappa1;
  out.kappa2 = c.kappa2;
  out.lambda_kerr = c.lambda_kerr;
  out.i_applied = c.i_applied;
  out.ic_plus = c.ic_plus;
  out.ic_minus = c.ic_minus;
  return out;
}

DriveConfig to_drive(const DriveSection& d, const CircuitSection& c) {
  DriveConfig out;
  out.eps_pump = d.eps_pump;
  out.omega_pump = d.omega_pump;
  out.eps_probe = d.eps_probe;
  out.probe_grid = d.probe;
  if (d.split_mhz) out.split = *d.split_mhz * 1e-3 / c.omega_r_ghz;
  out.idler = d.idler;
  return out;
}

TwoQubitParams to_qubits(const QubitsSection& q) {
  TwoQubitParams p;
  p.omega1 = q.omega1;
  p.omega2 = q.omega2;
  p.coupling = ComplexCoupling::from_polar(q.j, q.phase);
  p.gamma1 = {q.gamma1_1, q.gamma1_2};
  p.gamma_collective = q.gamma_collective;
  p.model = q.collective_model;
  return p;
}

RunConfig parse_config_text(const std::string& text) {
  pt::ptree tree;
  try {
    std::istringstream in(text);
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ParseError(std::string("malformed run file: ") + e.what());
  }

  const auto& allowed = allowed_keys();
  for (const auto& [section, body] : tree) {
    const auto it = allowed.find(section);
    if (it == allowed.end()) {
      if (body.empty()) throw ParseError("key '" + section + "' must belong to a section");
      throw ParseError("unknown section [" + section + "]");
    }
    for (const auto& [key, value] : body) {
      if (!it->second.count(key)) throw ParseError("unknown key '" + key + "' in section [" + section + "]");
    }
  }
  auto section = [&](const std::string& name) -> std::optional<Section> {
    const auto child = tree.get_child_optional(pt::ptree::path_type(name, '\0'));
    if (!child) return std::nullopt;
    return Section(name, *child);
  };

  RunConfig cfg;
  const auto run = section("run");
  if (!run) throw ValidationError("missing [run] section");
  const auto experiment = run->raw("experiment");
  if (!experiment) throw ValidationError("run.experiment is required");
  cfg.experiment = parse_experiment(*experiment);
  if (auto v = run->raw("label")) cfg.label = trim(*v);
  if (auto v = run->raw("seed")) cfg.seed = parse_unsigned(*v, "run.seed");
  if (auto v = run->raw("output_dir")) cfg.output_dir = trim(*v);

  if (auto s = section("squid")) {
    SquidSection sq;
    s->number("tau1", sq.tau1);
    s->number("tau2", sq.tau2);
    s->number("delta1", sq.delta1);
    s->number("delta2", sq.delta2);
    s->number("phi_b", sq.phi_b);
    s->number("temperature", sq.temperature);
    cfg.squid = sq;
  }
  if (auto s = section("circuit")) {
    CircuitSection c;
    s->number("omega_r_ghz", c.omega_r_ghz);
    s->number("l0", c.l0);
    s->number("c_shunt", c.c_shunt);
    s->number("r_loss", c.r_loss);
    s->number("z0", c.z0);
    s->number("kappa1", c.kappa1);
    s->number("kappa2", c.kappa2);
    s->number("lambda_kerr", c.lambda_kerr);
    s->number("i_applied", c.i_applied);
    s->number("ic_plus", c.ic_plus);
    s->number("ic_minus", c.ic_minus);
    cfg.circuit = c;
  }
  if (auto s = section("drive")) {
    DriveSection d;
    s->number("eps_pump", d.eps_pump);
    s->number("omega_pump", d.omega_pump);
    s->number("eps_probe", d.eps_probe);
    s->grid("probe", d.probe);
    s->number("split_mhz", d.split_mhz);
    if (auto v = s->raw("method")) {
      const std::string m = lower(trim(*v));
      if (m == "quantum") d.method = SpectrumMethod::Quantum;
      else if (m == "classical") d.method = SpectrumMethod::Classical;
      else throw ParseError("drive.method: expected quantum or classical, got '" + *v + "'");
    }
    if (auto v = s->raw("idler")) d.idler = parse_bool(*v, "drive.idler");
    cfg.drive = d;
  }
  if (auto s = section("qubits")) {
    QubitsSection q;
    s->number("j", q.j);
    s->number("phase", q.phase);
    s->number("omega1", q.omega1);
    s->number("omega2", q.omega2);
    s->number("gamma1_1", q.gamma1_1);
    s->number("gamma1_2", q.gamma1_2);
    s->number("gamma_collective", q.gamma_collective);
    if (auto v = s->raw("collective_model")) {
      const std::string m = lower(trim(*v));
      if (m == "correlated") q.collective_model = CollectiveModel::Correlated;
      else if (m == "cross-only") q.collective_model = CollectiveModel::CrossOnly;
      else throw ParseError("qubits.collective_model: expected correlated or cross-only, got '" + *v + "'");
    }
    if (auto v = s->raw("initial")) {
      const std::string m = lower(trim(*v));
      if (m == "01") q.initial = InitialState::Q01;
      else if (m == "10") q.initial = InitialState::Q10;
      else if (m == "both") q.initial = InitialState::Both;
      else throw ParseError("qubits.initial: expected 01, 10 or both, got '" + *v + "'");
    }
    s->number("t_final", q.t_final);
    s->number("t_eval", q.t_eval);
    if (auto v = s->raw("samples")) q.samples = parse_unsigned(*v, "qubits.samples");
    cfg.qubits = q;
  }
  if (auto s = section("tomography")) {
    TomographySection t;
    if (auto v = s->raw("shots")) t.shots = parse_unsigned(*v, "tomography.shots");
    cfg.tomography = t;
  }
  if (auto s = section("grids")) {
    s->grid("phi_b", cfg.grids.phi_b);
    s->grid("tau1", cfg.grids.tau1);
    s->grid("phi", cfg.grids.phi);
    s->grid("gamma", cfg.grids.gamma);
    s->grid("time", cfg.grids.time);
  }
  validate(cfg);
  return cfg;
}

RunConfig parse_config(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ParseError("cannot read run file " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_config_text(ss.str());
}

void validate(const RunConfig& cfg) {
  const std::string ex = "experiment=" + to_string(cfg.experiment);
  auto need = [&](bool present, const std::string& section) {
    if (!present) throw ValidationError(ex + " requires a [" + section + "] section");
  };
  auto need_grid = [&](const std::vector<double>& g, const std::string& name) {
    if (g.empty()) throw ValidationError(ex + " requires grids." + name);
  };
  if (cfg.output_dir.empty()) throw ValidationError("run.output_dir must be nonempty");
  if (cfg.label.find_first_of("/\\") != std::string::npos) throw ValidationError("run.label must not contain '/'");

  if (cfg.squid) {
    const auto& s = *cfg.squid;
    validate(JunctionParams{s.tau1, s.delta1}, "squid.tau1");
    validate(JunctionParams{s.tau2, s.delta2}, "squid.tau2");
    validate(to_squid(s));
    for (double t : cfg.grids.tau1) validate(JunctionParams{t, s.delta1}, "grids.tau1");
  }
  if (cfg.circuit) {
    if (!(cfg.circuit->omega_r_ghz > 0.0)) throw ValidationError("circuit.omega_r_ghz must be > 0");
    validate(to_circuit(*cfg.circuit));
  }
  if (cfg.drive) {
    if (!cfg.circuit) throw ValidationError("[drive] requires a [circuit] section");
    if (cfg.drive->split_mhz && !std::isfinite(*cfg.drive->split_mhz)) {
      throw ValidationError("drive.split_mhz must be finite");
    }
    validate(to_drive(*cfg.drive, *cfg.circuit));
  }
  if (cfg.qubits) {
    const auto& q = *cfg.qubits;
    validate(to_qubits(q));
    if (!(q.j > 0.0)) throw ValidationError("qubits.j must be > 0");
    if (!(q.t_final >= 0.0)) throw ValidationError("qubits.t_final must be >= 0");
    if (q.t_eval && !(*q.t_eval >= 0.0)) throw ValidationError("qubits.t_eval must be >= 0");
    if (q.samples < 2) throw ValidationError("qubits.samples must be >= 2");
  }
  for (double g : cfg.grids.gamma) {
    if (!(g >= 0.0)) throw ValidationError("grids.gamma values must be >= 0");
  }
  for (std::size_t i = 0; i < cfg.grids.time.size(); ++i) {
    if (!(cfg.grids.time[i] >= 0.0) || (i > 0 && !(cfg.grids.time[i] >= cfg.grids.time[i - 1]))) {
      throw ValidationError("grids.time must be nonnegative and ascending");
    }
  }

  switch (cfg.experiment) {
    case Experiment::DiodeChar:
      need(cfg.squid.has_value(), "squid");
      break;
    case Experiment::Spectroscopy:
      need(cfg.circuit.has_value(), "circuit");
      need(cfg.drive.has_value(), "drive");
      if (cfg.drive->probe.empty()) throw ValidationError(ex + " requires drive.probe");
      break;
    case Experiment::Dynamics:
      need(cfg.qubits.has_value(), "qubits");
      break;
    case Experiment::ContrastMap:
      need(cfg.qubits.has_value(), "qubits");
      need_grid(cfg.grids.phi, "phi");
      if (cfg.grids.gamma.empty() == cfg.grids.time.empty()) {
        throw ValidationError(ex + " requires exactly one of grids.gamma or grids.time");
      }
      if (!cfg.grids.time.empty() && cfg.grids.time.front() != 0.0) {
        throw ValidationError("grids.time must start at 0");
      }
      break;
    case Experiment::Tomography:
      need(cfg.qubits.has_value(), "qubits");
      if (cfg.qubits->initial == InitialState::Both) {
        throw ValidationError("qubits.initial must be 01 or 10 for " + ex);
      }
      break;
  }
}

std::string serialize(const RunConfig& cfg) {
  std::ostringstream out;
  auto kv = [&](const std::string& k, const std::string& v) { out << k << " = " << v << '\n'; };
  auto num = [&](const std::string& k, double v) { kv(k, format_double(v)); };

  out << "[run]\n";
  kv("experiment", to_string(cfg.experiment));
  if (!cfg.label.empty()) kv("label", cfg.label);
  kv("seed", std::to_string(cfg.seed));
  kv("output_dir", cfg.output_dir);
  if (cfg.squid) {
    const auto& s = *cfg.squid;
    out << "\n[squid]\n";
    num("tau1", s.tau1);
    num("tau2", s.tau2);
    num("delta1", s.delta1);
    num("delta2", s.delta2);
    num("phi_b", s.phi_b);
    num("temperature", s.temperature);
  }
  if (cfg.circuit) {
    const auto& c = *cfg.circuit;
    out << "\n[circuit]\n";
    num("omega_r_ghz", c.omega_r_ghz);
    num("l0", c.l0);
    num("c_shunt", c.c_shunt);
    num("r_loss", c.r_loss);
    num("z0", c.z0);
    num("kappa1", c.kappa1);
    num("kappa2", c.kappa2);
    num("lambda_kerr", c.lambda_kerr);
    num("i_applied", c.i_applied);
    num("ic_plus", c.ic_plus);
    num("ic_minus", c.ic_minus);
  }
  if (cfg.drive) {
    const auto& d = *cfg.drive;
    out << "\n[drive]\n";
    num("eps_pump", d.eps_pump);
    num("omega_pump", d.omega_pump);
    num("eps_probe", d.eps_probe);
    if (!d.probe.empty()) kv("probe", grid_text(d.probe));
    if (d.split_mhz) num("split_mhz", *d.split_mhz);
    kv("method", to_string(d.method));
    kv("idler", d.idler ? "true" : "false");
  }
  if (cfg.qubits) {
    const auto& q = *cfg.qubits;
    out << "\n[qubits]\n";
    num("j", q.j);
    num("phase", q.phase);
    num("omega1", q.omega1);
    num("omega2", q.omega2);
    num("gamma1_1", q.gamma1_1);
    num("gamma1_2", q.gamma1_2);
    num("gamma_collective", q.gamma_collective);
    kv("collective_model", to_string(q.collective_model));
    kv("initial", to_string(q.initial));
    num("t_final", q.t_final);
    if (q.t_eval) num("t_eval", *q.t_eval);
    kv("samples", std::to_string(q.samples));
  }
  if (cfg.tomography) {
    out << "\n[tomography]\n";
    kv("shots", std::to_string(cfg.tomography->shots));
  }
  const auto& g = cfg.grids;
  if (!(g.phi_b.empty() && g.tau1.empty() && g.phi.empty() && g.gamma.empty() && g.time.empty())) {
    out << "\n[grids]\n";
    if (!g.phi_b.empty()) kv("phi_b", grid_text(g.phi_b));
    if (!g.tau1.empty()) kv("tau1", grid_text(g.tau1));
    if (!g.phi.empty()) kv("phi", grid_text(g.phi));
    if (!g.gamma.empty()) kv("gamma", grid_text(g.gamma));
    if (!g.time.empty()) kv("time", grid_text(g.time));
  }
  return out.str();
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 computation failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xf];
  }
  return out;
}

RunManifest run_experiment(const RunConfig& cfg, const RunOptions& options) {
  validate(cfg);
  RunManifest manifest;
  manifest.version = tool_version();
  const std::string config_text = serialize(cfg);
  manifest.config_hash = sha256_hex(config_text);
  manifest.started_utc = utc_now();

  ExperimentOutput result;
  try {
    switch (cfg.experiment) {
      case Experiment::DiodeChar: result = run_diode_char(cfg, options.threads); break;
      case Experiment::Spectroscopy: result = run_spectroscopy(cfg); break;
      case Experiment::Dynamics: result = run_dynamics(cfg, options.threads); break;
      case Experiment::ContrastMap: result = run_contrast(cfg, options.threads); break;
      case Experiment::Tomography: result = run_tomography(cfg, options.threads); break;
    }
  } catch (const Error& e) {
    throw Error(e.kind(), cfg.prefix() + " (" + to_string(cfg.experiment) + "): " + e.what());
  }
  result.files.insert(result.files.begin(), {cfg.prefix() + "_config.ini", config_text});

  const std::filesystem::path dir = options.output_dir ? *options.output_dir : std::filesystem::path(cfg.output_dir);
  std::filesystem::create_directories(dir);
  for (const auto& f : result.files) {
    write_file(dir / f.name, f.content);
    manifest.files.push_back({f.name, f.content.size(), sha256_hex(f.content)});
  }
  manifest.warnings = result.warnings;
  manifest.finished_utc = utc_now();

  json doc;
  doc["config_hash"] = manifest.config_hash;
  doc["version"] = manifest.version;
  doc["experiment"] = to_string(cfg.experiment);
  doc["label"] = cfg.prefix();
  doc["seed"] = cfg.seed;
  doc["started_utc"] = manifest.started_utc;
  doc["finished_utc"] = manifest.finished_utc;
  json files = json::array();
  for (const auto& f : manifest.files) files.push_back({{"name", f.name}, {"bytes", f.bytes}, {"sha256", f.sha256}});
  doc["files"] = files;
  doc["warnings"] = manifest.warnings;
  manifest.path = dir / (cfg.prefix() + "_manifest.json");
  write_file(manifest.path, doc.dump(2) + "\n");
  return manifest;
}

std::vector<std::string> list_presets() {
  return {"fig2a", "fig2b", "fig2c", "fig2d", "fig3ab", "fig3cd", "fig3ef", "fig3g", "fig3h", "fig4"};
}

RunConfig preset_config(const std::string& name) {
  RunConfig cfg;
  cfg.label = name;
  cfg.output_dir = "out/" + name;

  auto spectroscopy = [&](double split_mhz) {
    cfg.experiment = Experiment::Spectroscopy;
    cfg.circuit = CircuitSection{};
    DriveSection d;
    d.eps_pump = 0.1;
    d.omega_pump = 0.99;
    d.probe = linear_grid(0.8, 1.2, 4001);
    d.split_mhz = split_mhz;
    cfg.drive = d;
  };
  auto qubits = [&](double gamma, InitialState init) {
    QubitsSection q;
    q.j = 1.0;
    q.gamma_collective = gamma;
    q.initial = init;
    q.t_final = 5.0;
    q.samples = 501;
    cfg.qubits = q;
  };
  const std::vector<double> three_phases{-kPi / 2, 0.0, kPi / 2};

  if (name == "fig2a") {
    spectroscopy(0.0);
  } else if (name == "fig2b" || name == "fig2c") {
    spectroscopy(50.0);
  } else if (name == "fig2d") {
    cfg.experiment = Experiment::DiodeChar;
    SquidSection s;
    s.tau2 = 0.8;
    cfg.squid = s;
    cfg.grids.phi_b = linear_grid(-kPi, kPi, 41);
    cfg.grids.tau1 = linear_grid(0.05, 0.95, 41);
  } else if (name == "fig3ab" || name == "fig3cd" || name == "fig3ef") {
    cfg.experiment = Experiment::Dynamics;
    const InitialState init =
        name == "fig3ab" ? InitialState::Q01 : (name == "fig3cd" ? InitialState::Q10 : InitialState::Both);
    qubits(0.5, init);
    cfg.grids.phi = three_phases;
  } else if (name == "fig3g") {
    cfg.experiment = Experiment::ContrastMap;
    qubits(0.0, InitialState::Both);
    cfg.qubits->t_eval = kPi / 4.0;
    cfg.grids.phi = linear_grid(-kPi, kPi, 41);
    cfg.grids.gamma = linear_grid(0.0, 4.0, 41);
  } else if (name == "fig3h") {
    cfg.experiment = Experiment::ContrastMap;
    qubits(1.0, InitialState::Both);
    cfg.grids.phi = linear_grid(-kPi, kPi, 41);
    cfg.grids.time = linear_grid(0.0, 3.0, 61);
  } else if (name == "fig4") {
    cfg.experiment = Experiment::Tomography;
    qubits(0.0, InitialState::Q01);
    cfg.tomography = TomographySection{};
    cfg.grids.phi = {kPi / 2, -kPi / 2, kPi / 4, -kPi / 4};
    cfg.grids.gamma = {0.0, 1.0};
  } else {
    throw ValidationError("unknown preset '" + name + "'");
  }
  validate(cfg);
  return cfg;
}

}  // namespace sdq
