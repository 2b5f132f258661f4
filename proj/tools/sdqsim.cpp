#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "sdq/cli_io.hpp"
#include "sdq/errors.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitIo = 1;
constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;

unsigned thread_cap() {
  const char* env = std::getenv("SDQSIM_THREADS");
  if (env == nullptr || *env == '\0') return 0;
  try {
    const long v = std::stol(env);
    if (v > 0) return static_cast<unsigned>(v);
  } catch (const std::exception&) {
  }
  std::cerr << "warning: ignoring SDQSIM_THREADS='" << env << "' (expected a positive integer)\n";
  return 0;
}

void report(const sdq::RunManifest& m) {
  for (const auto& f : m.files) std::cout << "wrote " << f.name << '\n';
  for (const auto& w : m.warnings) std::cerr << "warning: " << w << '\n';
  std::cout << "manifest " << m.path.string() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Superconducting-diode circuit simulator"};
  app.require_subcommand(1);

  std::string config_path;
  auto* run = app.add_subcommand("run", "Run the experiment described by a run file");
  run->add_option("config", config_path, "Run file (INI)")->required();
  std::string run_out;
  run->add_option("--out", run_out, "Override run.output_dir");

  std::string preset_name;
  std::string preset_out;
  bool print_config = false;
  auto* preset = app.add_subcommand("preset", "Run a built-in figure preset");
  preset->add_option("name", preset_name, "Preset name (see list-presets)")->required();
  preset->add_option("--out", preset_out, "Output directory (default out/<name>)");
  preset->add_flag("--print-config", print_config, "Print the preset's run file instead of running it");

  app.add_subcommand("list-presets", "List built-in presets");

  std::string validate_path;
  auto* validate = app.add_subcommand("validate", "Parse and check a run file without running it");
  validate->add_option("config", validate_path, "Run file (INI)")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    sdq::RunOptions options;
    options.threads = thread_cap();
    if (app.got_subcommand("list-presets")) {
      for (const auto& name : sdq::list_presets()) std::cout << name << '\n';
    } else if (app.got_subcommand(validate)) {
      const auto cfg = sdq::parse_config(validate_path);
      std::cout << "ok: " << sdq::to_string(cfg.experiment) << " (" << cfg.prefix() << ")\n";
    } else if (app.got_subcommand(run)) {
      const auto cfg = sdq::parse_config(config_path);
      if (!run_out.empty()) options.output_dir = run_out;
      report(sdq::run_experiment(cfg, options));
    } else if (app.got_subcommand(preset)) {
      const auto cfg = sdq::preset_config(preset_name);
      if (print_config) {
        std::cout << sdq::serialize(cfg);
        return kExitOk;
      }
      if (!preset_out.empty()) options.output_dir = preset_out;
      report(sdq::run_experiment(cfg, options));
    }
  } catch (const sdq::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.kind() == sdq::ErrorKind::Validation ? kExitValidation : kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  }
  return kExitOk;
}
