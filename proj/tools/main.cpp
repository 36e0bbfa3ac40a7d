#include "commands.hpp"
#include "run_spec.hpp"

#include "nmt/errors.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <thread>

namespace {

unsigned default_workers() {
  const unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : n;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace nmt::cli;

  CLI::App app{"Energy transport through dissipative two-level chains with controllable "
               "non-Markovian dephasing"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  unsigned workers = default_workers();
  double t_max = 0.0;
  double residual_eps = 0.0;

  auto add_overrides = [&](CLI::App* cmd) {
    cmd->add_option("--out", out_dir, "Output directory");
    cmd->add_option("--t-max", t_max, "Hard cap on integration time")->check(CLI::PositiveNumber);
    cmd->add_option("--residual-eps", residual_eps, "Stop once chain excitation falls below this")
        ->check(CLI::PositiveNumber);
  };

  auto* simulate = app.add_subcommand("simulate", "Integrate one chain configuration");
  simulate->add_option("--config", config_path, "YAML configuration file")->required();
  add_overrides(simulate);

  std::string preset_name;
  auto* preset = app.add_subcommand("preset", "Run a published experiment (fig2, fig3, fig4)");
  preset->add_option("name", preset_name, "Preset name")->required();
  preset->add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);
  add_overrides(preset);

  auto* sweep = app.add_subcommand("sweep", "Run the sweep section of a configuration file");
  sweep->add_option("--config", config_path, "YAML configuration file")->required();
  sweep->add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);
  add_overrides(sweep);

  std::string level = "fast";
  auto* validate = app.add_subcommand("validate", "Check the solver against independent oracles");
  validate->add_option("--level", level, "fast or full")
      ->check(CLI::IsMember({"fast", "full"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(kConfigError);
  }

  Overrides overrides;
  if (!out_dir.empty()) overrides.out_dir = out_dir;
  if (t_max > 0.0) overrides.t_max = t_max;
  if (residual_eps > 0.0) overrides.residual_eps = residual_eps;

  auto load = [&](RunSpec& spec) {
    try {
      spec = load_run_spec(config_path);
      apply_overrides(spec, overrides);
      return true;
    } catch (const nmt::ConfigError& e) {
      std::cerr << "error: " << e.what() << '\n';
      return false;
    }
  };

  if (*simulate) {
    RunSpec spec;
    if (!load(spec)) return kConfigError;
    return cmd_simulate(spec, std::cout, std::cerr);
  }
  if (*sweep) {
    RunSpec spec;
    if (!load(spec)) return kConfigError;
    return cmd_sweep(spec, workers, std::cout, std::cerr);
  }
  if (*preset) {
    const std::filesystem::path dir = out_dir.empty() ? std::filesystem::path(preset_name)
                                                      : std::filesystem::path(out_dir);
    return cmd_preset(preset_name, workers, dir, overrides, std::cout, std::cerr);
  }
  return cmd_validate(level == "full" ? ValidationLevel::Full : ValidationLevel::Fast, std::cout,
                      std::cerr);
}
