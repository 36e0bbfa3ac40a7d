#include "commands.hpp"
#include "run_spec.hpp"

#include "nmt/errors.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

namespace nmt::cli {
namespace {

namespace fs = std::filesystem;

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("nmt_cli_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

constexpr const char* kCascade = R"(
name: cascade
chain:
  omega: [1.0]
  kappa: 0.1
  kappa_sink: 0.6
)";

TEST(EvaluateNumber, ArithmeticWithPi) {
  EXPECT_DOUBLE_EQ(evaluate_number("pi/3"), std::numbers::pi / 3);
  EXPECT_DOUBLE_EQ(evaluate_number("-2.5e-3"), -2.5e-3);
  EXPECT_DOUBLE_EQ(evaluate_number("2*(pi - 1) / 4"), (std::numbers::pi - 1) / 2);
  EXPECT_THROW(evaluate_number("pi/"), ConfigError);
  EXPECT_THROW(evaluate_number("3 apples"), ConfigError);
  EXPECT_THROW(evaluate_number("1/0"), ConfigError);
}

TEST(ParseRunSpec, Minimal) {
  const RunSpec s = parse_run_spec(kCascade);
  EXPECT_EQ(s.name, "cascade");
  EXPECT_EQ(s.chain, ChainModel({1.0}, {}, {0.1}, 0.6));
  ASSERT_EQ(s.schedules.size(), 1u);
  EXPECT_EQ(s.schedules[0], DephasingSchedule{});
  EXPECT_EQ(s.integrator, IntegratorConfig{});
  EXPECT_FALSE(s.sweep.has_value());
}

TEST(ParseRunSpec, PerSiteDephasingAndPiAngles) {
  const RunSpec s = parse_run_spec(R"(
chain: {omega: [1, 1], lambda: [0.3], kappa: [0.1, 0.2], kappa_sink: 0.6}
dephasing:
  - {gamma: 0.1, J: 10, theta: pi/3}
  - {gamma: 0.2, shift: false}
integrator: {rel_tol: 1e-9, max_step: 0.001}
)");
  EXPECT_EQ(s.schedules[0], (DephasingSchedule{0.1, 10.0, std::numbers::pi / 3, true}));
  EXPECT_EQ(s.schedules[1], (DephasingSchedule{0.2, 0.0, 0.0, false}));
  EXPECT_EQ(s.integrator.rel_tol, 1e-9);
  EXPECT_EQ(s.integrator.max_step, 0.001);
}

TEST(ParseRunSpec, RejectsUnknownAndInvalid) {
  EXPECT_THROW(parse_run_spec(std::string(kCascade) + "colour: blue\n"), ConfigError);
  EXPECT_THROW(parse_run_spec("chain: {omega: [1], kappa: 0.1, kappa_sink: 0.6, extra: 1}"),
               ConfigError);
  EXPECT_THROW(parse_run_spec("chain: {omega: [1, 1], kappa: 0.1, kappa_sink: 0.6}"), ConfigError);
  EXPECT_THROW(parse_run_spec("chain: {omega: [1], kappa: -0.1, kappa_sink: 0.6}"), ConfigError);
  EXPECT_THROW(parse_run_spec("chain: {omega: [1], kappa: 0.1, kappa_sink: 0.6}\n"
                              "integrator: {rel_tol: 0}"),
               ConfigError);
  EXPECT_THROW(parse_run_spec("chain: [1, 2"), ConfigError);
}

TEST(ParseRunSpec, SweepSection) {
  const RunSpec s = parse_run_spec(R"(
chain: {omega: [0.5, 2, 0.5], lambda: [0.2, 0.2], kappa: 0.05, kappa_sink: 0.6}
dephasing: {gamma: 0}
sweep:
  parameter: gamma_site
  site: 2
  range: {from: 0, to: 1, count: 5}
  dephased_sites: [2]
  shift: false
  scenarios:
    - {kind: markovian}
    - {kind: non_markovian, label: nm, J: 10, theta: 0.8}
)");
  ASSERT_TRUE(s.sweep.has_value());
  EXPECT_EQ(s.sweep->parameter, SweepParameter::GammaSite);
  EXPECT_EQ(s.sweep->gamma_site, 1u);
  EXPECT_EQ(s.sweep->values, (std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0}));
  EXPECT_EQ(s.sweep->dephased_sites, (std::vector<std::size_t>{1}));
  EXPECT_FALSE(s.sweep->apply_shift);
  EXPECT_EQ(s.sweep->scenarios[1], Scenario::non_markovian(10.0, 0.8, "nm"));
}

TEST(ToYaml, PresetsRoundTrip) {
  for (const auto& preset : {preset_fig2(), preset_fig3(), preset_fig4()}) {
    for (const auto& exp : preset.experiments) {
      const RunSpec s = parse_run_spec(to_yaml(exp));
      ASSERT_TRUE(s.sweep.has_value()) << exp.name;
      EXPECT_EQ(*s.sweep, exp) << exp.name << "\n" << to_yaml(exp);
    }
  }
}

TEST(Overrides, ReplaceFields) {
  RunSpec s = parse_run_spec(kCascade);
  apply_overrides(s, {fs::path("elsewhere"), 12.0, 1e-4});
  EXPECT_EQ(s.out_dir, fs::path("elsewhere"));
  EXPECT_EQ(s.integrator.t_max, 12.0);
  EXPECT_EQ(s.integrator.residual_eps, 1e-4);
  EXPECT_THROW(apply_overrides(s, {std::nullopt, -1.0, std::nullopt}), ConfigError);
}

TEST(LoadRunSpec, MissingFileNamesPath) {
  const fs::path missing = fs::temp_directory_path() / "nmt_definitely_missing.yaml";
  try {
    load_run_spec(missing);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find(missing.string()), std::string::npos);
  }
}

TEST(CmdSimulate, CascadeEfficiency) {
  RunSpec s = parse_run_spec(kCascade);
  s.out_dir = scratch_dir("simulate");
  std::ostringstream out, err;
  EXPECT_EQ(cmd_simulate(s, out, err), kOk) << err.str();
  EXPECT_NE(out.str().find("eta = 0.857143 +/- "), std::string::npos) << out.str();
  std::ifstream csv(s.out_dir / "cascade_trajectory.csv");
  std::string header;
  std::getline(csv, header);
  EXPECT_EQ(header, "t,p_sink,p_site_1,trace");
}

TEST(CmdSimulate, PoleCrossingIsConfigError) {
  RunSpec s = parse_run_spec(std::string(kCascade) +
                             "dephasing: {gamma: 0.1, J: 10, theta: pi/4}\n");
  s.out_dir = scratch_dir("pole");
  std::ostringstream out, err;
  EXPECT_EQ(cmd_simulate(s, out, err), kConfigError);
  EXPECT_NE(err.str().find("SingularSchedule"), std::string::npos) << err.str();
}

TEST(CmdSimulate, UnconvergedExitCode) {
  RunSpec s = parse_run_spec(kCascade);
  s.out_dir = scratch_dir("tmax");
  s.integrator.t_max = 0.5;
  std::ostringstream out, err;
  EXPECT_EQ(cmd_simulate(s, out, err), kNotConverged);
  EXPECT_NE(err.str().find("NotConverged"), std::string::npos) << err.str();
}

TEST(CmdPreset, UnknownNameIsConfigError) {
  std::ostringstream out, err;
  EXPECT_EQ(cmd_preset("fig9", 1, scratch_dir("unknown"), {}, out, err), kConfigError);
}

TEST(CmdPreset, TimeSeriesPresetWritesEveryCell) {
  const fs::path dir = scratch_dir("fig2");
  std::ostringstream out, err;
  EXPECT_EQ(cmd_preset("fig2", 4, dir, {}, out, err), kOk) << err.str() << out.str();
  std::size_t trajectories = 0;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.path().filename().string().rfind("fig2_", 0) == 0) ++trajectories;
  EXPECT_EQ(trajectories, 12u);
  EXPECT_TRUE(fs::exists(dir / "summary.csv"));
  std::ifstream claims(dir / "claims.txt");
  std::string line;
  std::size_t n = 0;
  while (std::getline(claims, line)) {
    EXPECT_EQ(line.rfind("PASS ", 0), 0u) << line;
    ++n;
  }
  EXPECT_GE(n, 3u);
}

TEST(CmdSweep, RequiresSweepSection) {
  RunSpec s = parse_run_spec(kCascade);
  s.out_dir = scratch_dir("nosweep");
  std::ostringstream out, err;
  EXPECT_EQ(cmd_sweep(s, 1, out, err), kConfigError);
}

}  // namespace
}  // namespace nmt::cli
