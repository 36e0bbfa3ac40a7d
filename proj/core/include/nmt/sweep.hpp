#pragma once

#include "nmt/integrator.hpp"
#include "nmt/model.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace nmt {

enum class SweepParameter { LambdaUniform, NSites, GammaSite, J, Theta, KappaSink };

std::string_view to_string(SweepParameter p);
std::optional<SweepParameter> parse_sweep_parameter(std::string_view name);

enum class ScenarioKind {
  /// Constant rates: J = 0 on every dephased site.
  Markovian,
  /// (J, theta) control on every dephased site.
  NonMarkovian,
  /// gamma_i(t) = 0 on every site.
  NoDephasing,
};

std::string_view to_string(ScenarioKind k);
std::optional<ScenarioKind> parse_scenario_kind(std::string_view name);

struct Scenario {
  std::string label;
  ScenarioKind kind = ScenarioKind::Markovian;
  double J = 0.0;
  double theta = 0.0;

  static Scenario markovian() { return {"markovian", ScenarioKind::Markovian}; }
  static Scenario no_dephasing() { return {"no_dephasing", ScenarioKind::NoDephasing}; }
  static Scenario non_markovian(double J, double theta, std::string label = "non_markovian") {
    return {std::move(label), ScenarioKind::NonMarkovian, J, theta};
  }

  bool operator==(const Scenario&) const = default;
};

/// Declarative sweep: one parameter varied over `values`, every value run
/// under every scenario.
struct ExperimentConfig {
  std::string name = "experiment";
  ChainModel base = ChainModel::uniform(1, 1.0, 0.0, 0.0, 0.0);
  /// Baseline dephasing rate per site.
  std::vector<double> gamma;
  /// Sites (zero-based) the scenario schedules apply to; the rest are never
  /// dephased. Empty means every site.
  std::vector<std::size_t> dephased_sites;
  /// Whether dephased sites also get the energy-shift term.
  bool apply_shift = true;

  SweepParameter parameter = SweepParameter::LambdaUniform;
  /// Zero-based site for SweepParameter::GammaSite.
  std::size_t gamma_site = 0;
  std::vector<double> values;
  std::vector<Scenario> scenarios;

  IntegratorConfig integrator;

  bool write_trajectories = false;
  /// Trajectories are integrated at least this far even after convergence.
  double trajectory_horizon = 0.0;
  /// Minimum spacing between trajectory rows.
  double trajectory_min_dt = 0.0;

  /// Throws ConfigError for an empty sweep, duplicate or malformed scenarios,
  /// or any cell whose model cannot be built.
  void validate() const;

  bool operator==(const ExperimentConfig&) const = default;
};

struct CellInputs {
  ChainModel model;
  std::vector<DephasingSchedule> schedules;
};

/// Model and schedules for one (sweep value, scenario) cell.
CellInputs cell_inputs(const ExperimentConfig& config, double value, const Scenario& scenario);

enum class CellStatus { Ok, NotConverged, SingularSchedule, StepSizeUnderflow, Failed };
std::string_view to_string(CellStatus s);

struct SweepRow {
  std::string sweep_param;
  double sweep_value = 0.0;
  std::string scenario;
  double eta = 0.0;
  double eta_uncertainty = 0.0;
  double t_end = 0.0;
  std::size_t n_steps = 0;
  CellStatus status = CellStatus::Ok;
  std::string message;
};

struct SweepResult {
  std::string experiment;
  /// Value-major, scenario-minor, independent of worker count.
  std::vector<SweepRow> rows;
  /// Parallel to rows when trajectories were requested, otherwise empty.
  std::vector<Trajectory> trajectories;

  const SweepRow& at(double value, std::string_view scenario) const;
};

/// Runs every cell on a pool of `workers` threads. Numerical failures are
/// recorded per row; configuration errors throw before any cell runs.
SweepResult run_sweep(const ExperimentConfig& config, unsigned workers);

inline constexpr std::string_view kSummaryHeader =
    "sweep_param,sweep_value,scenario,eta,eta_uncertainty,t_end,n_steps,status";

/// CSV rows (with header) for one or more sweep results.
void write_summary_csv(std::ostream& os, std::span<const SweepResult> results);
void write_summary_csv(const std::filesystem::path& path, std::span<const SweepResult> results);

/// `t,p_sink,p_site_1..N,trace`
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);

/// `<experiment>_<scenario>_<value>.csv`
std::string trajectory_file_name(std::string_view experiment, std::string_view scenario,
                                 double value);

/// Writes one trajectory file per row into `dir`; returns the paths written.
std::vector<std::filesystem::path> write_trajectories(const std::filesystem::path& dir,
                                                      const SweepResult& result);

/// Shortest round-trip decimal form used in file names and CSV cells.
std::string format_number(double v);

// Presets reconstructing the published experiments.

struct Preset {
  std::string name;
  std::vector<ExperimentConfig> experiments;
};

/// N = 2, omega = 1, kappa = gamma = 0.1, kappa_sink = 0.6, lambda in
/// {0.1, 0.3, 0.5, 0.7}; Markovian, (J=10, theta=0.8) and (J=10, theta=pi/3).
Preset preset_fig2();

/// omega = 2, kappa = 0.1, gamma = 0.2, kappa_sink = 0.6, N in {2..8};
/// Markovian, non-Markovian (J=10, theta=0.8) and no dephasing. The
/// coupling values are not stated with the published curves; one experiment
/// per lambda in {0.1, 0.2, 0.3} is a reconstruction.
Preset preset_fig3();

/// N = 3, omega = (0.5, 2, 0.5), lambda = 0.2, kappa = 0.05,
/// kappa_sink = 0.6, dephasing on the middle site only, gamma_2 swept over
/// 41 points in [0, 1]; Markovian and (J=10, theta=0.8).
Preset preset_fig4();

std::optional<Preset> preset_by_name(std::string_view name);

/// Largest eta over the sweep minus eta at the first sweep value, for one
/// scenario. Throws RangeTooNarrow if the maximum sits on either endpoint.
struct PeakGain {
  double gain;
  double argmax;
  double eta_at_start;
  double eta_max;
};
PeakGain peak_gain(const SweepResult& result, std::string_view scenario);

struct ClaimCheck {
  std::string name;
  bool pass;
  std::string detail;
};

/// Evaluates the published qualitative and quantitative statements that go
/// with a preset against its results.
std::vector<ClaimCheck> evaluate_claims(const Preset& preset,
                                        std::span<const SweepResult> results);

/// Reference values and tolerance for the dephasing-assisted transport gain.
inline constexpr double kFig4GainNonMarkovian = 0.0327;
inline constexpr double kFig4GainMarkovian = 0.0192;
inline constexpr double kFig4GainTolerance = 0.003;

}  // namespace nmt
