#include "nmt/sweep.hpp"

#include "nmt/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <ostream>
#include <set>
#include <thread>

namespace nmt {

std::string_view to_string(SweepParameter p) {
  switch (p) {
    case SweepParameter::LambdaUniform: return "lambda_uniform";
    case SweepParameter::NSites: return "n_sites";
    case SweepParameter::GammaSite: return "gamma_site";
    case SweepParameter::J: return "J";
    case SweepParameter::Theta: return "theta";
    case SweepParameter::KappaSink: return "kappa_sink";
  }
  return "?";
}

std::optional<SweepParameter> parse_sweep_parameter(std::string_view name) {
  for (auto p : {SweepParameter::LambdaUniform, SweepParameter::NSites, SweepParameter::GammaSite,
                 SweepParameter::J, SweepParameter::Theta, SweepParameter::KappaSink}) {
    if (to_string(p) == name) return p;
  }
  return std::nullopt;
}

std::string_view to_string(ScenarioKind k) {
  switch (k) {
    case ScenarioKind::Markovian: return "markovian";
    case ScenarioKind::NonMarkovian: return "non_markovian";
    case ScenarioKind::NoDephasing: return "no_dephasing";
  }
  return "?";
}

std::optional<ScenarioKind> parse_scenario_kind(std::string_view name) {
  for (auto k : {ScenarioKind::Markovian, ScenarioKind::NonMarkovian, ScenarioKind::NoDephasing}) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

std::string_view to_string(CellStatus s) {
  switch (s) {
    case CellStatus::Ok: return "ok";
    case CellStatus::NotConverged: return "not_converged";
    case CellStatus::SingularSchedule: return "singular_schedule";
    case CellStatus::StepSizeUnderflow: return "step_size_underflow";
    case CellStatus::Failed: return "failed";
  }
  return "?";
}

std::string format_number(double v) { return fmt::format("{}", v); }

// ---------------------------------------------------------------------------
// Cell construction

namespace {

std::size_t as_site_count(double v) {
  if (!(v >= 1.0) || v != std::floor(v) || v > 1e6) {
    throw ConfigError(fmt::format("n_sites sweep value {} is not a positive integer", v));
  }
  return static_cast<std::size_t>(v);
}

}  // namespace

CellInputs cell_inputs(const ExperimentConfig& config, double value, const Scenario& scenario) {
  if (!std::isfinite(value)) throw ConfigError("sweep values must be finite");
  const ChainModel& base = config.base;
  const std::size_t base_n = base.n_sites();
  if (config.gamma.size() != base_n) {
    throw ConfigError(fmt::format("expected {} baseline dephasing rates, got {}", base_n,
                                  config.gamma.size()));
  }

  auto vec = [](std::span<const double> s) { return std::vector<double>(s.begin(), s.end()); };
  std::vector<double> omega = vec(base.omega());
  std::vector<double> lambda = vec(base.lambda());
  std::vector<double> kappa = vec(base.kappa());
  double kappa_sink = base.kappa_sink();
  std::vector<double> gamma = config.gamma;
  std::vector<std::size_t> dephased = config.dephased_sites;
  double J = scenario.J;
  double theta = scenario.theta;

  switch (config.parameter) {
    case SweepParameter::LambdaUniform:
      std::fill(lambda.begin(), lambda.end(), value);
      break;
    case SweepParameter::NSites: {
      // The base chain is a uniform template: site 1 values are replicated.
      const std::size_t n = as_site_count(value);
      if (n > 1 && lambda.empty()) {
        throw ConfigError("n_sites sweep needs a base chain with at least one coupling");
      }
      omega.assign(n, omega.front());
      kappa.assign(n, kappa.front());
      lambda.assign(n - 1, n > 1 ? config.base.lambda().front() : 0.0);
      gamma.assign(n, gamma.front());
      dephased.clear();
      break;
    }
    case SweepParameter::GammaSite:
      if (config.gamma_site >= gamma.size()) {
        throw ConfigError(fmt::format("gamma_site {} is outside a chain of {} sites",
                                      config.gamma_site + 1, gamma.size()));
      }
      gamma[config.gamma_site] = value;
      break;
    case SweepParameter::J:
      J = value;
      break;
    case SweepParameter::Theta:
      theta = value;
      break;
    case SweepParameter::KappaSink:
      kappa_sink = value;
      break;
  }

  ChainModel model(std::move(omega), std::move(lambda), std::move(kappa), kappa_sink);
  const std::size_t n = model.n_sites();
  std::vector<bool> is_dephased(n, dephased.empty());
  for (std::size_t site : dephased) {
    if (site >= n) {
      throw ConfigError(
          fmt::format("dephased site {} is outside a chain of {} sites", site + 1, n));
    }
    is_dephased[site] = true;
  }

  std::vector<DephasingSchedule> scheds(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!is_dephased[i]) continue;
    switch (scenario.kind) {
      case ScenarioKind::Markovian:
        scheds[i] = {gamma[i], 0.0, 0.0, config.apply_shift};
        break;
      case ScenarioKind::NonMarkovian:
        scheds[i] = {gamma[i], J, theta, config.apply_shift};
        break;
      case ScenarioKind::NoDephasing:
        break;
    }
    scheds[i].validate();
  }
  return {std::move(model), std::move(scheds)};
}

void ExperimentConfig::validate() const {
  if (values.empty()) throw ConfigError(fmt::format("experiment '{}' has no sweep values", name));
  if (scenarios.empty()) throw ConfigError(fmt::format("experiment '{}' has no scenarios", name));
  if (name.empty()) throw ConfigError("experiment name must not be empty");
  std::set<std::string> labels;
  for (const auto& s : scenarios) {
    if (s.label.empty()) throw ConfigError("scenario label must not be empty");
    if (!labels.insert(s.label).second) {
      throw ConfigError(fmt::format("duplicate scenario label '{}'", s.label));
    }
    if (s.kind == ScenarioKind::NonMarkovian && !(s.J >= 0.0 && std::isfinite(s.theta))) {
      throw ConfigError(fmt::format("scenario '{}' needs J >= 0 and a finite theta", s.label));
    }
  }
  integrator.validate();
  if (!(trajectory_horizon >= 0.0) || !(trajectory_min_dt >= 0.0)) {
    throw ConfigError("trajectory horizon and spacing must be non-negative");
  }
  for (double v : values) {
    for (const auto& s : scenarios) (void)cell_inputs(*this, v, s);
  }
}

// ---------------------------------------------------------------------------
// Execution

namespace {

struct CellOutcome {
  SweepRow row;
  Trajectory trajectory;
};

CellOutcome run_cell(const ExperimentConfig& config, double value, const Scenario& scenario) {
  CellOutcome out;
  SweepRow& row = out.row;
  row.sweep_param = std::string(to_string(config.parameter));
  row.sweep_value = value;
  row.scenario = scenario.label;
  row.eta = std::numeric_limits<double>::quiet_NaN();
  row.eta_uncertainty = std::numeric_limits<double>::quiet_NaN();

  RecordOptions rec;
  if (config.write_trajectories) {
    rec.mode = Record::Observables;
    rec.min_dt = config.trajectory_min_dt;
    rec.min_t_end = config.trajectory_horizon;
  } else {
    rec.mode = Record::FinalOnly;
  }

  try {
    const CellInputs in = cell_inputs(config, value, scenario);
    out.trajectory = integrate(in.model, in.schedules, config.integrator, rec);
    row.t_end = out.trajectory.t_end();
    row.n_steps = out.trajectory.n_steps;
    const Efficiency e = efficiency(out.trajectory, config.integrator);
    row.eta = e.eta;
    row.eta_uncertainty = e.uncertainty;
  } catch (const NotConverged& e) {
    row.status = CellStatus::NotConverged;
    row.message = e.what();
  } catch (const SingularSchedule& e) {
    row.status = CellStatus::SingularSchedule;
    row.message = e.what();
  } catch (const StepSizeUnderflow& e) {
    row.status = CellStatus::StepSizeUnderflow;
    row.message = e.what();
  } catch (const Error& e) {
    row.status = CellStatus::Failed;
    row.message = e.what();
  }
  return out;
}

}  // namespace

const SweepRow& SweepResult::at(double value, std::string_view scenario) const {
  for (const auto& r : rows) {
    if (r.sweep_value == value && r.scenario == scenario) return r;
  }
  throw Error(fmt::format("no row for value {} and scenario '{}' in '{}'", value, scenario,
                          experiment));
}

SweepResult run_sweep(const ExperimentConfig& config, unsigned workers) {
  config.validate();
  const std::size_t n_scen = config.scenarios.size();
  const std::size_t n_cells = config.values.size() * n_scen;
  std::vector<CellOutcome> outcomes(n_cells);

  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t k = next.fetch_add(1); k < n_cells; k = next.fetch_add(1)) {
      outcomes[k] = run_cell(config, config.values[k / n_scen], config.scenarios[k % n_scen]);
    }
  };
  const std::size_t n_threads = std::clamp<std::size_t>(workers, 1, n_cells);
  {
    std::vector<std::jthread> pool;
    pool.reserve(n_threads - 1);
    for (std::size_t w = 1; w < n_threads; ++w) pool.emplace_back(work);
    work();
  }

  SweepResult result;
  result.experiment = config.name;
  result.rows.reserve(n_cells);
  for (auto& o : outcomes) {
    result.rows.push_back(std::move(o.row));
    if (config.write_trajectories) result.trajectories.push_back(std::move(o.trajectory));
  }
  return result;
}

// ---------------------------------------------------------------------------
// Output

void write_summary_csv(std::ostream& os, std::span<const SweepResult> results) {
  os << kSummaryHeader << '\n';
  const bool qualify = results.size() > 1;
  for (const auto& res : results) {
    for (const auto& r : res.rows) {
      const std::string scenario = qualify ? res.experiment + ":" + r.scenario : r.scenario;
      os << fmt::format("{},{},{},{:.12g},{:.6g},{:.12g},{},{}\n", r.sweep_param,
                        format_number(r.sweep_value), scenario, r.eta, r.eta_uncertainty,
                        r.t_end, r.n_steps, to_string(r.status));
    }
  }
}

void write_summary_csv(const std::filesystem::path& path, std::span<const SweepResult> results) {
  std::ofstream os(path);
  if (!os) throw Error(fmt::format("cannot open '{}' for writing", path.string()));
  write_summary_csv(os, results);
  if (!os) throw Error(fmt::format("failed writing '{}'", path.string()));
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  const std::size_t n = !traj.records.empty() ? traj.records.front().populations.size()
                                              : traj.final_state.n_sites();
  os << "t,p_sink";
  for (std::size_t k = 1; k <= n; ++k) os << ",p_site_" << k;
  os << ",trace\n";
  for (std::size_t r = 0; r < traj.times.size(); ++r) {
    const auto& rec = traj.records[r];
    os << fmt::format("{:.12g},{:.12g}", traj.times[r], rec.p_sink);
    for (double p : rec.populations) os << fmt::format(",{:.12g}", p);
    os << fmt::format(",{:.12g}\n", rec.trace);
  }
}

std::string trajectory_file_name(std::string_view experiment, std::string_view scenario,
                                 double value) {
  return fmt::format("{}_{}_{}.csv", experiment, scenario, format_number(value));
}

std::vector<std::filesystem::path> write_trajectories(const std::filesystem::path& dir,
                                                      const SweepResult& result) {
  std::vector<std::filesystem::path> written;
  for (std::size_t k = 0; k < result.trajectories.size(); ++k) {
    const auto& row = result.rows[k];
    if (row.status != CellStatus::Ok && result.trajectories[k].times.empty()) continue;
    const auto path =
        dir / trajectory_file_name(result.experiment, row.scenario, row.sweep_value);
    std::ofstream os(path);
    if (!os) throw Error(fmt::format("cannot open '{}' for writing", path.string()));
    write_trajectory_csv(os, result.trajectories[k]);
    if (!os) throw Error(fmt::format("failed writing '{}'", path.string()));
    written.push_back(path);
  }
  return written;
}

// ---------------------------------------------------------------------------
// Presets

Preset preset_fig2() {
  ExperimentConfig c;
  c.name = "fig2";
  c.base = ChainModel({1.0, 1.0}, {0.1}, {0.1, 0.1}, 0.6);
  c.gamma = {0.1, 0.1};
  c.parameter = SweepParameter::LambdaUniform;
  c.values = {0.1, 0.3, 0.5, 0.7};
  c.scenarios = {Scenario::markovian(), Scenario::non_markovian(10.0, 0.8, "nm_theta_0.8"),
                 Scenario::non_markovian(10.0, std::numbers::pi / 3.0, "nm_theta_pi_3")};
  c.write_trajectories = true;
  c.trajectory_horizon = 50.0;
  c.trajectory_min_dt = 0.02;
  return {"fig2", {c}};
}

Preset preset_fig3() {
  Preset p{"fig3", {}};
  for (double lambda : {0.1, 0.2, 0.3}) {
    ExperimentConfig c;
    c.name = fmt::format("fig3_lambda_{}", format_number(lambda));
    c.base = ChainModel::uniform(2, 2.0, lambda, 0.1, 0.6);
    c.gamma = {0.2, 0.2};
    c.parameter = SweepParameter::NSites;
    c.values = {2, 3, 4, 5, 6, 7, 8};
    c.scenarios = {Scenario::markovian(), Scenario::non_markovian(10.0, 0.8),
                   Scenario::no_dephasing()};
    p.experiments.push_back(std::move(c));
  }
  return p;
}

Preset preset_fig4() {
  ExperimentConfig c;
  c.name = "fig4";
  c.base = ChainModel({0.5, 2.0, 0.5}, {0.2, 0.2}, {0.05, 0.05, 0.05}, 0.6);
  c.gamma = {0.0, 0.0, 0.0};
  c.dephased_sites = {1};
  // Only the middle site is dephased; a shift on that site alone would
  // detune it by the mean of s(t) (pi J / 2 in magnitude) and suppress all
  // transport, so the curves use the dephasing rate without the shift.
  c.apply_shift = false;
  c.parameter = SweepParameter::GammaSite;
  c.gamma_site = 1;
  for (int k = 0; k <= 40; ++k) c.values.push_back(k / 40.0);
  c.scenarios = {Scenario::markovian(), Scenario::non_markovian(10.0, 0.8)};
  return {"fig4", {c}};
}

std::optional<Preset> preset_by_name(std::string_view name) {
  if (name == "fig2") return preset_fig2();
  if (name == "fig3") return preset_fig3();
  if (name == "fig4") return preset_fig4();
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Claims

PeakGain peak_gain(const SweepResult& result, std::string_view scenario) {
  std::vector<const SweepRow*> rows;
  for (const auto& r : result.rows) {
    if (r.scenario == scenario) rows.push_back(&r);
  }
  if (rows.size() < 3) throw Error(fmt::format("scenario '{}' has fewer than 3 points", scenario));
  std::sort(rows.begin(), rows.end(),
            [](const SweepRow* a, const SweepRow* b) { return a->sweep_value < b->sweep_value; });
  for (const auto* r : rows) {
    if (r->status != CellStatus::Ok) {
      throw Error(fmt::format("scenario '{}' has a failed cell at {}", scenario, r->sweep_value));
    }
  }
  const auto best = std::max_element(rows.begin(), rows.end(), [](const auto* a, const auto* b) {
    return a->eta < b->eta;
  });
  if (best == rows.begin() || best == rows.end() - 1) {
    throw RangeTooNarrow(fmt::format("maximum of '{}' lies on the sweep endpoint {}", scenario,
                                     (*best)->sweep_value));
  }
  return {(*best)->eta - rows.front()->eta, (*best)->sweep_value, rows.front()->eta,
          (*best)->eta};
}

namespace {

double ok_eta(const SweepResult& r, double value, std::string_view scenario) {
  const SweepRow& row = r.at(value, scenario);
  if (row.status != CellStatus::Ok) {
    throw Error(fmt::format("{} cell ({}, {}) did not converge", r.experiment, value, scenario));
  }
  return row.eta;
}

void add_check(std::vector<ClaimCheck>& out, std::string name, auto&& body) {
  try {
    auto [pass, detail] = body();
    out.push_back({std::move(name), pass, std::move(detail)});
  } catch (const std::exception& e) {
    out.push_back({std::move(name), false, e.what()});
  }
}

std::vector<ClaimCheck> fig2_claims(const SweepResult& r) {
  std::vector<ClaimCheck> out;
  auto gap = [&](double lambda, std::string_view nm) {
    return ok_eta(r, lambda, nm) - ok_eta(r, lambda, "markovian");
  };
  add_check(out, "lambda=0.1: theta=0.8 enhancement exceeds 0.02", [&] {
    const double g = gap(0.1, "nm_theta_0.8");
    return std::pair{g > 0.02, fmt::format("gap = {:.5f}", g)};
  });
  add_check(out, "theta=0.8 enhancement shrinks from lambda=0.1 to lambda=0.7", [&] {
    const double lo = gap(0.1, "nm_theta_0.8");
    const double hi = gap(0.7, "nm_theta_0.8");
    return std::pair{hi < lo, fmt::format("gap(0.1) = {:.5f}, gap(0.7) = {:.5f}", lo, hi)};
  });
  add_check(out, "lambda=0.1: theta=pi/3 enhancement positive but smaller than theta=0.8", [&] {
    const double a = gap(0.1, "nm_theta_0.8");
    const double b = gap(0.1, "nm_theta_pi_3");
    return std::pair{b > 0.0 && b < a,
                     fmt::format("gap(pi/3) = {:.5f}, gap(0.8) = {:.5f}", b, a)};
  });
  return out;
}

std::vector<ClaimCheck> fig3_claims(const SweepResult& r, std::span<const double> sizes) {
  std::vector<ClaimCheck> out;
  for (double n : sizes) {
    add_check(out, fmt::format("{} N={}: eta_NM > eta_ND > eta_M", r.experiment, n), [&] {
      const double nm = ok_eta(r, n, "non_markovian");
      const double nd = ok_eta(r, n, "no_dephasing");
      const double m = ok_eta(r, n, "markovian");
      return std::pair{nm > nd && nd > m,
                       fmt::format("NM = {:.6g}, ND = {:.6g}, M = {:.6g}", nm, nd, m)};
    });
  }
  for (std::string_view scen : {"markovian", "non_markovian", "no_dephasing"}) {
    add_check(out, fmt::format("{} {}: eta strictly decreasing in N", r.experiment, scen), [&] {
      std::string detail;
      bool pass = true;
      for (std::size_t k = 0; k < sizes.size(); ++k) {
        const double eta = ok_eta(r, sizes[k], scen);
        detail += fmt::format("{}N={}: {:.6g}", k ? ", " : "", sizes[k], eta);
        if (k > 0 && !(eta < ok_eta(r, sizes[k - 1], scen))) pass = false;
      }
      return std::pair{pass, detail};
    });
  }
  return out;
}

std::vector<ClaimCheck> fig4_claims(const SweepResult& r) {
  std::vector<ClaimCheck> out;
  auto gain_check = [&](std::string_view scen, double expected) {
    add_check(out,
              fmt::format("{}: max eta - eta(gamma_2=0) = {} +- {}", scen, expected,
                          kFig4GainTolerance),
              [&] {
                const PeakGain g = peak_gain(r, scen);
                return std::pair{std::abs(g.gain - expected) <= kFig4GainTolerance,
                                 fmt::format("gain = {:.5f} at gamma_2 = {}, eta(0) = {:.5f}",
                                             g.gain, g.argmax, g.eta_at_start)};
              });
  };
  gain_check("non_markovian", kFig4GainNonMarkovian);
  gain_check("markovian", kFig4GainMarkovian);
  add_check(out, "both curves peak at gamma_2 > 0", [&] {
    const PeakGain nm = peak_gain(r, "non_markovian");
    const PeakGain m = peak_gain(r, "markovian");
    return std::pair{nm.argmax > 0.0 && m.argmax > 0.0,
                     fmt::format("argmax NM = {}, M = {}", nm.argmax, m.argmax)};
  });
  add_check(out, "non-Markovian curve above Markovian curve", [&] {
    double worst = std::numeric_limits<double>::infinity();
    for (const auto& row : r.rows) {
      if (row.scenario != "markovian") continue;
      worst = std::min(worst, ok_eta(r, row.sweep_value, "non_markovian") - row.eta);
    }
    return std::pair{worst > 0.0, fmt::format("min(eta_NM - eta_M) = {:.5f}", worst)};
  });
  return out;
}

}  // namespace

std::vector<ClaimCheck> evaluate_claims(const Preset& preset,
                                        std::span<const SweepResult> results) {
  if (results.size() != preset.experiments.size()) {
    throw Error("claims need one result per preset experiment");
  }
  std::vector<ClaimCheck> out;
  if (preset.name == "fig2") {
    out = fig2_claims(results[0]);
  } else if (preset.name == "fig3") {
    const std::vector<double> sizes{2, 3, 4, 5, 6};
    for (const auto& r : results) {
      if (r.experiment != "fig3_lambda_0.1" && r.experiment != "fig3_lambda_0.2") continue;
      auto part = fig3_claims(r, sizes);
      out.insert(out.end(), part.begin(), part.end());
    }
  } else if (preset.name == "fig4") {
    out = fig4_claims(results[0]);
  } else {
    throw Error(fmt::format("no claims defined for preset '{}'", preset.name));
  }
  return out;
}

}  // namespace nmt
