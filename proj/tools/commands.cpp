#include "commands.hpp"

#include "nmt/errors.hpp"
#include "nmt/integrator.hpp"
#include "nmt/oracle.hpp"
#include "nmt/sweep.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include <cmath>
#include <fstream>
#include <functional>
#include <ostream>
#include <vector>

namespace nmt::cli {

namespace {

void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(fmt::format("cannot create output directory '{}': {}", dir.string(),
                                  ec.message()));
}

/// Maps library exceptions onto exit codes with a one-line diagnostic.
int run_guarded(std::ostream& err, const std::function<int()>& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kConfigError;
  } catch (const SingularSchedule& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kConfigError;
  } catch (const NotConverged& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kNotConverged;
  } catch (const std::exception& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kRuntimeError;
  }
}

}  // namespace

int cmd_simulate(const RunSpec& spec, std::ostream& out, std::ostream& err) {
  return run_guarded(err, [&] {
    for (const auto& s : spec.schedules) check_schedule(s, spec.integrator.t_max);
    ensure_dir(spec.out_dir);

    RecordOptions rec;
    rec.mode = Record::Observables;
    rec.min_dt = spec.trajectory_min_dt;
    const Trajectory traj = integrate(spec.chain, spec.schedules, spec.integrator, rec);

    const auto path = spec.out_dir / fmt::format("{}_trajectory.csv", spec.name);
    std::ofstream os(path);
    if (!os) throw Error(fmt::format("cannot open '{}' for writing", path.string()));
    write_trajectory_csv(os, traj);
    if (!os) throw Error(fmt::format("failed writing '{}'", path.string()));

    const Efficiency e = efficiency(traj, spec.integrator);
    fmt::print(out, "eta = {:.6f} +/- {:.1e}\n", e.eta, e.uncertainty);
    fmt::print(out, "t_end = {:.6g}, steps = {}, trajectory = {}\n", traj.t_end(), traj.n_steps,
               path.string());
    return int{kOk};
  });
}

int cmd_preset(std::string_view name, unsigned workers, const std::filesystem::path& out_dir,
               const Overrides& overrides, std::ostream& out, std::ostream& err) {
  return run_guarded(err, [&] {
    auto preset = preset_by_name(name);
    if (!preset) throw ConfigError(fmt::format("unknown preset '{}' (fig2, fig3, fig4)", name));
    for (auto& exp : preset->experiments) apply_overrides(exp.integrator, overrides);
    ensure_dir(out_dir);

    std::vector<SweepResult> results;
    for (const auto& exp : preset->experiments) {
      fmt::print(out, "running {} ({} cells)\n", exp.name,
                 exp.values.size() * exp.scenarios.size());
      results.push_back(run_sweep(exp, workers));
      if (exp.write_trajectories) write_trajectories(out_dir, results.back());
    }
    write_summary_csv(out_dir / "summary.csv", results);

    const auto claims = evaluate_claims(*preset, results);
    std::ofstream os(out_dir / "claims.txt");
    if (!os) throw Error("cannot write claims.txt");
    bool all = true;
    for (const auto& c : claims) {
      const std::string line =
          fmt::format("{} {}: {}\n", c.pass ? "PASS" : "FAIL", c.name, c.detail);
      os << line;
      out << line;
      all = all && c.pass;
    }
    return int{all ? kOk : kCheckFailed};
  });
}

int cmd_sweep(const RunSpec& spec, unsigned workers, std::ostream& out, std::ostream& err) {
  return run_guarded(err, [&] {
    if (!spec.sweep) throw ConfigError("configuration has no 'sweep' section");
    ensure_dir(spec.out_dir);
    const SweepResult result = run_sweep(*spec.sweep, workers);
    const std::vector<SweepResult> all{result};
    write_summary_csv(spec.out_dir / "summary.csv", all);
    if (spec.sweep->write_trajectories) write_trajectories(spec.out_dir, result);

    std::size_t failed = 0;
    bool unconverged = false;
    for (const auto& r : result.rows) {
      if (r.status == CellStatus::Ok) continue;
      ++failed;
      unconverged = unconverged || r.status == CellStatus::NotConverged;
      fmt::print(err, "cell {}={} {}: {}\n", r.sweep_param, format_number(r.sweep_value),
                 r.scenario, r.message);
    }
    fmt::print(out, "{} cells, {} failed, summary = {}\n", result.rows.size(), failed,
               (spec.out_dir / "summary.csv").string());
    if (failed == 0) return int{kOk};
    return int{unconverged ? kNotConverged : kRuntimeError};
  });
}

// ---------------------------------------------------------------------------
// validate

namespace {

struct Check {
  std::string name;
  double value;
  double threshold;
  bool pass() const { return std::isfinite(value) && value <= threshold; }
};

double cascade_eta_error() {
  const ChainModel model({1.0}, {}, {0.1}, 0.6);
  const std::vector<DephasingSchedule> scheds(1);
  const IntegratorConfig cfg;
  const Trajectory traj = integrate(model, scheds, cfg, RecordOptions::final_only());
  return std::abs(efficiency(traj, cfg).eta - 0.6 / 0.7);
}

double cascade_curve_error() {
  const ChainModel model({1.0}, {}, {0.1}, 0.6);
  const std::vector<DephasingSchedule> scheds(1);
  const Trajectory traj = integrate(model, scheds, IntegratorConfig{});
  double worst = 0.0;
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    const double exact = (6.0 / 7.0) * (1.0 - std::exp(-1.4 * traj.times[k]));
    worst = std::max(worst, std::abs(traj.records[k].p_sink - exact));
  }
  return worst;
}

double accumulated_dephasing_error() {
  using boost::math::quadrature::gauss_kronrod;
  const DephasingSchedule s{0.1, 10.0, 0.8};
  double worst = 0.0;
  // Quadrature over each quarter period keeps the sharp rate peaks resolved.
  double integral = 0.0;
  const double piece = 0.025;
  for (int k = 1; k <= 80; ++k) {
    const double a = (k - 1) * piece;
    const double b = k * piece;
    integral += gauss_kronrod<double, 61>::integrate(
        [&](double t) { return dephasing_rate(t, s); }, a, b, 15, 1e-13);
    worst = std::max(worst, std::abs(integral - accumulated_dephasing(b, s)));
  }
  return worst;
}

std::vector<Check> run_checks(ValidationLevel level) {
  std::vector<Check> checks;
  checks.push_back({"cascade: |eta - 6/7|", cascade_eta_error(), 1e-6});
  checks.push_back({"cascade: max |p_sink - closed form|", cascade_curve_error(), 1e-7});
  checks.push_back({"accumulated dephasing vs quadrature", accumulated_dephasing_error(), 1e-8});

  const auto coh = oracle::check_single_site_coherence(DephasingSchedule{0.1, 10.0, 0.8}, 1.0,
                                                       1.0, 400);
  checks.push_back({"coherence magnitude vs exp(-2 Gamma) (rel)",
                    coh.max_relative_magnitude_error, 1e-6});
  checks.push_back({"coherence phase vs omega t + 2 S(t)", coh.max_phase_error, 1e-6});

  std::vector<std::size_t> sizes{1, 2};
  if (level == ValidationLevel::Full) sizes.push_back(3);
  for (std::size_t n : sizes) {
    for (const auto& set : oracle::reference_parameter_sets(n)) {
      const auto rep = oracle::compare_reduction(set.model, set.schedules, 50.0, 50);
      checks.push_back(
          {fmt::format("reduction N={} {}: block deviation", n, set.label), rep.max_deviation,
           1e-8});
      checks.push_back({fmt::format("reduction N={} {}: full trace drift", n, set.label),
                        rep.max_trace_drift, 1e-10});
    }
  }
  return checks;
}

}  // namespace

int cmd_validate(ValidationLevel level, std::ostream& out, std::ostream& err) {
  return run_guarded(err, [&] {
    const auto checks = run_checks(level);
    bool all = true;
    fmt::print(out, "{:<52} {:>11} {:>9}  {}\n", "check", "value", "limit", "result");
    for (const auto& c : checks) {
      fmt::print(out, "{:<52} {:>11.3e} {:>9.1e}  {}\n", c.name, c.value, c.threshold,
                 c.pass() ? "PASS" : "FAIL");
      all = all && c.pass();
    }
    return int{all ? kOk : kCheckFailed};
  });
}

}  // namespace nmt::cli
