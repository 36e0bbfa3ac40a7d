#pragma once

#include "nmt/model.hpp"

#include <optional>
#include <span>
#include <vector>

namespace nmt {

struct IntegratorConfig {
  double rel_tol = 1e-8;
  double abs_tol = 1e-10;
  /// Unset means 0.01 / max J over the schedules, or 0.1 when no J > 0.
  std::optional<double> max_step;
  double t_max = 5000.0;
  /// Integration stops once trace - p_sink drops below this.
  double residual_eps = 1e-6;
  bool hermitize_every_step = true;

  /// Throws ConfigError on non-positive tolerances or step.
  void validate() const;
  double resolved_max_step(std::span<const DephasingSchedule> scheds) const;

  bool operator==(const IntegratorConfig&) const = default;
};

enum class Record {
  /// Only the final state, plus the initial and final times.
  FinalOnly,
  /// Observables at every accepted step.
  Observables,
  /// Observables and the full block state at every accepted step.
  States,
};

struct RecordOptions {
  Record mode = Record::Observables;
  /// Skip records closer than this to the previous one (0 keeps every step).
  /// The final state is always recorded.
  double min_dt = 0.0;
  /// Times the integrator must land on exactly; they are always recorded.
  std::vector<double> checkpoints;
  /// Keep integrating past convergence up to this time (used to get a common
  /// horizon for time-series output).
  double min_t_end = 0.0;

  static RecordOptions final_only() {
    RecordOptions r;
    r.mode = Record::FinalOnly;
    return r;
  }
};

/// Propagates the block state from `initial` (|1><1| when unset) until the
/// chain excitation falls below residual_eps or t_max is reached.
Trajectory integrate(const ChainModel& model, std::span<const DephasingSchedule> scheds,
                     const IntegratorConfig& config, const RecordOptions& record = {},
                     std::optional<BlockState> initial = std::nullopt);

struct Efficiency {
  double eta;
  double uncertainty;
};

/// Bracketed transport efficiency from a converged trajectory:
/// eta = p_sink + R/2 with uncertainty R/2. Throws NotConverged if the
/// trajectory stopped at t_max with R >= residual_eps.
Efficiency efficiency(const Trajectory& traj, const IntegratorConfig& config);

}  // namespace nmt
