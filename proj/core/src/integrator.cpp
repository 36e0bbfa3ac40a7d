#include "nmt/integrator.hpp"

#include "nmt/dopri.hpp"
#include "nmt/errors.hpp"
#include "nmt/liouvillian.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace nmt {

void IntegratorConfig::validate() const {
  auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (!positive(rel_tol)) throw ConfigError("rel_tol must be positive");
  if (!positive(abs_tol)) throw ConfigError("abs_tol must be positive");
  if (max_step && !positive(*max_step)) throw ConfigError("max_step must be positive");
  if (!positive(t_max)) throw ConfigError("t_max must be positive");
  if (!positive(residual_eps)) throw ConfigError("residual_eps must be positive");
}

double IntegratorConfig::resolved_max_step(std::span<const DephasingSchedule> scheds) const {
  if (max_step) return *max_step;
  double j_max = 0.0;
  for (const auto& s : scheds) j_max = std::max(j_max, s.J);
  return j_max > 0.0 ? 0.01 / j_max : 0.1;
}

Trajectory integrate(const ChainModel& model, std::span<const DephasingSchedule> scheds,
                     const IntegratorConfig& config, const RecordOptions& record,
                     std::optional<BlockState> initial) {
  config.validate();
  for (const auto& s : scheds) {
    s.validate();
    check_schedule(s, config.t_max);
  }

  BlockState state = initial ? std::move(*initial) : BlockState::initial(model.n_sites());
  if (static_cast<std::size_t>(state.rho.rows()) != model.n_sites() + 1) {
    throw ConfigError("initial block state dimension does not match the chain");
  }

  std::vector<double> checkpoints = record.checkpoints;
  if (record.min_t_end > 0.0) checkpoints.push_back(record.min_t_end);
  std::sort(checkpoints.begin(), checkpoints.end());
  checkpoints.erase(std::remove_if(checkpoints.begin(), checkpoints.end(),
                                   [&](double c) { return c <= 0.0 || c > config.t_max; }),
                    checkpoints.end());
  checkpoints.erase(std::unique(checkpoints.begin(), checkpoints.end()), checkpoints.end());

  StepControl control{config.rel_tol, config.abs_tol, config.resolved_max_step(scheds)};
  DormandPrince stepper(BlockLiouvillian(model, scheds), control);

  Trajectory traj;
  double t = 0.0;
  double last_recorded = 0.0;
  auto push = [&](double at) {
    traj.times.push_back(at);
    traj.records.push_back(Observables::of(state));
    if (record.mode == Record::States) traj.states.push_back(state);
    last_recorded = at;
  };
  push(t);

  auto hermitize = [&](Matrix& m) {
    if (config.hermitize_every_step) nmt::hermitize(m);
  };

  std::size_t next_cp = 0;
  bool final_recorded = true;
  while (t < config.t_max) {
    const double limit = next_cp < checkpoints.size() ? checkpoints[next_cp] : config.t_max;
    stepper.step(t, state.rho, limit, hermitize);
    final_recorded = false;

    const bool at_checkpoint = next_cp < checkpoints.size() && t == checkpoints[next_cp];
    if (at_checkpoint) ++next_cp;
    if (record.mode != Record::FinalOnly &&
        (at_checkpoint || t - last_recorded >= record.min_dt)) {
      push(t);
      final_recorded = true;
    }
    if (state.residual() < config.residual_eps && t >= record.min_t_end) {
      traj.termination = Termination::Residual;
      break;
    }
  }
  if (!final_recorded) push(t);

  traj.n_steps = stepper.accepted();
  traj.n_rejected = stepper.rejected();
  traj.final_state = std::move(state);
  return traj;
}

Efficiency efficiency(const Trajectory& traj, const IntegratorConfig& config) {
  const double residual = traj.final_state.residual();
  if (traj.termination != Termination::Residual && residual >= config.residual_eps) {
    throw NotConverged(traj.t_end(), residual);
  }
  const double r = std::max(residual, 0.0);
  return {traj.final_state.p_sink() + 0.5 * r, 0.5 * r};
}

}  // namespace nmt
