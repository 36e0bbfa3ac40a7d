#include "nmt/errors.hpp"

#include <fmt/format.h>

namespace nmt {

SingularSchedule::SingularSchedule(double t)
    : Error(fmt::format("SingularSchedule: rate denominator vanishes at t = {:.12g}", t)),
      time_(t) {}

StepSizeUnderflow::StepSizeUnderflow(double t, double step)
    : Error(fmt::format("StepSizeUnderflow: step {:.3e} at t = {:.12g}", step, t)), time_(t) {}

NotConverged::NotConverged(double t_end, double residual)
    : Error(fmt::format("NotConverged: chain excitation {:.3e} left at t_max = {:.12g}", residual,
                        t_end)),
      residual_(residual) {}

DimensionCap::DimensionCap(std::size_t n_sites)
    : Error(fmt::format("DimensionCap: full-space oracle supports at most 6 sites, got {}",
                        n_sites)) {}

}  // namespace nmt
