#pragma once

#include <stdexcept>
#include <string>

namespace nmt {

/// Base class for every error raised by the transport library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid model, schedule, integrator or experiment parameters.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// The rate denominator vanished (|D(t)| <= 1e-12).
class SingularSchedule : public Error {
 public:
  explicit SingularSchedule(double t);
  double time() const noexcept { return time_; }

 private:
  double time_;
};

class StepSizeUnderflow : public Error {
 public:
  StepSizeUnderflow(double t, double step);
  double time() const noexcept { return time_; }

 private:
  double time_;
};

/// Integration hit t_max while chain excitation was still above residual_eps.
class NotConverged : public Error {
 public:
  NotConverged(double t_end, double residual);
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

class DimensionCap : public Error {
 public:
  explicit DimensionCap(std::size_t n_sites);
};

/// The optimum of a swept curve sits on an endpoint of the sweep range.
class RangeTooNarrow : public Error {
 public:
  using Error::Error;
};

}  // namespace nmt
