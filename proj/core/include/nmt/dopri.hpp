#pragma once

#include "nmt/errors.hpp"
#include "nmt/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

namespace nmt {

struct StepControl {
  double rel_tol = 1e-8;
  double abs_tol = 1e-10;
  double max_step = 0.1;
  double min_step = 1e-14;
};

/// Dormand-Prince 5(4) embedded pair with FSAL, propagating the solution with
/// the fifth-order weights. The error estimate is the elementwise max of
/// |err_k| / (abs_tol + rel_tol * max(|y_k|, |y_new_k|)).
///
/// Rhs must be callable as rhs(t, const Matrix& y, Matrix& dydt).
template <class Rhs>
class DormandPrince {
 public:
  DormandPrince(Rhs rhs, StepControl control) : rhs_(std::move(rhs)), ctl_(control) {}

  std::size_t accepted() const noexcept { return accepted_; }
  std::size_t rejected() const noexcept { return rejected_; }
  std::size_t evaluations() const noexcept { return evaluations_; }
  double last_step() const noexcept { return last_step_; }

  /// Drops the cached derivative; call after changing y outside step().
  void reset() { have_k1_ = false; }

  /// Takes one accepted step from t towards t_limit (never past it).
  /// `project` is applied to the new state and to its cached derivative; it
  /// must commute with the right-hand side (e.g. Hermitian projection of a
  /// Hermiticity-preserving linear generator).
  template <class Project>
  void step(double& t, Matrix& y, double t_limit, Project&& project) {
    if (!have_k1_) {
      ensure_shapes(y);
      eval(t, y, k1_);
      have_k1_ = true;
      if (h_ <= 0.0) h_ = initial_step(y);
    }
    for (;;) {
      const double remaining = t_limit - t;
      double h = std::min({h_, ctl_.max_step, remaining});
      const bool clipped = h < h_;

      tmp_ = y + h * (a21 * k1_);
      eval(t + c2 * h, tmp_, k2_);
      tmp_ = y + h * (a31 * k1_ + a32 * k2_);
      eval(t + c3 * h, tmp_, k3_);
      tmp_ = y + h * (a41 * k1_ + a42 * k2_ + a43 * k3_);
      eval(t + c4 * h, tmp_, k4_);
      tmp_ = y + h * (a51 * k1_ + a52 * k2_ + a53 * k3_ + a54 * k4_);
      eval(t + c5 * h, tmp_, k5_);
      tmp_ = y + h * (a61 * k1_ + a62 * k2_ + a63 * k3_ + a64 * k4_ + a65 * k5_);
      eval(t + h, tmp_, k6_);
      ynew_ = y + h * (b1 * k1_ + b3 * k3_ + b4 * k4_ + b5 * k5_ + b6 * k6_);
      eval(t + h, ynew_, k7_);
      err_ = h * (e1 * k1_ + e3 * k3_ + e4 * k4_ + e5 * k5_ + e6 * k6_ + e7 * k7_);

      double err = 0.0;
      for (Eigen::Index k = 0; k < y.size(); ++k) {
        const double scale =
            ctl_.abs_tol + ctl_.rel_tol * std::max(std::abs(y(k)), std::abs(ynew_(k)));
        err = std::max(err, std::abs(err_(k)) / scale);
      }
      if (!std::isfinite(err)) err = 1e10;

      if (err <= 1.0) {
        const double grow = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
        // A step shortened to hit t_limit says nothing about the sustainable size.
        if (!clipped) h_ = h * grow;
        else h_ = std::max(h_, h * grow);
        t = (h == remaining) ? t_limit : t + h;
        y.swap(ynew_);
        k1_.swap(k7_);
        project(y);
        project(k1_);
        last_step_ = h;
        ++accepted_;
        return;
      }
      ++rejected_;
      h_ = h * std::max(0.2, 0.9 * std::pow(err, -0.2));
      if (h_ < ctl_.min_step) throw StepSizeUnderflow(t, h_);
    }
  }

 private:
  void eval(double t, const Matrix& y, Matrix& out) {
    rhs_(t, y, out);
    ++evaluations_;
  }

  void ensure_shapes(const Matrix& y) {
    for (Matrix* m : {&k1_, &k2_, &k3_, &k4_, &k5_, &k6_, &k7_, &tmp_, &ynew_, &err_}) {
      m->resize(y.rows(), y.cols());
    }
  }

  double initial_step(const Matrix& y) const {
    double d0 = 0.0;
    double d1 = 0.0;
    for (Eigen::Index k = 0; k < y.size(); ++k) {
      const double scale = ctl_.abs_tol + ctl_.rel_tol * std::abs(y(k));
      d0 = std::max(d0, std::abs(y(k)) / scale);
      d1 = std::max(d1, std::abs(k1_(k)) / scale);
    }
    const double h = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    return std::min(h, ctl_.max_step);
  }

  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                          a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                          a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                          b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  // Difference between the fifth- and fourth-order weights.
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                          e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

  Rhs rhs_;
  StepControl ctl_;
  Matrix k1_, k2_, k3_, k4_, k5_, k6_, k7_, tmp_, ynew_, err_;
  bool have_k1_ = false;
  double h_ = 0.0;
  double last_step_ = 0.0;
  std::size_t accepted_ = 0;
  std::size_t rejected_ = 0;
  std::size_t evaluations_ = 0;
};

}  // namespace nmt
