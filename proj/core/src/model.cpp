#include "nmt/model.hpp"

#include "nmt/errors.hpp"

#include <fmt/format.h>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace nmt {

namespace {

constexpr double kPoleGuard = 1e-12;

void require_finite(std::span<const double> values, const char* name) {
  for (double v : values) {
    if (!std::isfinite(v)) throw ConfigError(fmt::format("{} contains a non-finite value", name));
  }
}

}  // namespace

ChainModel::ChainModel(std::vector<double> omega, std::vector<double> lambda,
                       std::vector<double> kappa, double kappa_sink)
    : omega_(std::move(omega)),
      lambda_(std::move(lambda)),
      kappa_(std::move(kappa)),
      kappa_sink_(kappa_sink) {
  const std::size_t n = omega_.size();
  if (n == 0) throw ConfigError("chain needs at least one site");
  if (lambda_.size() != n - 1) {
    throw ConfigError(fmt::format("chain of {} sites needs {} couplings, got {}", n, n - 1,
                                  lambda_.size()));
  }
  if (kappa_.size() != n) {
    throw ConfigError(
        fmt::format("chain of {} sites needs {} dissipation rates, got {}", n, n, kappa_.size()));
  }
  require_finite(omega_, "omega");
  require_finite(lambda_, "lambda");
  require_finite(kappa_, "kappa");
  if (std::any_of(kappa_.begin(), kappa_.end(), [](double k) { return k < 0.0; })) {
    throw ConfigError("dissipation rates kappa must be non-negative");
  }
  if (!std::isfinite(kappa_sink_) || kappa_sink_ < 0.0) {
    throw ConfigError("kappa_sink must be finite and non-negative");
  }
}

ChainModel ChainModel::uniform(std::size_t n_sites, double omega, double lambda, double kappa,
                               double kappa_sink) {
  if (n_sites == 0) throw ConfigError("chain needs at least one site");
  return ChainModel(std::vector<double>(n_sites, omega), std::vector<double>(n_sites - 1, lambda),
                    std::vector<double>(n_sites, kappa), kappa_sink);
}

void DephasingSchedule::validate() const {
  if (!std::isfinite(gamma0) || !std::isfinite(J) || !std::isfinite(theta)) {
    throw ConfigError("dephasing schedule has a non-finite field");
  }
  if (gamma0 < 0.0) throw ConfigError("baseline dephasing rate gamma must be non-negative");
  if (J < 0.0) throw ConfigError("control frequency J must be non-negative");
}

double schedule_denominator(double t, const DephasingSchedule& s) {
  using std::numbers::pi;
  const double sn = std::sin(pi * s.J * t);
  return 3.0 + 2.0 * std::cos(4.0 * s.theta) * sn * sn + std::cos(2.0 * pi * s.J * t);
}

double min_schedule_denominator(const DephasingSchedule& s) {
  if (s.J == 0.0) return 4.0;
  const double c = std::cos(2.0 * s.theta);
  return 4.0 * c * c;
}

RatePair evaluate_rates(double t, const DephasingSchedule& s) {
  using std::numbers::pi;
  if (s.J == 0.0) return {s.gamma0, 0.0};
  const double d = schedule_denominator(t, s);
  if (std::abs(d) <= kPoleGuard) throw SingularSchedule(t);
  const double s2 = std::sin(2.0 * s.theta);
  return {s.gamma0 + pi * s.J * s2 * s2 * std::sin(2.0 * pi * s.J * t) / d,
          2.0 * pi * s.J * std::cos(2.0 * s.theta) / d};
}

double dephasing_rate(double t, const DephasingSchedule& s) { return evaluate_rates(t, s).gamma; }

double energy_shift(double t, const DephasingSchedule& s) { return evaluate_rates(t, s).shift; }

double accumulated_dephasing(double t, const DephasingSchedule& s) {
  using std::numbers::pi;
  if (s.J == 0.0) return s.gamma0 * t;
  const double s2 = std::sin(2.0 * s.theta);
  const double sn = std::sin(pi * s.J * t);
  const double arg = 1.0 - s2 * s2 * sn * sn;
  if (4.0 * std::abs(arg) <= kPoleGuard) throw SingularSchedule(t);
  return s.gamma0 * t - 0.25 * std::log(arg);
}

double accumulated_shift(double t, const DephasingSchedule& s) {
  using std::numbers::pi;
  const double c = std::cos(2.0 * s.theta);
  if (s.J == 0.0 || c == 0.0) return 0.0;
  // With x = pi J t the integrand is (c/2) / (1 - sin^2(2 theta) sin^2 x) in x,
  // whose antiderivative is (c / 2|c|) atan(|c| tan x) on each branch. atan2
  // stays continuous where rounding puts x - k pi just past -pi/2.
  const double x = pi * s.J * t;
  const double k = std::floor(x / pi + 0.5);
  const double y = x - k * pi;
  const double phase = std::atan2(std::abs(c) * std::sin(y), std::cos(y)) + k * pi;
  return std::copysign(0.5, c) * phase;
}

void check_schedule(const DephasingSchedule& s, double t_max) {
  if (s.J == 0.0) return;
  if (min_schedule_denominator(s) > kPoleGuard) return;
  const double first_pole = 0.5 / s.J;
  if (t_max >= first_pole - 1e-12) throw SingularSchedule(first_pole);
}

BlockState BlockState::initial(std::size_t n_sites) {
  if (n_sites == 0) throw ConfigError("chain needs at least one site");
  const auto dim = static_cast<Eigen::Index>(n_sites + 1);
  BlockState s{Matrix::Zero(dim, dim)};
  s.rho(0, 0) = 1.0;
  return s;
}

void hermitize(Matrix& rho) {
  const Eigen::Index n = rho.rows();
  for (Eigen::Index j = 0; j < n; ++j) {
    rho(j, j) = rho(j, j).real();
    for (Eigen::Index i = j + 1; i < n; ++i) {
      const Complex avg = 0.5 * (rho(i, j) + std::conj(rho(j, i)));
      rho(i, j) = avg;
      rho(j, i) = std::conj(avg);
    }
  }
}

double BlockState::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(rho, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

double BlockState::hermiticity_defect() const { return (rho - rho.adjoint()).cwiseAbs().maxCoeff(); }

Observables Observables::of(const BlockState& state) {
  Observables o;
  o.p_sink = state.p_sink();
  o.trace = state.trace();
  o.populations.resize(state.n_sites());
  for (std::size_t k = 0; k < o.populations.size(); ++k) o.populations[k] = state.population(k);
  return o;
}

}  // namespace nmt
