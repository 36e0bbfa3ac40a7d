#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace nmt {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;

/// Static description of a chain of N two-level sites feeding a sink.
///
/// Energies and rates are plain numbers in units of a reference frequency
/// (hbar = 1). Site indices are zero-based in code; site k in user-facing
/// text is index k - 1.
class ChainModel {
 public:
  ChainModel(std::vector<double> omega, std::vector<double> lambda,
             std::vector<double> kappa, double kappa_sink);

  /// Chain with identical site energies, couplings and dissipation rates.
  static ChainModel uniform(std::size_t n_sites, double omega, double lambda,
                            double kappa, double kappa_sink);

  std::size_t n_sites() const noexcept { return omega_.size(); }
  std::span<const double> omega() const noexcept { return omega_; }
  std::span<const double> lambda() const noexcept { return lambda_; }
  std::span<const double> kappa() const noexcept { return kappa_; }
  double kappa_sink() const noexcept { return kappa_sink_; }

  bool operator==(const ChainModel&) const = default;

 private:
  std::vector<double> omega_;
  std::vector<double> lambda_;
  std::vector<double> kappa_;
  double kappa_sink_;
};

/// Per-site dephasing control: baseline rate gamma0 and the (J, theta) pair
/// that adds the oscillating, possibly negative, contribution.
///
/// `apply_shift` switches the -i s(t) [sigma_z, rho] term of this site on or
/// off. A shift shared by every site only moves sink coherences, so it only
/// matters when sites carry different schedules.
struct DephasingSchedule {
  double gamma0 = 0.0;
  double J = 0.0;
  double theta = 0.0;
  bool apply_shift = true;

  static DephasingSchedule none() { return {}; }
  static DephasingSchedule markovian(double gamma0) { return {gamma0, 0.0, 0.0, true}; }

  /// Throws ConfigError on a negative or non-finite field.
  void validate() const;

  bool operator==(const DephasingSchedule&) const = default;
};

/// Shared denominator 3 + 2cos(4 theta) sin^2(pi J t) + cos(2 pi J t) of the
/// rate and shift formulas. Algebraically equal to
/// 4 (1 - sin^2(2 theta) sin^2(pi J t)).
double schedule_denominator(double t, const DephasingSchedule& sched);

/// Smallest value the denominator takes over all t (4 cos^2(2 theta) when
/// J > 0, otherwise 4).
double min_schedule_denominator(const DephasingSchedule& sched);

/// Time-dependent dephasing rate gamma(t). Negative values flag
/// non-Markovian intervals. Throws SingularSchedule when |D(t)| <= 1e-12.
double dephasing_rate(double t, const DephasingSchedule& sched);

/// Environment-induced energy shift s(t). Same singularity guard.
double energy_shift(double t, const DephasingSchedule& sched);

/// Gamma(t), the integral of dephasing_rate from 0 to t, in closed form:
/// gamma0 t - (1/4) ln(1 - sin^2(2 theta) sin^2(pi J t)).
double accumulated_dephasing(double t, const DephasingSchedule& sched);

/// Integral of energy_shift from 0 to t, continued across branches of the
/// arctangent so that it is continuous in t.
double accumulated_shift(double t, const DephasingSchedule& sched);

/// Rejects a schedule whose denominator reaches zero before t_max.
/// Throws SingularSchedule naming the first pole.
void check_schedule(const DephasingSchedule& sched, double t_max);

/// Rate and shift of one schedule evaluated at a common t, sharing the
/// denominator.
struct RatePair {
  double gamma;
  double shift;
};
RatePair evaluate_rates(double t, const DephasingSchedule& sched);

/// Replaces m by (m + m^dag) / 2.
void hermitize(Matrix& m);

/// Density matrix restricted to the single-excitation sector: rows/columns
/// 0..N-1 are "excitation on site k", row/column N is "excitation in the
/// sink". The ground population is 1 - trace.
struct BlockState {
  Matrix rho;

  /// |1><1|: excitation on the first site, everything else in the ground state.
  static BlockState initial(std::size_t n_sites);

  std::size_t n_sites() const noexcept {
    return rho.rows() == 0 ? 0 : static_cast<std::size_t>(rho.rows()) - 1;
  }
  double trace() const { return rho.trace().real(); }
  double p_sink() const { return rho(rho.rows() - 1, rho.cols() - 1).real(); }
  double population(std::size_t site) const {
    const auto k = static_cast<Eigen::Index>(site);
    return rho(k, k).real();
  }
  /// Excitation still on the chain: trace - p_sink.
  double residual() const { return trace() - p_sink(); }

  void hermitize() { nmt::hermitize(rho); }
  double min_eigenvalue() const;
  double hermiticity_defect() const;
};

/// Scalar record of one accepted step.
struct Observables {
  double p_sink = 0.0;
  std::vector<double> populations;
  double trace = 0.0;

  static Observables of(const BlockState& state);
};

enum class Termination { Residual, TMax };

struct Trajectory {
  std::vector<double> times;
  std::vector<Observables> records;
  /// Only filled when full states were requested.
  std::vector<BlockState> states;
  BlockState final_state;
  Termination termination = Termination::TMax;
  std::size_t n_steps = 0;
  std::size_t n_rejected = 0;

  double t_end() const { return times.empty() ? 0.0 : times.back(); }
};

}  // namespace nmt
