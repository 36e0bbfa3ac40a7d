#pragma once

// Brute-force reference simulator on the full 2^(N+1)-dimensional Hilbert
// space of N sites plus the sink. Operators are assembled from Kronecker
// products of single-qubit matrices and the master equation is transcribed
// term by term, independently of the block Liouvillian.

#include "nmt/dopri.hpp"
#include "nmt/model.hpp"

#include <Eigen/SparseCore>

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace nmt::oracle {

inline constexpr std::size_t kMaxSites = 6;

/// Basis convention: qubit q (sites 0..N-1, sink N) excited <=> bit q of the
/// basis index is set. The all-ground state is index 0.
std::size_t site_index(std::size_t qubit);

/// op2 (2x2, basis {g, e}) acting on `qubit`, identity elsewhere.
Matrix embed(const Matrix& op2, std::size_t qubit, std::size_t n_qubits);

Matrix sigma_minus();
Matrix sigma_plus();
Matrix sigma_z();

struct FullState {
  Matrix rho;

  /// Site 1 excited, every other site and the sink in the ground state.
  static FullState initial(std::size_t n_sites);

  std::size_t n_sites() const;
  /// Rows/columns {|1>, ..., |N>, |S>} in block ordering.
  Matrix block() const;
  double ground_population() const { return rho(0, 0).real(); }
  double p_sink() const;
};

/// Right-hand side of the full master equation, including the dissipator gain
/// terms 2 sigma^- rho sigma^+ that the block picture folds into the ground state.
class FullLiouvillian {
 public:
  FullLiouvillian(const ChainModel& model, std::span<const DephasingSchedule> scheds);

  std::size_t dim() const noexcept { return static_cast<std::size_t>(h_.rows()); }
  const Matrix& hamiltonian() const noexcept { return h_; }

  void operator()(double t, const Matrix& rho, Matrix& out) const;

 private:
  // Kronecker-product operators have one nonzero per row or column.
  using Operator = Eigen::SparseMatrix<Complex>;

  struct SiteOps {
    Operator lower, raise, number, z;
    double kappa;
    DephasingSchedule sched;
    bool dephased;
  };

  Matrix h_;
  Operator h_op_;
  std::vector<SiteOps> sites_;
  Operator sink_jump_;
  Operator sink_jump_dag_;
  Operator sink_number_;
  double kappa_sink_;
};

/// Throws DimensionCap above kMaxSites.
Matrix full_rhs(const Matrix& rho, double t, const ChainModel& model,
                std::span<const DephasingSchedule> scheds);

using FullRhs = std::function<void(double, const Matrix&, Matrix&)>;

struct Snapshot {
  double t;
  Matrix rho;
};

/// Integrates d rho/dt = rhs(t, rho) and returns rho at each of `times`
/// (sorted ascending, all > 0).
std::vector<Snapshot> propagate(const FullRhs& rhs, Matrix rho0, std::span<const double> times,
                                const StepControl& control);

/// Default control for oracle runs: rel 1e-10, abs 1e-12, max step tied to J.
StepControl oracle_control(std::span<const DephasingSchedule> scheds);

struct ReductionReport {
  double max_deviation = 0.0;
  /// Largest |trace(full) - 1| along the run.
  double max_trace_drift = 0.0;
  /// Largest |p_sink(full) - p_sink(block)|.
  double max_p_sink_deviation = 0.0;
  /// Largest magnitude of any element coupling the ground state to the block.
  double max_ground_coherence = 0.0;
};

/// Integrates block and full representations from the single-excitation
/// initial state and compares them at n_checkpoints evenly spaced times in
/// (0, t_end].
ReductionReport compare_reduction(const ChainModel& model,
                                  std::span<const DephasingSchedule> scheds, double t_end,
                                  std::size_t n_checkpoints);

/// Max-norm difference between the full state's single-excitation block and
/// the block state, maximised over checkpoints.
double validate_reduction(const ChainModel& model, std::span<const DephasingSchedule> scheds,
                          double t_end, std::size_t n_checkpoints);

struct CoherenceReport {
  /// max | |rho_eg(t)| / (|rho_eg(0)| e^{-2 Gamma(t)}) - 1 |
  double max_relative_magnitude_error = 0.0;
  /// max |arg(rho_eg(t) / expected(t))|, expected phase -omega t - 2 S(t).
  double max_phase_error = 0.0;
};

/// Single site without dissipation or sink, started in (|e> + |g>)/sqrt(2),
/// compared against the closed-form decoherence factor and accumulated shift.
CoherenceReport check_single_site_coherence(const DephasingSchedule& sched, double omega,
                                            double t_end, std::size_t n_checkpoints);

/// Same check with a caller-supplied generator on the 4-dimensional
/// site-plus-sink space; lets tests feed a deliberately altered right-hand side.
CoherenceReport check_single_site_coherence(const FullRhs& rhs, const DephasingSchedule& sched,
                                            double omega, double t_end,
                                            std::size_t n_checkpoints);

/// Chain and schedules of the three published parameter regimes, resized to
/// n_sites (1..3): the N=2 lambda/theta study (lambda = 0.3, theta = 0.8),
/// the chain-length study (lambda = 0.1) and the dephasing-assisted study
/// (gamma_2 = 0.5, middle site only).
struct ParameterSet {
  std::string label;
  ChainModel model;
  std::vector<DephasingSchedule> schedules;
};
std::vector<ParameterSet> reference_parameter_sets(std::size_t n_sites);

}  // namespace nmt::oracle
