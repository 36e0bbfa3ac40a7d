#include "nmt/oracle.hpp"

#include "nmt/errors.hpp"
#include "nmt/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace nmt::oracle {

namespace {

Matrix identity2() { return Matrix::Identity(2, 2); }

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

template <class Op>
Matrix commutator(const Op& a, const Matrix& b) {
  return a * b - b * a;
}

template <class Op>
Matrix anticommutator(const Op& a, const Matrix& b) {
  return a * b + b * a;
}

Eigen::SparseMatrix<Complex> sparse(const Matrix& m) { return m.sparseView(); }

}  // namespace

std::size_t site_index(std::size_t qubit) { return std::size_t{1} << qubit; }

Matrix sigma_minus() {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 1) = 1.0;  // |g><e|
  return m;
}

Matrix sigma_plus() { return sigma_minus().adjoint(); }

Matrix sigma_z() {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = -1.0;
  m(1, 1) = 1.0;
  return m;
}

Matrix embed(const Matrix& op2, std::size_t qubit, std::size_t n_qubits) {
  // Highest qubit is the leftmost Kronecker factor so that qubit q maps to bit q.
  Matrix out = Matrix::Identity(1, 1);
  for (std::size_t q = n_qubits; q-- > 0;) {
    out = kron(out, q == qubit ? op2 : identity2());
  }
  return out;
}

FullState FullState::initial(std::size_t n_sites) {
  if (n_sites == 0) throw ConfigError("chain needs at least one site");
  if (n_sites > kMaxSites) throw DimensionCap(n_sites);
  const auto dim = static_cast<Eigen::Index>(std::size_t{1} << (n_sites + 1));
  FullState s{Matrix::Zero(dim, dim)};
  const auto k = static_cast<Eigen::Index>(site_index(0));
  s.rho(k, k) = 1.0;
  return s;
}

std::size_t FullState::n_sites() const {
  std::size_t qubits = 0;
  while ((Eigen::Index{1} << qubits) < rho.rows()) ++qubits;
  return qubits - 1;
}

Matrix FullState::block() const {
  const std::size_t n = n_sites();
  const auto dim = static_cast<Eigen::Index>(n + 1);
  Matrix out(dim, dim);
  for (std::size_t a = 0; a <= n; ++a) {
    for (std::size_t b = 0; b <= n; ++b) {
      out(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) =
          rho(static_cast<Eigen::Index>(site_index(a)), static_cast<Eigen::Index>(site_index(b)));
    }
  }
  return out;
}

double FullState::p_sink() const {
  // Tr(rho sigma_sink^+ sigma_sink^-): all basis states with the sink bit set.
  const std::size_t sink_bit = site_index(n_sites());
  double p = 0.0;
  for (Eigen::Index k = 0; k < rho.rows(); ++k) {
    if (static_cast<std::size_t>(k) & sink_bit) p += rho(k, k).real();
  }
  return p;
}

FullLiouvillian::FullLiouvillian(const ChainModel& model,
                                 std::span<const DephasingSchedule> scheds)
    : kappa_sink_(model.kappa_sink()) {
  const std::size_t n = model.n_sites();
  if (n > kMaxSites) throw DimensionCap(n);
  if (scheds.size() != n) throw ConfigError("one dephasing schedule per site is required");
  const std::size_t qubits = n + 1;
  const auto dim = static_cast<Eigen::Index>(std::size_t{1} << qubits);

  h_ = Matrix::Zero(dim, dim);
  for (std::size_t i = 0; i < n; ++i) {
    SiteOps ops;
    const Matrix lower = embed(sigma_minus(), i, qubits);
    const Matrix raise = embed(sigma_plus(), i, qubits);
    const Matrix z = embed(sigma_z(), i, qubits);
    ops.lower = sparse(lower);
    ops.raise = sparse(raise);
    ops.number = sparse(raise * lower);
    ops.z = sparse(z);
    ops.kappa = model.kappa()[i];
    ops.sched = scheds[i];
    ops.sched.validate();
    ops.dephased = ops.sched.gamma0 != 0.0 || ops.sched.J != 0.0;
    h_ += 0.5 * model.omega()[i] * z;
    sites_.push_back(std::move(ops));
  }
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const Matrix hop = Matrix(sites_[i].raise * sites_[i + 1].lower) +
                       Matrix(sites_[i + 1].raise * sites_[i].lower);
    h_ += model.lambda()[i] * hop;
  }
  h_op_ = sparse(h_);
  const Matrix sink_raise = embed(sigma_plus(), n, qubits);
  const Matrix jump = sink_raise * Matrix(sites_[n - 1].lower);
  sink_jump_ = sparse(jump);
  sink_jump_dag_ = sparse(jump.adjoint());
  sink_number_ = sparse(jump.adjoint() * jump);
}

void FullLiouvillian::operator()(double t, const Matrix& rho, Matrix& out) const {
  const Complex i(0.0, 1.0);
  out = -i * commutator(h_op_, rho);
  for (const auto& s : sites_) {
    out += s.kappa * (2.0 * Matrix(s.lower * rho) * s.raise - anticommutator(s.number, rho));
    if (!s.dephased) continue;
    const double gamma = dephasing_rate(t, s.sched);
    out += gamma * (Matrix(s.z * rho) * s.z - rho);
    if (s.sched.apply_shift) out -= i * energy_shift(t, s.sched) * commutator(s.z, rho);
  }
  out += kappa_sink_ *
         (2.0 * Matrix(sink_jump_ * rho) * sink_jump_dag_ - anticommutator(sink_number_, rho));
}

Matrix full_rhs(const Matrix& rho, double t, const ChainModel& model,
                std::span<const DephasingSchedule> scheds) {
  FullLiouvillian rhs(model, scheds);
  if (static_cast<std::size_t>(rho.rows()) != rhs.dim()) {
    throw ConfigError("full state dimension does not match the chain");
  }
  Matrix out;
  rhs(t, rho, out);
  return out;
}

std::vector<Snapshot> propagate(const FullRhs& rhs, Matrix rho0, std::span<const double> times,
                                const StepControl& control) {
  DormandPrince stepper(rhs, control);
  std::vector<Snapshot> out;
  out.reserve(times.size());
  double t = 0.0;
  for (double target : times) {
    if (target < t) throw ConfigError("propagation times must be ascending");
    while (t < target) stepper.step(t, rho0, target, [](Matrix& m) { hermitize(m); });
    out.push_back({t, rho0});
  }
  return out;
}

StepControl oracle_control(std::span<const DephasingSchedule> scheds) {
  IntegratorConfig cfg;
  return StepControl{1e-10, 1e-12, cfg.resolved_max_step(scheds)};
}

ReductionReport compare_reduction(const ChainModel& model,
                                  std::span<const DephasingSchedule> scheds, double t_end,
                                  std::size_t n_checkpoints) {
  if (model.n_sites() > kMaxSites) throw DimensionCap(model.n_sites());
  if (n_checkpoints == 0 || !(t_end > 0.0)) {
    throw ConfigError("reduction check needs t_end > 0 and at least one checkpoint");
  }
  std::vector<double> times(n_checkpoints);
  for (std::size_t k = 0; k < n_checkpoints; ++k) {
    times[k] = t_end * static_cast<double>(k + 1) / static_cast<double>(n_checkpoints);
  }

  const StepControl control = oracle_control(scheds);
  const auto full = propagate(FullLiouvillian(model, scheds),
                              FullState::initial(model.n_sites()).rho, times, control);

  IntegratorConfig cfg;
  cfg.rel_tol = control.rel_tol;
  cfg.abs_tol = control.abs_tol;
  cfg.max_step = control.max_step;
  cfg.t_max = t_end;
  cfg.residual_eps = std::numeric_limits<double>::min();
  RecordOptions rec;
  rec.mode = Record::States;
  rec.min_dt = std::numeric_limits<double>::infinity();
  rec.checkpoints = times;
  rec.min_t_end = t_end;
  const Trajectory traj = integrate(model, scheds, cfg, rec);

  ReductionReport report;
  std::size_t matched = 0;
  for (const auto& snap : full) {
    const auto it = std::find(traj.times.begin(), traj.times.end(), snap.t);
    if (it == traj.times.end()) continue;
    const BlockState& block = traj.states[static_cast<std::size_t>(it - traj.times.begin())];
    const FullState fs{snap.rho};
    ++matched;
    report.max_deviation =
        std::max(report.max_deviation, (fs.block() - block.rho).cwiseAbs().maxCoeff());
    report.max_trace_drift =
        std::max(report.max_trace_drift, std::abs(snap.rho.trace().real() - 1.0));
    report.max_p_sink_deviation =
        std::max(report.max_p_sink_deviation, std::abs(fs.p_sink() - block.p_sink()));
    for (std::size_t a = 0; a <= model.n_sites(); ++a) {
      report.max_ground_coherence = std::max(
          report.max_ground_coherence, std::abs(snap.rho(0, static_cast<Eigen::Index>(site_index(a)))));
    }
  }
  if (matched != full.size()) throw Error("block trajectory missed an oracle checkpoint");
  return report;
}

double validate_reduction(const ChainModel& model, std::span<const DephasingSchedule> scheds,
                          double t_end, std::size_t n_checkpoints) {
  return compare_reduction(model, scheds, t_end, n_checkpoints).max_deviation;
}

CoherenceReport check_single_site_coherence(const DephasingSchedule& sched, double omega,
                                            double t_end, std::size_t n_checkpoints) {
  const ChainModel model({omega}, {}, {0.0}, 0.0);
  const std::vector<DephasingSchedule> scheds{sched};
  return check_single_site_coherence(FullLiouvillian(model, scheds), sched, omega, t_end,
                                     n_checkpoints);
}

CoherenceReport check_single_site_coherence(const FullRhs& rhs, const DephasingSchedule& sched,
                                            double omega, double t_end,
                                            std::size_t n_checkpoints) {
  if (n_checkpoints == 0 || !(t_end > 0.0)) {
    throw ConfigError("coherence check needs t_end > 0 and at least one checkpoint");
  }
  // (|e> + |g>)/sqrt(2) on the site, sink in |g>: indices 1 (site excited) and 0.
  Matrix rho0 = Matrix::Zero(4, 4);
  rho0(0, 0) = rho0(0, 1) = rho0(1, 0) = rho0(1, 1) = 0.5;

  std::vector<double> times(n_checkpoints);
  for (std::size_t k = 0; k < n_checkpoints; ++k) {
    times[k] = t_end * static_cast<double>(k + 1) / static_cast<double>(n_checkpoints);
  }
  const std::vector<DephasingSchedule> scheds{sched};
  const auto snaps = propagate(rhs, rho0, times, oracle_control(scheds));

  CoherenceReport report;
  for (const auto& snap : snaps) {
    const Complex coherence = snap.rho(1, 0);
    const double magnitude = 0.5 * std::exp(-2.0 * accumulated_dephasing(snap.t, sched));
    const double shift = sched.apply_shift ? accumulated_shift(snap.t, sched) : 0.0;
    const Complex expected = std::polar(magnitude, -omega * snap.t - 2.0 * shift);
    report.max_relative_magnitude_error = std::max(
        report.max_relative_magnitude_error, std::abs(std::abs(coherence) / magnitude - 1.0));
    report.max_phase_error =
        std::max(report.max_phase_error, std::abs(std::arg(coherence / expected)));
  }
  return report;
}

std::vector<ParameterSet> reference_parameter_sets(std::size_t n_sites) {
  if (n_sites < 1 || n_sites > 3) throw ConfigError("reference parameter sets cover 1 to 3 sites");
  const std::size_t n = n_sites;
  std::vector<ParameterSet> sets;

  sets.push_back({"lambda-study", ChainModel::uniform(n, 1.0, 0.3, 0.1, 0.6),
                  std::vector<DephasingSchedule>(n, DephasingSchedule{0.1, 10.0, 0.8})});
  sets.push_back({"length-study", ChainModel::uniform(n, 2.0, 0.1, 0.1, 0.6),
                  std::vector<DephasingSchedule>(n, DephasingSchedule{0.2, 10.0, 0.8})});

  const std::vector<double> omega{0.5, 2.0, 0.5};
  std::vector<DephasingSchedule> scheds(n);
  const std::size_t middle = n >= 2 ? 1 : 0;
  scheds[middle] = DephasingSchedule{0.5, 10.0, 0.8, false};
  sets.push_back({"assisted-study",
                  ChainModel(std::vector<double>(omega.begin(), omega.begin() + static_cast<long>(n)),
                             std::vector<double>(n - 1, 0.2), std::vector<double>(n, 0.05), 0.6),
                  std::move(scheds)});
  return sets;
}

}  // namespace nmt::oracle
