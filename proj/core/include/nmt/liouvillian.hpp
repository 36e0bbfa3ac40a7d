#pragma once

#include "nmt/model.hpp"

#include <span>
#include <vector>

namespace nmt {

/// Operators of the master equation written on the single-excitation block
/// {|1>, ..., |N>, |S>}.
struct BlockOperators {
  /// Tridiagonal over sites. Site j carries omega_j/2 - sum_{i != j} omega_i/2,
  /// the sink carries -sum_i omega_i/2 and has no coherent coupling.
  Matrix h_block;
  /// P_i = |i><i|, i = 0..N-1.
  std::vector<Matrix> site_projectors;
  /// A = |S><N|.
  Matrix sink_jump;
};

BlockOperators build_block_operators(const ChainModel& model);

/// Right-hand side of the master equation on the block.
///
/// Local dissipation only removes population from the block (its gain term
/// lands in the ground state), dephasing is Z_i rho Z_i - rho with
/// Z_i = 2 P_i - I, the shift is -i s_i(t) [Z_i, rho] and the sink term is
/// kappa_sink (2 A rho A^dag - {A^dag A, rho}).
class BlockLiouvillian {
 public:
  BlockLiouvillian(const ChainModel& model, std::span<const DephasingSchedule> scheds);

  std::size_t dim() const noexcept { return static_cast<std::size_t>(h_.rows()); }

  /// out = d rho / dt at time t. out is resized if needed.
  void operator()(double t, const Matrix& rho, Matrix& out) const;

 private:
  Matrix h_;
  std::vector<double> kappa_;
  double kappa_sink_;
  std::vector<DephasingSchedule> scheds_;
  std::vector<std::size_t> dephased_;
  mutable std::vector<RatePair> rates_;
};

/// Convenience wrapper around BlockLiouvillian for one-off evaluations.
Matrix apply_rhs(const BlockState& state, double t, const ChainModel& model,
                 std::span<const DephasingSchedule> scheds);

}  // namespace nmt
