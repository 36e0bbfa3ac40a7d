#include "nmt/liouvillian.hpp"

#include "nmt/errors.hpp"

#include <fmt/format.h>

namespace nmt {

BlockOperators build_block_operators(const ChainModel& model) {
  const std::size_t n = model.n_sites();
  const auto dim = static_cast<Eigen::Index>(n + 1);
  const auto omega = model.omega();
  const auto lambda = model.lambda();

  double half_total = 0.0;
  for (double w : omega) half_total += 0.5 * w;

  BlockOperators ops;
  ops.h_block = Matrix::Zero(dim, dim);
  for (std::size_t j = 0; j < n; ++j) {
    const auto k = static_cast<Eigen::Index>(j);
    // omega_j/2 - sum_{i != j} omega_i/2
    ops.h_block(k, k) = omega[j] - half_total;
  }
  ops.h_block(dim - 1, dim - 1) = -half_total;
  for (std::size_t j = 0; j + 1 < n; ++j) {
    const auto k = static_cast<Eigen::Index>(j);
    ops.h_block(k, k + 1) = lambda[j];
    ops.h_block(k + 1, k) = lambda[j];
  }

  ops.site_projectors.reserve(n);
  for (std::size_t j = 0; j < n; ++j) {
    Matrix p = Matrix::Zero(dim, dim);
    p(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j)) = 1.0;
    ops.site_projectors.push_back(std::move(p));
  }
  ops.sink_jump = Matrix::Zero(dim, dim);
  ops.sink_jump(dim - 1, dim - 2) = 1.0;
  return ops;
}

BlockLiouvillian::BlockLiouvillian(const ChainModel& model,
                                   std::span<const DephasingSchedule> scheds)
    : h_(build_block_operators(model).h_block),
      kappa_(model.kappa().begin(), model.kappa().end()),
      kappa_sink_(model.kappa_sink()),
      scheds_(scheds.begin(), scheds.end()),
      rates_(scheds.size(), RatePair{0.0, 0.0}) {
  if (scheds_.size() != model.n_sites()) {
    throw ConfigError(fmt::format("expected {} dephasing schedules, got {}", model.n_sites(),
                                  scheds_.size()));
  }
  for (std::size_t i = 0; i < scheds_.size(); ++i) {
    scheds_[i].validate();
    if (scheds_[i].gamma0 != 0.0 || scheds_[i].J != 0.0) dephased_.push_back(i);
  }
}

void BlockLiouvillian::operator()(double t, const Matrix& rho, Matrix& out) const {
  const Eigen::Index dim = h_.rows();
  const Eigen::Index n = dim - 1;
  const Complex minus_i(0.0, -1.0);

  out.noalias() = h_ * rho;
  out.noalias() -= rho * h_;
  out *= minus_i;

  for (auto& r : rates_) r = RatePair{0.0, 0.0};
  for (std::size_t i : dephased_) {
    rates_[i] = evaluate_rates(t, scheds_[i]);
    if (!scheds_[i].apply_shift) rates_[i].shift = 0.0;
  }

  // Every local term is diagonal in the site basis, so it acts elementwise:
  //   decay     -(d_a + d_b) rho_ab,  d = kappa (+ kappa_sink on the last site)
  //   dephasing -2 (g_a + g_b) rho_ab for a != b
  //   shift     -2i (s_a - s_b) rho_ab
  // with zero entries on the sink index.
  auto decay = [&](Eigen::Index a) {
    if (a == n) return 0.0;
    return kappa_[static_cast<std::size_t>(a)] + (a == n - 1 ? kappa_sink_ : 0.0);
  };
  auto rate = [&](Eigen::Index a) {
    return a == n ? RatePair{0.0, 0.0} : rates_[static_cast<std::size_t>(a)];
  };

  for (Eigen::Index b = 0; b < dim; ++b) {
    const double db = decay(b);
    const RatePair rb = rate(b);
    for (Eigen::Index a = 0; a < dim; ++a) {
      const double da = decay(a);
      const RatePair ra = rate(a);
      double re = -(da + db);
      if (a != b) re -= 2.0 * (ra.gamma + rb.gamma);
      const Complex factor(re, -2.0 * (ra.shift - rb.shift));
      out(a, b) += factor * rho(a, b);
    }
  }
  out(n, n) += 2.0 * kappa_sink_ * rho(n - 1, n - 1);
}

Matrix apply_rhs(const BlockState& state, double t, const ChainModel& model,
                 std::span<const DephasingSchedule> scheds) {
  if (static_cast<std::size_t>(state.rho.rows()) != model.n_sites() + 1 ||
      state.rho.rows() != state.rho.cols()) {
    throw ConfigError("block state dimension does not match the chain");
  }
  BlockLiouvillian rhs(model, scheds);
  Matrix out(state.rho.rows(), state.rho.cols());
  rhs(t, state.rho, out);
  return out;
}

}  // namespace nmt
