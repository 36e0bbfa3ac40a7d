#include "nmt/errors.hpp"
#include "nmt/integrator.hpp"
#include "nmt/liouvillian.hpp"
#include "nmt/oracle.hpp"

#include <gtest/gtest.h>

#include <random>

namespace nmt {
namespace {

using oracle::embed;
using oracle::full_rhs;

TEST(Oracle, SingleQubitOperators) {
  EXPECT_EQ(oracle::sigma_minus()(0, 1), Complex(1.0));
  EXPECT_EQ(oracle::sigma_plus()(1, 0), Complex(1.0));
  EXPECT_EQ(oracle::sigma_z()(0, 0), Complex(-1.0));
  EXPECT_EQ(oracle::sigma_z()(1, 1), Complex(1.0));
}

TEST(Oracle, EmbedActsOnOneBit) {
  const Matrix lower = embed(oracle::sigma_minus(), 1, 3);
  ASSERT_EQ(lower.rows(), 8);
  // |q1 excited> = index 2 lowers to index 0; index 3 (q0 and q1) lowers to index 1.
  EXPECT_EQ(lower(0, 2), Complex(1.0));
  EXPECT_EQ(lower(1, 3), Complex(1.0));
  EXPECT_EQ(lower.cwiseAbs().sum(), 4.0);
}

TEST(Oracle, DimensionCap) {
  const auto model = ChainModel::uniform(7, 1.0, 0.1, 0.1, 0.6);
  const std::vector<DephasingSchedule> s(7);
  EXPECT_THROW(full_rhs(Matrix::Zero(2, 2), 0.0, model, s), DimensionCap);
  EXPECT_THROW(oracle::FullState::initial(7), DimensionCap);
  EXPECT_THROW(oracle::validate_reduction(model, s, 1.0, 1), DimensionCap);
}

TEST(Oracle, TracePreservingForAnyInput) {
  const ChainModel model({0.5, 2.0}, {0.2}, {0.05, 0.1}, 0.6);
  const std::vector<DephasingSchedule> s{{0.1, 10.0, 0.8}, {0.3, 7.0, 0.4}};
  std::mt19937_64 rng(21);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 20; ++trial) {
    Matrix a(8, 8);
    for (Eigen::Index i = 0; i < 8; ++i)
      for (Eigen::Index j = 0; j < 8; ++j) a(i, j) = Complex(g(rng), g(rng));
    const Matrix out = full_rhs(a * a.adjoint(), 0.013 * trial, model, s);
    EXPECT_NEAR(std::abs(out.trace()), 0.0, 1e-12);
  }
}

TEST(Oracle, CoherenceEquationOfMotion) {
  const ChainModel model({0.0}, {}, {0.0}, 0.0);
  const DephasingSchedule sched{0.1, 10.0, 0.8};
  const std::vector<DephasingSchedule> s{sched};
  Matrix rho = Matrix::Zero(4, 4);
  rho(0, 0) = rho(0, 1) = rho(1, 0) = rho(1, 1) = 0.5;
  for (double t : {0.0, 0.013, 0.071}) {
    const Matrix out = full_rhs(rho, t, model, s);
    const RatePair r = evaluate_rates(t, sched);
    const Complex expected = (-2.0 * r.gamma - Complex(0.0, 2.0 * r.shift)) * rho(1, 0);
    EXPECT_NEAR(std::abs(out(1, 0) - expected), 0.0, 1e-13);
    EXPECT_NEAR(std::abs(out(0, 0)), 0.0, 1e-15);
  }
}

TEST(Oracle, CoherenceTracksClosedForms) {
  const auto rep = oracle::check_single_site_coherence({0.1, 10.0, 0.8}, 1.0, 1.0, 400);
  EXPECT_LE(rep.max_relative_magnitude_error, 1e-6);
  EXPECT_LE(rep.max_phase_error, 1e-6);
}

TEST(Oracle, FlippedShiftSignIsCaught) {
  const DephasingSchedule sched{0.1, 10.0, 0.8};
  const ChainModel model({1.0}, {}, {0.0}, 0.0);
  const std::vector<DephasingSchedule> s{sched};
  const oracle::FullLiouvillian correct(model, s);
  const Matrix z = embed(oracle::sigma_z(), 0, 2);
  const oracle::FullRhs mutated = [&](double t, const Matrix& rho, Matrix& out) {
    correct(t, rho, out);
    // Adds 2 i s [Z, rho], turning -i s [Z, rho] into +i s [Z, rho].
    out += Complex(0.0, 2.0 * energy_shift(t, sched)) * (z * rho - rho * z);
  };
  const auto rep = oracle::check_single_site_coherence(mutated, sched, 1.0, 1.0, 400);
  EXPECT_LE(rep.max_relative_magnitude_error, 1e-6);
  EXPECT_GT(rep.max_phase_error, 1e-2);
}

TEST(Oracle, StationaryWithoutDynamics) {
  const ChainModel model({0.0, 0.0}, {0.0}, {0.0, 0.0}, 0.0);
  const std::vector<DephasingSchedule> s(2);
  EXPECT_LE(oracle::validate_reduction(model, s, 5.0, 5), 1e-12);
}

TEST(Oracle, ReductionShortHorizon) {
  for (std::size_t n : {1u, 2u}) {
    for (const auto& set : oracle::reference_parameter_sets(n)) {
      const auto rep = oracle::compare_reduction(set.model, set.schedules, 5.0, 10);
      EXPECT_LE(rep.max_deviation, 1e-8) << set.label << " N=" << n;
      EXPECT_LE(rep.max_trace_drift, 1e-10) << set.label << " N=" << n;
      EXPECT_LE(rep.max_p_sink_deviation, 1e-8) << set.label << " N=" << n;
      EXPECT_LE(rep.max_ground_coherence, 1e-12) << set.label << " N=" << n;
    }
  }
}

TEST(Oracle, ReferenceSetsFollowSize) {
  for (std::size_t n : {1u, 2u, 3u}) {
    const auto sets = oracle::reference_parameter_sets(n);
    ASSERT_EQ(sets.size(), 3u);
    for (const auto& set : sets) {
      EXPECT_EQ(set.model.n_sites(), n);
      EXPECT_EQ(set.schedules.size(), n);
    }
  }
  EXPECT_THROW(oracle::reference_parameter_sets(0), ConfigError);
}

}  // namespace
}  // namespace nmt
