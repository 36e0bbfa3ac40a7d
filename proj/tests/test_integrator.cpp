#include "nmt/errors.hpp"
#include "nmt/integrator.hpp"

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

namespace nmt {
namespace {

const ChainModel kCascade({1.0}, {}, {0.1}, 0.6);
const std::vector<DephasingSchedule> kNoDephasing(1);

TEST(IntegratorConfig, ValidatesTolerances) {
  IntegratorConfig c;
  EXPECT_NO_THROW(c.validate());
  c.rel_tol = 0.0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.max_step = -1.0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.residual_eps = 0.0;
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(IntegratorConfig, MaxStepTracksFastestSchedule) {
  const IntegratorConfig c;
  const std::vector<DephasingSchedule> s{{0.1, 10.0, 0.8}, {0.1, 20.0, 0.8}};
  EXPECT_DOUBLE_EQ(c.resolved_max_step(s), 0.01 / 20.0);
  EXPECT_DOUBLE_EQ(c.resolved_max_step(kNoDephasing), 0.1);
}

TEST(Integrate, CascadeClosedForm) {
  const IntegratorConfig cfg;
  const Trajectory traj = integrate(kCascade, kNoDephasing, cfg);
  ASSERT_EQ(traj.termination, Termination::Residual);
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    const double exact = (6.0 / 7.0) * (1.0 - std::exp(-1.4 * traj.times[k]));
    EXPECT_NEAR(traj.records[k].p_sink, exact, 1e-7);
  }
  const Efficiency e = efficiency(traj, cfg);
  EXPECT_NEAR(e.eta, 6.0 / 7.0, 1e-6);
  EXPECT_LE(e.uncertainty, 5e-7);
}

TEST(Integrate, TimesStrictlyIncrease) {
  const Trajectory traj = integrate(kCascade, kNoDephasing, IntegratorConfig{});
  for (std::size_t k = 1; k < traj.times.size(); ++k) EXPECT_GT(traj.times[k], traj.times[k - 1]);
  EXPECT_EQ(traj.times.front(), 0.0);
}

TEST(Integrate, NoSinkMeansNoTransfer) {
  const ChainModel model({1.0, 1.0}, {0.3}, {0.1, 0.1}, 0.0);
  const std::vector<DephasingSchedule> s(2, DephasingSchedule{0.1, 10.0, 0.8});
  const IntegratorConfig cfg;
  const Trajectory traj = integrate(model, s, cfg, RecordOptions::final_only());
  EXPECT_EQ(traj.final_state.p_sink(), 0.0);
  const Efficiency e = efficiency(traj, cfg);
  EXPECT_LE(e.eta, e.uncertainty);
}

TEST(Integrate, LosslessChainTransfersEverything) {
  const ChainModel model({1.0, 1.0}, {0.3}, {0.0, 0.0}, 0.6);
  const std::vector<DephasingSchedule> s(2, DephasingSchedule{0.1, 10.0, 0.8});
  const IntegratorConfig cfg;
  const Trajectory traj = integrate(model, s, cfg, RecordOptions::final_only());
  EXPECT_NEAR(efficiency(traj, cfg).eta, 1.0, cfg.residual_eps);
}

TEST(Integrate, RabiFlopping) {
  const ChainModel model({1.0, 1.0}, {0.5}, {0.0, 0.0}, 0.0);
  const std::vector<DephasingSchedule> s(2);
  IntegratorConfig cfg;
  cfg.t_max = 20.0;
  const Trajectory traj = integrate(model, s, cfg);
  EXPECT_EQ(traj.termination, Termination::TMax);
  EXPECT_NEAR(traj.t_end(), 20.0, 1e-12);
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    const double t = traj.times[k];
    EXPECT_NEAR(traj.records[k].populations[0], std::pow(std::cos(0.5 * t), 2), 1e-7);
    EXPECT_NEAR(traj.records[k].populations[1], std::pow(std::sin(0.5 * t), 2), 1e-7);
    EXPECT_NEAR(traj.records[k].trace, 1.0, 1e-9);
  }
}

TEST(Integrate, UnitaryDynamicsKeepsSpectrum) {
  const ChainModel model({0.5, 2.0, 0.7}, {0.2, 0.3}, {0.0, 0.0, 0.0}, 0.0);
  const std::vector<DephasingSchedule> s(3);
  Matrix rho = Matrix::Zero(4, 4);
  rho(0, 0) = 0.5;
  rho(1, 1) = 0.3;
  rho(0, 1) = Complex(0.1, 0.2);
  rho(1, 0) = Complex(0.1, -0.2);
  rho(2, 2) = 0.2;
  const Eigen::VectorXd before = Eigen::SelfAdjointEigenSolver<Matrix>(rho).eigenvalues();
  // Drift grows linearly at about 7e-10 per unit time with default tolerances.
  IntegratorConfig cfg;
  cfg.t_max = 10.0;
  RecordOptions rec;
  rec.mode = Record::States;
  const Trajectory traj = integrate(model, s, cfg, rec, BlockState{rho});
  for (const auto& st : traj.states) {
    const Eigen::VectorXd now = Eigen::SelfAdjointEigenSolver<Matrix>(st.rho).eigenvalues();
    EXPECT_LE((now - before).cwiseAbs().maxCoeff(), 1e-8);
  }
}

TEST(Integrate, CheckpointsAreHitExactly) {
  RecordOptions rec;
  rec.checkpoints = {0.25, 1.0, 3.5};
  rec.min_dt = 10.0;
  const Trajectory traj = integrate(kCascade, kNoDephasing, IntegratorConfig{}, rec);
  for (double c : rec.checkpoints)
    EXPECT_NE(std::find(traj.times.begin(), traj.times.end(), c), traj.times.end()) << c;
}

TEST(Integrate, MinTEndExtendsPastConvergence) {
  RecordOptions rec;
  rec.min_t_end = 50.0;
  const Trajectory traj = integrate(kCascade, kNoDephasing, IntegratorConfig{}, rec);
  EXPECT_NEAR(traj.t_end(), 50.0, 1e-12);
}

TEST(Integrate, SingularScheduleRejectedUpFront) {
  const std::vector<DephasingSchedule> s{{0.0, 10.0, std::numbers::pi / 4}};
  EXPECT_THROW(integrate(kCascade, s, IntegratorConfig{}), SingularSchedule);
}

TEST(Efficiency, RefusesUnconvergedRun) {
  IntegratorConfig cfg;
  cfg.t_max = 1.0;
  const Trajectory traj = integrate(kCascade, kNoDephasing, cfg, RecordOptions::final_only());
  EXPECT_EQ(traj.termination, Termination::TMax);
  try {
    efficiency(traj, cfg);
    FAIL() << "expected NotConverged";
  } catch (const NotConverged& e) {
    EXPECT_GT(e.residual(), cfg.residual_eps);
  }
}

TEST(Integrate, TrajectoryInvariantsAtPublishedParameters) {
  const ChainModel model = ChainModel::uniform(2, 1.0, 0.3, 0.1, 0.6);
  for (double J : {0.0, 10.0}) {
    const std::vector<DephasingSchedule> s(2, DephasingSchedule{0.1, J, 0.8});
    RecordOptions rec;
    rec.mode = Record::States;
    const Trajectory traj = integrate(model, s, IntegratorConfig{}, rec);
    for (std::size_t k = 1; k < traj.records.size(); ++k) {
      EXPECT_LE(traj.records[k].trace, traj.records[k - 1].trace + 1e-9) << "J = " << J;
      EXPECT_GE(traj.records[k].p_sink, traj.records[k - 1].p_sink - 1e-9) << "J = " << J;
    }
    for (const auto& st : traj.states) EXPECT_LE(st.hermiticity_defect(), 1e-14);
    // Positivity is only guaranteed for non-negative rates; the controlled
    // schedule drives the state outside the PSD cone.
    if (J == 0.0) {
      for (const auto& st : traj.states) EXPECT_GE(st.min_eigenvalue(), -1e-9);
    }
  }
}

TEST(Integrate, StableUnderToleranceAndStepHalving) {
  const ChainModel model = ChainModel::uniform(2, 1.0, 0.3, 0.1, 0.6);
  const std::vector<DephasingSchedule> s(2, DephasingSchedule{0.1, 10.0, 0.8});
  const IntegratorConfig base;
  const Efficiency ref = efficiency(integrate(model, s, base, RecordOptions::final_only()), base);

  IntegratorConfig tight = base;
  tight.rel_tol /= 2;
  const Efficiency a = efficiency(integrate(model, s, tight, RecordOptions::final_only()), tight);
  EXPECT_LT(std::abs(a.eta - ref.eta), ref.uncertainty);

  IntegratorConfig fine = base;
  fine.max_step = base.resolved_max_step(s) / 2;
  const Efficiency b = efficiency(integrate(model, s, fine, RecordOptions::final_only()), fine);
  EXPECT_LT(std::abs(b.eta - ref.eta), 1e-8);
}

}  // namespace
}  // namespace nmt
