#include "nmt/integrator.hpp"
#include "nmt/liouvillian.hpp"
#include "nmt/oracle.hpp"

#include <benchmark/benchmark.h>

#include <vector>

namespace {

nmt::ChainModel chain(std::size_t n) { return nmt::ChainModel::uniform(n, 2.0, 0.1, 0.1, 0.6); }

std::vector<nmt::DephasingSchedule> schedules(std::size_t n) {
  return std::vector<nmt::DephasingSchedule>(n, nmt::DephasingSchedule{0.2, 10.0, 0.8});
}

void BM_BlockRhs(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto scheds = schedules(n);
  const nmt::BlockLiouvillian rhs(chain(n), scheds);
  nmt::Matrix rho = nmt::Matrix::Identity(n + 1, n + 1) / static_cast<double>(n + 1);
  nmt::Matrix out;
  double t = 0.0;
  for (auto _ : state) {
    rhs(t, rho, out);
    benchmark::DoNotOptimize(out.data());
    t += 1e-4;
  }
}
BENCHMARK(BM_BlockRhs)->Arg(2)->Arg(4)->Arg(8)->Arg(16)->Arg(64);

void BM_FullRhs(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto scheds = schedules(n);
  const nmt::oracle::FullLiouvillian rhs(chain(n), scheds);
  const nmt::Matrix rho = nmt::oracle::FullState::initial(n).rho;
  nmt::Matrix out;
  double t = 0.0;
  for (auto _ : state) {
    rhs(t, rho, out);
    benchmark::DoNotOptimize(out.data());
    t += 1e-4;
  }
}
BENCHMARK(BM_FullRhs)->Arg(1)->Arg(2)->Arg(3)->Arg(4);

// One converged efficiency; the rate oscillation pins the step size to 1e-3.
void BM_Integrate(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto model = chain(n);
  const auto scheds = schedules(n);
  const nmt::IntegratorConfig cfg;
  for (auto _ : state) {
    const auto traj = nmt::integrate(model, scheds, cfg, nmt::RecordOptions::final_only());
    benchmark::DoNotOptimize(nmt::efficiency(traj, cfg).eta);
  }
}
BENCHMARK(BM_Integrate)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
