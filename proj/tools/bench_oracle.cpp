// Serial reference versus OpenMP execution of the oracle kernels.

#include <benchmark/benchmark.h>

#include <string>

#include "aubin/oracle.hpp"
#include "aubin/problem_file.hpp"

namespace {

using namespace aubin;

io::ProblemFile fixture(const char* name) {
  return io::load_problem_file(std::string(AUBIN_FIXTURE_DIR) + "/" + name + ".prob");
}

oracle::Execution exec_of(const benchmark::State& state) {
  return state.range(0) == 0 ? oracle::Execution::Serial : oracle::Execution::Parallel;
}

void BM_SampleStationarySet(benchmark::State& state) {
  const io::ProblemFile pf = fixture("bilinear_ellipsoid");
  const calculus::DerivativeModel model(pf.spec);
  const Vector w = pf.point.w.array() + 0.05;
  for (auto _ : state) {
    benchmark::DoNotOptimize(oracle::sample_stationary_set(model, w, pf.point.x, pf.grid, pf.tol, exec_of(state)));
  }
  state.SetLabel(state.range(0) == 0 ? "serial" : "parallel");
}

void BM_Probe(benchmark::State& state) {
  const io::ProblemFile pf = fixture(state.range(1) == 0 ? "cubic_circle" : "quartic_plane");
  const calculus::DerivativeModel model(pf.spec);
  for (auto _ : state) {
    benchmark::DoNotOptimize(oracle::aubin_probe(model, pf.point, pf.probe, pf.grid, pf.tol, exec_of(state)));
  }
  state.SetLabel(std::string(state.range(0) == 0 ? "serial" : "parallel") +
                 (state.range(1) == 0 ? " n=1" : " n=2"));
}

}  // namespace

BENCHMARK(BM_SampleStationarySet)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Probe)->Args({0, 0})->Args({1, 0})->Args({0, 1})->Args({1, 1})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
