// Serial reference vs OpenMP kernels: assembly with static condensation,
// estimator evaluation and energy error, on ex1 (2048 cells).

#include <benchmark/benchmark.h>

#include "hho/cases.hpp"
#include "hho/estimator.hpp"
#include "hho/solver.hpp"

namespace {

struct Fixture {
  hho::Case ex1 = hho::builtin_case("ex1", 32);
};

const Fixture& fixture()
{
  static const Fixture f;
  return f;
}

hho::Execution mode(const benchmark::State& state)
{
  return state.range(1) == 0 ? hho::Execution::serial : hho::Execution::parallel;
}

void BM_Assemble(benchmark::State& state)
{
  const auto& c = fixture().ex1;
  const int k = static_cast<int>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(hho::assemble(c.mesh, c.problem, k, mode(state)));
}

void BM_Estimate(benchmark::State& state)
{
  const auto& c = fixture().ex1;
  const int k = static_cast<int>(state.range(0));
  const hho::HhoSolution u = hho::solve_problem(c.mesh, c.problem, k);
  for (auto _ : state)
    benchmark::DoNotOptimize(hho::estimate(c.mesh, c.problem, u, mode(state)));
}

void BM_EnergyError(benchmark::State& state)
{
  const auto& c = fixture().ex1;
  const int k = static_cast<int>(state.range(0));
  const hho::HhoSolution u = hho::solve_problem(c.mesh, c.problem, k);
  for (auto _ : state)
    benchmark::DoNotOptimize(hho::energy_error(c.mesh, c.problem, u, 0, mode(state)));
}

void degrees(benchmark::internal::Benchmark* b)
{
  b->ArgNames({"k", "parallel"});
  for (const int k : {0, 1, 3})
    for (const int par : {0, 1})
      b->Args({k, par});
  b->Unit(benchmark::kMillisecond)->UseRealTime();
}

} // namespace

BENCHMARK(BM_Assemble)->Apply(degrees);
BENCHMARK(BM_Estimate)->Apply(degrees);
BENCHMARK(BM_EnergyError)->Apply(degrees);

BENCHMARK_MAIN();
