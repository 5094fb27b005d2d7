#include "qlstat/conditional_ci.hpp"
#include "qlstat/coverage_oracle.hpp"
#include "qlstat/dgp.hpp"
#include "qlstat/special_functions.hpp"
#include "qlstat/unconditional_ci.hpp"

#include <benchmark/benchmark.h>

#include <vector>

using namespace qlstat;

static void BM_RegIncBeta(benchmark::State& state)
{
  const double n = static_cast<double>(state.range(0));
  const BetaParams ab = BetaParams::fractional(n, 0.4);
  double x = 0.39;
  for (auto _ : state) {
    benchmark::DoNotOptimize(special::reg_inc_beta(x, ab));
    x = x == 0.39 ? 0.41 : 0.39;
  }
}
BENCHMARK(BM_RegIncBeta)->RangeMultiplier(10)->Range(10, 1000000);

static void BM_InvRegIncBeta(benchmark::State& state)
{
  const BetaParams ab{ 7.8, 4.2 };
  for (auto _ : state)
    benchmark::DoNotOptimize(special::inv_reg_inc_beta(0.1, ab));
}
BENCHMARK(BM_InvRegIncBeta);

static void BM_EndpointIndices(benchmark::State& state)
{
  const auto n = static_cast<std::size_t>(state.range(0));
  const QuantileRequest req{ 0.5, 0.05, Side::two_sided, state.range(1) != 0, 0.5 };
  for (auto _ : state)
    benchmark::DoNotOptimize(endpoint_indices(n, req));
}
BENCHMARK(BM_EndpointIndices)->ArgsProduct({ { 25, 1000, 100000 }, { 0, 1 } });

static void BM_ConfidenceInterval(benchmark::State& state)
{
  const auto n = static_cast<std::size_t>(state.range(0));
  Philox4x32 rng(1, 0);
  std::vector<double> y(n);
  for (double& v : y)
    v = rng.normal();
  const QuantileRequest req{ 0.5, 0.05, Side::two_sided, false, 0.5 };
  for (auto _ : state)
    benchmark::DoNotOptimize(confidence_interval(SortedSample(y), req));
}
BENCHMARK(BM_ConfidenceInterval)->RangeMultiplier(10)->Range(100, 100000);

static void BM_ExactCoverage(benchmark::State& state)
{
  const QuantileRequest req{ 0.65, 0.1, Side::lower, false, 0.5 };
  for (auto _ : state)
    benchmark::DoNotOptimize(exact_interval_coverage(static_cast<std::size_t>(state.range(0)), req));
}
BENCHMARK(BM_ExactCoverage)->Arg(11)->Arg(50);

static void BM_ConditionalPlugin(benchmark::State& state)
{
  Dgp dgp;
  dgp.kind = DgpKind::sine_bump;
  Philox4x32 rng(2, 0);
  Dataset data;
  data.x.assign(1, {});
  for (int i = 0; i < state.range(0); ++i) {
    const auto [x, y] = dgp.draw_xy(rng);
    data.x[0].push_back(x);
    data.y.push_back(y);
  }
  const QuantileRequest req{ 0.5, 0.05, Side::two_sided, false, 0.5 };
  for (auto _ : state)
    benchmark::DoNotOptimize(conditional_interval(data, { { 0.75 }, std::nullopt }, req));
}
BENCHMARK(BM_ConditionalPlugin)->Arg(500)->Arg(10000);

BENCHMARK_MAIN();
