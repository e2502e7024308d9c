#include <benchmark/benchmark.h>

#include <algorithm>
#include <cmath>

#include "varagg/additivity.hpp"
#include "varagg/aggregate.hpp"
#include "varagg/fixtures.hpp"
#include "varagg/kernels.hpp"

using namespace varagg;

namespace {

Exec exec_of(const benchmark::State& state) { return state.range(0) ? Exec::Parallel : Exec::Serial; }

void label(benchmark::State& state) { state.SetLabel(exec_name(exec_of(state))); }

void BM_SampleSums(benchmark::State& state) {
  const RiskVector rv = models::triple().build();
  const auto n = static_cast<std::size_t>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::sample_sums(rv, n, 7, exec_of(state)));
  state.SetItemsProcessed(state.iterations() * state.range(1));
  label(state);
}
BENCHMARK(BM_SampleSums)->Args({0, 1 << 20})->Args({1, 1 << 20})->Unit(benchmark::kMillisecond);

void BM_QuantileGrid(benchmark::State& state) {
  const RiskVector rv = models::triple().build();
  const SumDistribution sd = build_sum_distribution(rv);
  const std::vector<double> ps = default_p_grid();
  for (auto _ : state) {
    benchmark::DoNotOptimize(kernels::map_grid([&](double p) { return sd.quantile(p); }, ps, exec_of(state)));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(ps.size()));
  label(state);
}
BENCHMARK(BM_QuantileGrid)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_ConvolutionCdfGrid(benchmark::State& state) {
  const RiskVector rv({MarginalDistribution::pareto2(1, 1), MarginalDistribution::frechet(0.5)},
                      DependenceModel::independent());
  const SumDistribution sd = build_sum_distribution(rv);
  std::vector<double> xs(256);
  for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = std::pow(10.0, -2.0 + 10.0 * static_cast<double>(i) / 255.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(kernels::map_grid([&](double x) { return sd.cdf(x); }, xs, exec_of(state)));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(xs.size()));
  label(state);
}
BENCHMARK(BM_ConvolutionCdfGrid)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_KsStatistic(benchmark::State& state) {
  const RiskVector rv = models::opener().build();
  const SumDistribution sd = build_sum_distribution(rv);
  std::vector<double> xs = kernels::sample_sums(rv, 1 << 18, 11, Exec::Parallel);
  std::sort(xs.begin(), xs.end());
  auto F = [&](double x) { return sd.cdf(x); };
  auto Fl = [&](double x) { return sd.cdf_left(x); };
  for (auto _ : state) benchmark::DoNotOptimize(kernels::ks_statistic(xs, F, Fl, exec_of(state)));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(xs.size()));
  label(state);
}
BENCHMARK(BM_KsStatistic)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_KsUpperBound(benchmark::State& state) {
  const RiskVector rv = models::opener().build();
  const SumDistribution sd = build_sum_distribution(rv);
  std::vector<double> xs = kernels::sample_sums(rv, 1 << 20, 11, Exec::Parallel);
  std::sort(xs.begin(), xs.end());
  auto F = [&](double x) { return sd.cdf(x); };
  auto Fl = [&](double x) { return sd.cdf_left(x); };
  for (auto _ : state) benchmark::DoNotOptimize(kernels::ks_upper_bound(xs, F, Fl, exec_of(state), 50));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(xs.size()));
  label(state);
}
BENCHMARK(BM_KsUpperBound)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_SearchMax(benchmark::State& state) {
  const std::uint64_t n = 1 << 22;
  auto f = [](std::uint64_t i) {
    const double x = static_cast<double>(i) * 1e-6;
    return std::sin(x) * std::exp(-1e-3 * x);
  };
  for (auto _ : state) benchmark::DoNotOptimize(kernels::search_max(n, f, exec_of(state)));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
  label(state);
}
BENCHMARK(BM_SearchMax)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
