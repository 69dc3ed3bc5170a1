#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "randinf/anova.hpp"
#include "randinf/expected_mean_squares.hpp"
#include "randinf/fdist.hpp"
#include "randinf/inference.hpp"
#include "randinf/randomization.hpp"

namespace {

using namespace randinf;

PotentialOutcomeTable random_ls(std::size_t T, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d;
  std::vector<double> x(T * T * T);
  for (double& v : x) v = d(rng);
  return PotentialOutcomeTable::latin_square(T, std::move(x));
}

PotentialOutcomeTable spike_square() {
  std::vector<double> x(64, 0.0);
  for (std::size_t t = 0; t < 4; ++t) {
    x[t] = 1.0;
    x[(1 * 4 + 1) * 4 + t] = 1.0;
  }
  return PotentialOutcomeTable::latin_square(4, std::move(x));
}

void BM_EnumerateLatinSquares(benchmark::State& state) {
  const auto order = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    std::uint64_t n = 0;
    auto s = enumerate_latin_squares(order);
    while (auto a = s->next()) ++n;
    benchmark::DoNotOptimize(n);
  }
}
BENCHMARK(BM_EnumerateLatinSquares)->Arg(4)->Arg(5)->Unit(benchmark::kMillisecond);

void BM_SampleLatinSquares(benchmark::State& state) {
  const auto order = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    auto s = sample_latin_squares(order, 100, 1);
    while (auto a = s->next()) benchmark::DoNotOptimize(a);
  }
  state.SetItemsProcessed(state.iterations() * 100);
}
BENCHMARK(BM_SampleLatinSquares)->Arg(6)->Arg(10);

void BM_AnovaSingleAssignment(benchmark::State& state) {
  const auto t = random_ls(5, 3);
  auto s = enumerate_latin_squares(5);
  const Assignment a = *s->next();
  for (auto _ : state) benchmark::DoNotOptimize(anova(t, a));
}
BENCHMARK(BM_AnovaSingleAssignment);

void BM_ExactDistributionOrderFour(benchmark::State& state) {
  const auto t = spike_square();
  for (auto _ : state) benchmark::DoNotOptimize(exact_distribution(t));
}
BENCHMARK(BM_ExactDistributionOrderFour)->Unit(benchmark::kMillisecond);

void BM_ExpectedMeanSquares(benchmark::State& state) {
  const auto t = random_ls(static_cast<std::size_t>(state.range(0)), 5);
  for (auto _ : state) benchmark::DoNotOptimize(expected_ms(t));
}
BENCHMARK(BM_ExpectedMeanSquares)->Arg(4)->Arg(8)->Arg(16);

void BM_FQuantile(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(f_quantile({3, 6}, 0.95));
}
BENCHMARK(BM_FQuantile);

void BM_MonteCarloReplication(benchmark::State& state) {
  const auto t = spike_square();
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(monte_carlo_with_errors(t, 0.01, 1, 0.05, ++seed));
}
BENCHMARK(BM_MonteCarloReplication)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
