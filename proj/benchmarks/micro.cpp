#include <benchmark/benchmark.h>

#include <cmath>

#include "autotune/forest.hpp"
#include "autotune/gaussian_process.hpp"
#include "autotune/objective.hpp"
#include "autotune/rng.hpp"
#include "autotune/stats.hpp"

using namespace autotune;

namespace {

std::vector<Observation> sample(const SearchSpace& space, std::size_t n, Rng& rng) {
  const Objective objective(ObjectiveSpec{ObjectiveKind::synthetic_mandelbrot, 0.0});
  std::vector<Observation> out;
  for (std::size_t i = 0; i < n; ++i) {
    const auto c = space.sample_uniform(rng, true);
    out.push_back({c, objective.noiseless(c)});
  }
  return out;
}

void BM_EnumerateValid(benchmark::State& state) {
  const SearchSpace space;
  for (auto _ : state) benchmark::DoNotOptimize(space.enumerate_valid());
}
BENCHMARK(BM_EnumerateValid)->Unit(benchmark::kMillisecond);

void BM_ForestPredictBox(benchmark::State& state) {
  const SearchSpace space;
  Rng rng(1);
  const auto data = sample(space, static_cast<std::size_t>(state.range(0)), rng);
  const auto forest = ForestModel::fit(data, {}, rng);
  for (auto _ : state) benchmark::DoNotOptimize(forest.predict_box(space));
}
BENCHMARK(BM_ForestPredictBox)->Arg(90)->Arg(390)->Unit(benchmark::kMillisecond);

void BM_GpFitAndPosterior(benchmark::State& state) {
  const SearchSpace space;
  Rng rng(2);
  auto data = sample(space, static_cast<std::size_t>(state.range(0)), rng);
  for (auto& o : data) o.runtime = std::log(o.runtime);
  std::vector<Configuration> queries;
  for (int i = 0; i < 1000; ++i) queries.push_back(space.sample_uniform(rng, false));
  for (auto _ : state) {
    const auto model = GpModel::fit(data, space);
    benchmark::DoNotOptimize(model.posterior(queries));
  }
}
BENCHMARK(BM_GpFitAndPosterior)->Arg(25)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond);

void BM_MwuExact(benchmark::State& state) {
  Rng rng(3);
  std::vector<double> a, b;
  for (int i = 0; i < 8; ++i) a.push_back(rng.normal());
  for (int i = 0; i < 8; ++i) b.push_back(rng.normal() + 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(stats::mann_whitney_u(a, b, stats::Alternative::less));
}
BENCHMARK(BM_MwuExact);

void BM_MwuNormal(benchmark::State& state) {
  Rng rng(4);
  std::vector<double> a, b;
  for (int i = 0; i < 800; ++i) a.push_back(rng.normal());
  for (int i = 0; i < 800; ++i) b.push_back(rng.normal() + 0.1);
  for (auto _ : state) benchmark::DoNotOptimize(stats::mann_whitney_u(a, b, stats::Alternative::less));
}
BENCHMARK(BM_MwuNormal);

}  // namespace

BENCHMARK_MAIN();
