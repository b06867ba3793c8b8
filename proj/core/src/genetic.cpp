#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "autotune/errors.hpp"
#include "autotune/strategies.hpp"

namespace autotune {

namespace {

// Budget -> (population, generations) for the standard sample sizes.
const std::map<std::size_t, std::pair<int, int>> kScheduleTable{
    {25, {8, 3}}, {50, {10, 5}}, {100, {10, 10}}, {200, {20, 10}}, {400, {20, 20}},
};

void resample_workgroup(const SearchSpace& space, Configuration& c, Rng& rng) {
  while (!space.satisfies_constraint(c)) {
    for (std::size_t d = 3; d < kDimensions; ++d) {
      c[d] = static_cast<int>(rng.uniform_int(space.range(d).lo, space.range(d).hi));
    }
  }
}

std::array<bool, kDimensions> random_half_mask(Rng& rng) {
  std::array<std::size_t, kDimensions> order{};
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::array<bool, kDimensions> mask{};
  for (std::size_t i = 0; i < kDimensions / 2; ++i) {
    const auto j = static_cast<std::size_t>(
        rng.uniform_int(static_cast<std::int64_t>(i), static_cast<std::int64_t>(kDimensions) - 1));
    std::swap(order[i], order[j]);
    mask[order[i]] = true;
  }
  return mask;
}

}  // namespace

std::pair<int, int> ga_schedule(std::size_t budget) {
  if (budget < 8) throw BudgetError("genetic: budget must be at least 8");
  if (const auto it = kScheduleTable.find(budget); it != kScheduleTable.end()) return it->second;
  int pop = static_cast<int>(std::lround(std::sqrt(static_cast<double>(budget))));
  if (pop % 2) --pop;
  pop = std::max(pop, 2);
  return {pop, static_cast<int>(budget / static_cast<std::size_t>(pop))};
}

Configuration crossover(const Configuration& a, const Configuration& b,
                        const std::array<bool, kDimensions>& from_a) {
  Configuration child;
  for (std::size_t d = 0; d < kDimensions; ++d) child[d] = from_a[d] ? a[d] : b[d];
  return child;
}

ExperimentOutcome run_genetic(const ExperimentContext& ctx, const GeneticOptions& options, Rng& rng) {
  if (ctx.budget < 8) throw BudgetError("genetic: budget must be at least 8");
  auto [population, generations] = ga_schedule(ctx.budget);
  if (options.population) population = *options.population;
  if (options.generations) generations = *options.generations;
  if (population < 2 || generations < 1) {
    throw BudgetError("genetic: population must be >= 2 and generations >= 1");
  }
  if (static_cast<std::size_t>(population) * static_cast<std::size_t>(generations) > ctx.budget) {
    throw BudgetError("genetic: population * generations exceeds the budget");
  }

  const auto pop = static_cast<std::size_t>(population);
  const std::size_t keep = std::max<std::size_t>(1, pop / 2);

  ExperimentOutcome outcome;
  outcome.history.reserve(pop * static_cast<std::size_t>(generations));
  std::vector<Configuration> members(pop);
  for (auto& m : members) m = ctx.space.sample_uniform(rng, true);

  for (int gen = 0; gen < generations; ++gen) {
    // Every member is measured each generation, survivors included.
    std::vector<double> fitness(pop);
    for (std::size_t i = 0; i < pop; ++i) {
      outcome.history.push_back({members[i], ctx.objective.evaluate_once(members[i], rng)});
      fitness[i] = outcome.history.back().measurement.runtime_ms;
    }
    if (gen + 1 == generations) break;

    std::vector<std::size_t> order(pop);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return fitness[a] < fitness[b]; });

    std::vector<Configuration> next;
    next.reserve(pop);
    for (std::size_t i = 0; i < keep; ++i) next.push_back(members[order[i]]);
    while (next.size() < pop) {
      const auto pick = [&] {
        return members[order[static_cast<std::size_t>(
            rng.uniform_int(0, static_cast<std::int64_t>(keep) - 1))]];
      };
      const Configuration a = pick();
      const Configuration b = pick();
      Configuration child =
          rng.bernoulli(options.crossover_rate) ? crossover(a, b, random_half_mask(rng)) : a;
      for (std::size_t d = 0; d < kDimensions; ++d) {
        if (rng.bernoulli(options.mutation_rate)) {
          child[d] = static_cast<int>(rng.uniform_int(ctx.space.range(d).lo, ctx.space.range(d).hi));
        }
      }
      resample_workgroup(ctx.space, child, rng);
      next.push_back(child);
    }
    members = std::move(next);
  }

  const std::size_t best = [&] {
    std::size_t b = 0;
    for (std::size_t i = 1; i < outcome.history.size(); ++i) {
      if (outcome.history[i].measurement.runtime_ms < outcome.history[b].measurement.runtime_ms) b = i;
    }
    return b;
  }();
  outcome.best_config = outcome.history[best].config;
  outcome.best_search_runtime = outcome.history[best].measurement.runtime_ms;
  outcome.evaluations_used = outcome.history.size();
  outcome.final_score = ctx.objective.evaluate_final(outcome.best_config, rng, ctx.final_repetitions);
  return outcome;
}

}  // namespace autotune
