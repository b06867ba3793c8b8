#include "autotune/strategies.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <set>

#include "autotune/errors.hpp"

namespace autotune {

namespace {

struct StrategyName {
  StrategyKind kind;
  std::string_view name;
};

constexpr StrategyName kStrategyNames[] = {
    {StrategyKind::random_search, "random-search"}, {StrategyKind::rf_surrogate, "rf-surrogate"},
    {StrategyKind::genetic, "genetic"},             {StrategyKind::bo_gp, "bo-gp"},
    {StrategyKind::bo_tpe, "bo-tpe"},               {StrategyKind::exhaustive, "exhaustive"},
};

const Trial& measure(const ExperimentContext& ctx, const Configuration& c, Rng& rng,
                     ExperimentOutcome& outcome) {
  outcome.history.push_back({c, ctx.objective.evaluate_once(c, rng)});
  return outcome.history.back();
}

std::size_t argmin_runtime(std::span<const Trial> trials) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < trials.size(); ++i) {
    if (trials[i].measurement.runtime_ms < trials[best].measurement.runtime_ms) best = i;
  }
  return best;
}

// Picks the best of history[first..] and takes the final measurements.
ExperimentOutcome finish(const ExperimentContext& ctx, ExperimentOutcome outcome, Rng& rng) {
  const Trial& best = outcome.history[argmin_runtime(outcome.history)];
  outcome.best_config = best.config;
  outcome.best_search_runtime = best.measurement.runtime_ms;
  outcome.evaluations_used = outcome.history.size();
  outcome.final_score = ctx.objective.evaluate_final(outcome.best_config, rng, ctx.final_repetitions);
  return outcome;
}

void require_budget(std::size_t budget, std::size_t minimum, std::string_view strategy) {
  if (budget < minimum) {
    throw BudgetError(std::string(strategy) + ": budget " + std::to_string(budget) +
                      " is below the minimum of " + std::to_string(minimum));
  }
}

std::vector<Observation> observations(std::span<const Trial> trials) {
  std::vector<Observation> out;
  out.reserve(trials.size());
  for (const auto& t : trials) out.push_back({t.config, t.measurement.runtime_ms});
  return out;
}

struct Ranked {
  double prediction;
  std::uint64_t index;
  bool operator<(const Ranked& other) const {
    return prediction != other.prediction ? prediction < other.prediction : index < other.index;
  }
};

// Keeps the `k` smallest (prediction, index) pairs.
class TopK {
 public:
  explicit TopK(std::size_t k) : k_(k) {}
  void offer(const Ranked& r) {
    if (heap_.size() < k_) {
      heap_.push(r);
    } else if (r < heap_.top()) {
      heap_.pop();
      heap_.push(r);
    }
  }
  std::vector<Ranked> sorted() {
    std::vector<Ranked> out;
    while (!heap_.empty()) {
      out.push_back(heap_.top());
      heap_.pop();
    }
    std::reverse(out.begin(), out.end());
    return out;
  }

 private:
  std::size_t k_;
  std::priority_queue<Ranked> heap_;
};

}  // namespace

std::string_view to_string(StrategyKind kind) {
  for (const auto& entry : kStrategyNames) {
    if (entry.kind == kind) return entry.name;
  }
  return "unknown";
}

std::optional<StrategyKind> parse_strategy_kind(std::string_view name) {
  for (const auto& entry : kStrategyNames) {
    if (entry.name == name) return entry.kind;
  }
  return std::nullopt;
}

bool uses_constraint(StrategyKind kind) {
  return kind != StrategyKind::bo_gp && kind != StrategyKind::bo_tpe;
}

const std::string& StrategySpec::name() const {
  if (id.empty()) {
    thread_local std::string fallback;
    fallback = std::string(to_string(kind));
    return fallback;
  }
  return id;
}

ExperimentOutcome run_random_search(const ExperimentContext& ctx, const RandomSearchOptions& options,
                                    Rng& rng) {
  require_budget(ctx.budget, 1, "random-search");
  ExperimentOutcome outcome;
  outcome.history.reserve(ctx.budget);

  if (options.without_replacement) {
    std::vector<Configuration> pool = ctx.space.enumerate_valid();
    if (ctx.budget > pool.size()) {
      throw BudgetError("random-search: budget exceeds the number of valid configurations");
    }
    for (std::size_t i = 0; i < ctx.budget; ++i) {
      const auto j = static_cast<std::size_t>(
          rng.uniform_int(static_cast<std::int64_t>(i), static_cast<std::int64_t>(pool.size()) - 1));
      std::swap(pool[i], pool[j]);
      measure(ctx, pool[i], rng, outcome);
    }
  } else if (ctx.presampled.size() >= ctx.budget) {
    outcome.history.assign(ctx.presampled.begin(),
                           ctx.presampled.begin() + static_cast<std::ptrdiff_t>(ctx.budget));
  } else {
    for (std::size_t i = 0; i < ctx.budget; ++i) {
      measure(ctx, ctx.space.sample_uniform(rng, true), rng, outcome);
    }
  }
  return finish(ctx, std::move(outcome), rng);
}

namespace {

ExperimentOutcome rf_impl(const ExperimentContext& ctx, const RfSurrogateOptions& options, Rng& rng,
                          const PredictorFactory* surrogate) {
  require_budget(ctx.budget, options.prediction_count + 2, "rf-surrogate");
  const std::size_t training = ctx.budget - options.prediction_count;

  ExperimentOutcome outcome;
  outcome.history.reserve(ctx.budget);
  if (ctx.presampled.size() >= training) {
    outcome.history.assign(ctx.presampled.begin(),
                           ctx.presampled.begin() + static_cast<std::ptrdiff_t>(training));
  } else {
    for (std::size_t i = 0; i < training; ++i) {
      measure(ctx, ctx.space.sample_uniform(rng, true), rng, outcome);
    }
  }

  const std::vector<Observation> train = observations(outcome.history);
  std::optional<ForestModel> forest;
  std::function<double(const Configuration&)> predictor;
  if (surrogate) {
    predictor = (*surrogate)(train, rng);
  } else {
    forest.emplace(ForestModel::fit(train, options.forest, rng));
  }

  // Ask for extra ranked candidates so duplicates in a sampled pool can be
  // replaced by the next best distinct configuration.
  const std::uint64_t valid = ctx.space.count_valid();
  const bool full_pool = options.candidate_cap == 0 || options.candidate_cap >= valid;
  std::vector<Ranked> ranked;
  if (full_pool) {
    TopK top(options.prediction_count);
    const std::uint64_t total = ctx.space.total_size();
    std::vector<double> box;
    if (forest) box = forest->predict_box(ctx.space);
    for (std::uint64_t i = 0; i < total; ++i) {
      const Configuration c = ctx.space.box_at(i);
      if (!ctx.space.satisfies_constraint(c)) continue;
      top.offer({forest ? box[i] : predictor(c), i});
    }
    ranked = top.sorted();
  } else {
    ranked.reserve(options.candidate_cap);
    for (std::size_t i = 0; i < options.candidate_cap; ++i) {
      const Configuration c = ctx.space.sample_uniform(rng, true);
      ranked.push_back({forest ? forest->predict(c) : predictor(c), ctx.space.box_index(c)});
    }
    std::sort(ranked.begin(), ranked.end());
  }

  std::set<std::uint64_t> seen;
  for (const auto& r : ranked) {
    if (seen.size() == options.prediction_count) break;
    if (!seen.insert(r.index).second) continue;
    measure(ctx, ctx.space.box_at(r.index), rng, outcome);
  }
  // A small capped pool can hold fewer distinct candidates than needed.
  while (outcome.history.size() < ctx.budget) measure(ctx, ctx.space.sample_uniform(rng, true), rng, outcome);
  return finish(ctx, std::move(outcome), rng);
}

}  // namespace

ExperimentOutcome run_rf_surrogate(const ExperimentContext& ctx, const RfSurrogateOptions& options,
                                   Rng& rng) {
  return rf_impl(ctx, options, rng, nullptr);
}

ExperimentOutcome run_rf_surrogate(const ExperimentContext& ctx, const RfSurrogateOptions& options,
                                   Rng& rng, const PredictorFactory& surrogate) {
  return rf_impl(ctx, options, rng, &surrogate);
}

std::size_t bo_gp_initial_count(std::size_t budget, double init_fraction) {
  const auto n = static_cast<std::size_t>(std::llround(init_fraction * static_cast<double>(budget)));
  return std::min(budget, std::max<std::size_t>(2, n));
}

ExperimentOutcome run_bo_gp(const ExperimentContext& ctx, const BoGpOptions& options, Rng& rng) {
  require_budget(ctx.budget, 5, "bo-gp");
  ExperimentOutcome outcome;
  outcome.history.reserve(ctx.budget);

  const std::size_t initial = bo_gp_initial_count(ctx.budget, options.init_fraction);
  for (std::size_t i = 0; i < initial; ++i) {
    measure(ctx, ctx.space.sample_uniform(rng, false), rng, outcome);
  }

  std::vector<Configuration> candidates(options.candidates);
  while (outcome.history.size() < ctx.budget) {
    // The model sees log runtimes so penalty values do not flatten the rest
    // of the landscape after standardization.
    std::vector<Observation> train = observations(outcome.history);
    double best = std::numeric_limits<double>::infinity();
    for (auto& o : train) {
      o.runtime = std::log(o.runtime);
      best = std::min(best, o.runtime);
    }
    for (auto& c : candidates) c = ctx.space.sample_uniform(rng, false);

    Configuration next;
    try {
      const GpModel model = GpModel::fit(train, ctx.space, options.gp);
      const std::vector<Posterior> post = model.posterior(candidates);
      double best_ei = -1.0;
      for (std::size_t i = 0; i < candidates.size(); ++i) {
        const double ei = expected_improvement(post[i].mean, post[i].variance, best);
        if (ei > best_ei || (ei == best_ei && candidates[i] < next)) {
          best_ei = ei;
          next = candidates[i];
        }
      }
    } catch (const NumericalError&) {
      ++outcome.model_fallbacks;
      next = ctx.space.sample_uniform(rng, false);
    }
    measure(ctx, next, rng, outcome);
  }
  return finish(ctx, std::move(outcome), rng);
}

std::size_t bo_tpe_startup_count(std::size_t budget, const BoTpeOptions& options) {
  if (options.startup) return std::min(budget, *options.startup);
  return std::min<std::size_t>({budget, 20, (budget + 3) / 4});
}

ExperimentOutcome run_bo_tpe(const ExperimentContext& ctx, const BoTpeOptions& options, Rng& rng) {
  require_budget(ctx.budget, 5, "bo-tpe");
  ExperimentOutcome outcome;
  outcome.history.reserve(ctx.budget);

  // The density split needs one good and one bad observation.
  const std::size_t startup = std::max<std::size_t>(2, bo_tpe_startup_count(ctx.budget, options));
  for (std::size_t i = 0; i < std::min(startup, ctx.budget); ++i) {
    measure(ctx, ctx.space.sample_uniform(rng, false), rng, outcome);
  }

  // Candidates already measured are skipped: the good density concentrates
  // quickly and would otherwise spend most of the budget on repeats.
  std::set<std::uint64_t> seen;
  for (const auto& t : outcome.history) seen.insert(ctx.space.box_index(t.config));
  const std::uint64_t total = ctx.space.total_size();
  while (outcome.history.size() < ctx.budget) {
    const std::vector<Observation> obs = observations(outcome.history);
    const ParzenPair pair = parzen_fit(obs, ctx.space, options.gamma, options.prior_weight);
    Configuration next;
    bool found = false;
    double best_score = -1.0;
    for (std::size_t round = 0; round < 10 && !found; ++round) {
      for (std::size_t i = 0; i < options.candidates; ++i) {
        const Configuration c = parzen_sample_good(pair, rng);
        if (seen.size() < total && seen.count(ctx.space.box_index(c))) continue;
        const double score = parzen_score(pair, c);
        if (score > best_score) {
          best_score = score;
          next = c;
          found = true;
        }
      }
    }
    while (!found) {
      next = ctx.space.sample_uniform(rng, false);
      found = seen.size() >= total || !seen.count(ctx.space.box_index(next));
    }
    seen.insert(ctx.space.box_index(next));
    measure(ctx, next, rng, outcome);
  }
  return finish(ctx, std::move(outcome), rng);
}

ExperimentOutcome run_exhaustive(const ExperimentContext& ctx, const ExhaustiveOptions& options,
                                 Rng& rng) {
  const std::uint64_t valid = ctx.space.count_valid();
  if (valid > options.max_configs) {
    throw RefusalError("exhaustive: " + std::to_string(valid) +
                       " valid configurations exceed the guard of " +
                       std::to_string(options.max_configs));
  }
  ExperimentOutcome outcome;
  outcome.history.reserve(valid);
  for (const auto& c : ctx.space.enumerate_valid()) measure(ctx, c, rng, outcome);
  return finish(ctx, std::move(outcome), rng);
}

ExperimentOutcome run_strategy(const StrategySpec& spec, const ExperimentContext& ctx, Rng& rng) {
  const StrategyOptions& o = spec.options;
  switch (spec.kind) {
    case StrategyKind::random_search:
      return run_random_search(ctx, o.random_search, rng);
    case StrategyKind::rf_surrogate:
      return run_rf_surrogate(ctx, o.rf, rng);
    case StrategyKind::genetic:
      return run_genetic(ctx, o.genetic, rng);
    case StrategyKind::bo_gp:
      return run_bo_gp(ctx, o.bo_gp, rng);
    case StrategyKind::bo_tpe:
      return run_bo_tpe(ctx, o.bo_tpe, rng);
    case StrategyKind::exhaustive:
      return run_exhaustive(ctx, o.exhaustive, rng);
  }
  throw std::invalid_argument("run_strategy: unknown strategy kind");
}

std::size_t minimum_budget(StrategyKind kind, const StrategyOptions& options) {
  switch (kind) {
    case StrategyKind::rf_surrogate:
      return options.rf.prediction_count + 2;
    case StrategyKind::genetic:
      return 8;
    case StrategyKind::bo_gp:
    case StrategyKind::bo_tpe:
      return 5;
    default:
      return 1;
  }
}

std::size_t planned_evaluations(const StrategySpec& spec, std::size_t budget,
                                const SearchSpace& space) {
  switch (spec.kind) {
    case StrategyKind::genetic: {
      const auto& g = spec.options.genetic;
      if (g.population && g.generations) {
        return static_cast<std::size_t>(*g.population) * static_cast<std::size_t>(*g.generations);
      }
      const auto [pop, gen] = ga_schedule(budget);
      return static_cast<std::size_t>(pop) * static_cast<std::size_t>(gen);
    }
    case StrategyKind::exhaustive:
      return space.count_valid();
    default:
      return budget;
  }
}

}  // namespace autotune
