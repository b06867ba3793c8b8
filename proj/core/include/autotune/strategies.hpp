#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "autotune/forest.hpp"
#include "autotune/gaussian_process.hpp"
#include "autotune/objective.hpp"
#include "autotune/parzen.hpp"
#include "autotune/rng.hpp"
#include "autotune/space.hpp"

namespace autotune {

enum class StrategyKind { random_search, rf_surrogate, genetic, bo_gp, bo_tpe, exhaustive };

std::string_view to_string(StrategyKind kind);
std::optional<StrategyKind> parse_strategy_kind(std::string_view name);

/// Whether the strategy restricts its proposals to valid configurations.
bool uses_constraint(StrategyKind kind);

struct RandomSearchOptions {
  /// Draw distinct valid configurations (test facility). Ignores any dataset.
  bool without_replacement = false;
};

struct RfSurrogateOptions {
  ForestOptions forest;
  /// Number of top predictions that are measured.
  std::size_t prediction_count = 10;
  /// Upper bound on the candidate pool; 0 predicts over every valid configuration.
  std::size_t candidate_cap = 0;
};

struct GeneticOptions {
  /// Fixed schedule; when unset the budget table is used.
  std::optional<int> population;
  std::optional<int> generations;
  double mutation_rate = 0.1;
  /// Crossover probability; without crossover a child copies one parent.
  double crossover_rate = 1.0;
};

struct BoGpOptions {
  double init_fraction = 0.08;
  std::size_t candidates = 1000;
  GpOptions gp;
};

struct BoTpeOptions {
  double gamma = kDefaultTpeGamma;
  double prior_weight = kDefaultTpePriorWeight;
  std::size_t candidates = 24;
  /// Random start-up evaluations; default min(20, ceil(S/4)).
  std::optional<std::size_t> startup;
};

struct ExhaustiveOptions {
  std::uint64_t max_configs = 1'000'000;
};

struct StrategyOptions {
  RandomSearchOptions random_search;
  RfSurrogateOptions rf;
  GeneticOptions genetic;
  BoGpOptions bo_gp;
  BoTpeOptions bo_tpe;
  ExhaustiveOptions exhaustive;
};

struct StrategySpec {
  StrategyKind kind = StrategyKind::random_search;
  /// Identifier used in stores and reports; defaults to the kind name.
  std::string id;
  StrategyOptions options;

  const std::string& name() const;
};

struct Trial {
  Configuration config;
  Measurement measurement;
};

struct ExperimentOutcome {
  Configuration best_config;
  double best_search_runtime = 0.0;
  FinalScore final_score;
  std::vector<Trial> history;
  std::size_t evaluations_used = 0;
  /// Iterations where the model could not be used and a random draw was taken.
  std::size_t model_fallbacks = 0;
};

/// Inputs shared by every strategy run.
struct ExperimentContext {
  const SearchSpace& space;
  const Objective& objective;
  std::size_t budget = 0;
  int final_repetitions = 10;
  /// Pre-measured valid samples assigned to this experiment. Random search
  /// and the RF surrogate consume them instead of measuring fresh draws.
  std::span<const Trial> presampled{};
};

/// Surrogate used by run_rf_surrogate; returns a predictor fitted on the
/// training observations.
using PredictorFactory = std::function<std::function<double(const Configuration&)>(
    std::span<const Observation>, Rng&)>;

ExperimentOutcome run_random_search(const ExperimentContext& ctx, const RandomSearchOptions& options,
                                    Rng& rng);

/// S - prediction_count training samples, then the top predictions are
/// measured. Throws BudgetError when S < prediction_count + 2.
ExperimentOutcome run_rf_surrogate(const ExperimentContext& ctx, const RfSurrogateOptions& options,
                                   Rng& rng);
ExperimentOutcome run_rf_surrogate(const ExperimentContext& ctx, const RfSurrogateOptions& options,
                                   Rng& rng, const PredictorFactory& surrogate);

/// Population and generation count for a budget.
std::pair<int, int> ga_schedule(std::size_t budget);

/// Offspring taking the genes where `from_a` is set from `a`, the rest from `b`.
Configuration crossover(const Configuration& a, const Configuration& b,
                        const std::array<bool, kDimensions>& from_a);

ExperimentOutcome run_genetic(const ExperimentContext& ctx, const GeneticOptions& options, Rng& rng);

/// Number of random initial evaluations: max(2, round(init_fraction * S)).
std::size_t bo_gp_initial_count(std::size_t budget, double init_fraction);

ExperimentOutcome run_bo_gp(const ExperimentContext& ctx, const BoGpOptions& options, Rng& rng);

std::size_t bo_tpe_startup_count(std::size_t budget, const BoTpeOptions& options);

ExperimentOutcome run_bo_tpe(const ExperimentContext& ctx, const BoTpeOptions& options, Rng& rng);

/// Measures every valid configuration once. `ctx.budget` is ignored.
ExperimentOutcome run_exhaustive(const ExperimentContext& ctx, const ExhaustiveOptions& options,
                                 Rng& rng);

/// Dispatches on `spec.kind`.
ExperimentOutcome run_strategy(const StrategySpec& spec, const ExperimentContext& ctx, Rng& rng);

/// Minimum budget accepted by a strategy.
std::size_t minimum_budget(StrategyKind kind, const StrategyOptions& options);

/// Evaluations a strategy will spend for budget S on `space`.
std::size_t planned_evaluations(const StrategySpec& spec, std::size_t budget,
                                const SearchSpace& space);

}  // namespace autotune
