#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "autotune/objective.hpp"
#include "autotune/space.hpp"
#include "autotune/strategies.hpp"

namespace autotune {

struct BenchmarkSpec {
  std::string id;
  ObjectiveSpec objective;
};

struct DatasetOptions {
  /// Random search and the RF surrogate draw from a pre-measured dataset.
  bool enabled = true;
  std::size_t size = 20000;
  /// One dataset per (benchmark, sample size) instead of one per benchmark.
  bool per_size = false;
};

struct TournamentPlan {
  SearchSpace space;
  std::vector<BenchmarkSpec> benchmarks;
  std::vector<StrategySpec> strategies;
  std::vector<std::size_t> sample_sizes{25, 50, 100, 200, 400};
  std::vector<std::size_t> experiments_per_size{800, 400, 200, 100, 50};
  int final_repetitions = 10;
  std::uint64_t master_seed = 0;
  DatasetOptions dataset;
  double alpha = 0.01;
  double confidence_level = 0.95;
  std::string output_directory;

  /// Throws PlanError on inconsistent counts, duplicate ids, or budgets a
  /// strategy cannot run with.
  void validate() const;

  std::size_t total_experiments() const;
};

/// Experiment count for a sample size: the fixed schedule for 25..400,
/// otherwise round(20000 / S).
std::size_t default_experiments(std::size_t sample_size);

/// `n` constrained-uniform configurations, each measured once, in draw order.
std::vector<Trial> pregenerate_dataset(const SearchSpace& space, const Objective& objective,
                                       std::size_t n, Rng& rng);

/// Records [i*S, (i+1)*S). Throws CapacityError on overrun.
std::span<const Trial> subdivide(std::span<const Trial> dataset, std::size_t sample_size,
                                 std::size_t experiment_index);

/// Stable seed for one experiment, derived from the content of the tuple.
std::uint64_t derive_seed(std::uint64_t master_seed, std::string_view benchmark,
                          std::string_view strategy, std::size_t sample_size,
                          std::size_t experiment_index);

/// Seed of a benchmark's pre-generated dataset.
std::uint64_t dataset_seed(std::uint64_t master_seed, std::string_view benchmark,
                           std::size_t sample_size);

struct Progress {
  std::size_t completed = 0;
  std::size_t total = 0;
  std::chrono::steady_clock::duration elapsed{};
  /// Experiments executed by this invocation (excludes resumed ones).
  std::size_t executed = 0;
};

struct RunOptions {
  unsigned parallelism = 1;
  bool resume = false;
  /// Stop after this many newly executed experiments; 0 means no limit.
  std::size_t max_experiments = 0;
  /// Checked between experiments; when set, in-flight work is committed and
  /// the run returns early.
  const std::atomic<bool>* stop = nullptr;
  std::function<void(const Progress&)> on_progress;
};

struct RunSummary {
  std::size_t total_experiments = 0;
  std::size_t already_complete = 0;
  std::size_t executed = 0;
  bool finished = false;
};

/// Runs every (benchmark, strategy, sample size) cell of `plan` into
/// `store_dir`. Stores are append-only and committed in plan order, one
/// experiment at a time, so the bytes do not depend on `parallelism`.
/// With `resume`, the store is truncated to its last complete experiment and
/// the run continues from there; without it, an existing store is an error.
RunSummary run_tournament(const TournamentPlan& plan, const std::filesystem::path& store_dir,
                          const RunOptions& options = {});

/// Builds the objective for a benchmark.
Objective make_objective(const BenchmarkSpec& benchmark, const SearchSpace& space);

}  // namespace autotune
