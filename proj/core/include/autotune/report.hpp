#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "autotune/store.hpp"
#include "autotune/tournament.hpp"

namespace autotune {

enum class OptimumPolicy {
  /// Brute-force noiseless optimum for noiseless synthetic benchmarks,
  /// otherwise the best final score of the whole study.
  automatic,
  /// Always the best final score of the whole study.
  study,
};

using Matrix = std::vector<std::vector<double>>;

/// Statistics of one (benchmark, sample size) cell. Per-strategy vectors are
/// indexed like `strategies`.
struct CellReport {
  std::string benchmark;
  std::size_t sample_size = 0;
  std::vector<std::string> strategies;
  /// Final mean runtime of every experiment, per strategy.
  std::vector<std::vector<double>> final_runtimes;
  std::vector<double> median_runtime;
  std::vector<double> percent_of_optimum;
  /// Empty when the plan has no random-search strategy.
  std::vector<double> median_speedup_vs_rs;
  std::vector<double> cles_vs_rs;
  /// [i][j]: one-sided MWU p-value that strategy i is faster than strategy j.
  Matrix p_values;
  /// [i][j]: probability that a result of strategy i beats one of strategy j.
  Matrix cles;
  /// [i][j]: i significantly faster than j.
  std::vector<std::vector<bool>> significant;
};

struct AggregateEntry {
  std::size_t sample_size = 0;
  std::string strategy;
  double mean_percent = 0.0;
  /// Equal to the mean when fewer than two benchmarks contribute.
  double ci_low = 0.0;
  double ci_high = 0.0;
};

struct BenchmarkOptimum {
  std::string benchmark;
  double runtime = 0.0;
  /// "brute-force" or "study".
  std::string source;
};

struct ComparisonReport {
  std::vector<std::string> benchmarks;
  std::vector<std::string> strategies;
  std::vector<std::size_t> sample_sizes;
  std::vector<BenchmarkOptimum> optima;
  std::vector<CellReport> cells;
  std::vector<AggregateEntry> aggregate;
  double alpha = 0.01;
  double confidence_level = 0.95;
  std::optional<std::size_t> rs_index;

  const CellReport& cell(const std::string& benchmark, std::size_t sample_size) const;
};

/// Lists (benchmark, strategy, size) cells with fewer outcomes than planned.
std::vector<std::string> missing_cells(const TournamentPlan& plan,
                                       const std::vector<OutcomeRecord>& outcomes);

/// Aggregates outcome records. Throws IncompleteStoreError listing missing cells.
ComparisonReport build_report(const TournamentPlan& plan, const std::vector<OutcomeRecord>& outcomes,
                              OptimumPolicy policy = OptimumPolicy::automatic);

/// Loads the resolved plan and outcomes of a store directory.
ComparisonReport build_report(const std::filesystem::path& store_dir,
                              OptimumPolicy policy = OptimumPolicy::automatic);

/// Relative median gap that a significant difference must exceed.
inline constexpr double kMinimumRelativeGap = 0.01;

/// `a` is significantly faster than `b`: one-sided MWU p < alpha and the
/// median of `a` is more than 1% below the median of `b`.
bool significantly_faster(std::span<const double> a, std::span<const double> b, double alpha);

/// Recomputes every significance flag of `report` at `alpha`.
void significance_flags(ComparisonReport& report, double alpha);

enum class ReportFormat { csv, json, svg };

/// Writes report files into `out_dir` and returns their paths.
std::vector<std::filesystem::path> emit(const ComparisonReport& report, ReportFormat format,
                                        const std::filesystem::path& out_dir);

std::string report_to_json(const ComparisonReport& report);

/// Matrix with strategies as rows and sample sizes as columns.
struct NamedMatrix {
  std::string name;
  std::string benchmark;
  std::vector<std::string> rows;
  std::vector<std::size_t> columns;
  Matrix values;
};

/// The three figure families (percent of optimum, speedup and CLES over random
/// search) for each benchmark.
std::vector<NamedMatrix> figure_matrices(const ComparisonReport& report);

std::string matrix_to_csv(const NamedMatrix& matrix);
NamedMatrix matrix_from_csv(const std::string& text);

/// Self-contained SVG heatmap with one labelled rect per cell.
std::string heatmap_svg(const NamedMatrix& matrix);

}  // namespace autotune
