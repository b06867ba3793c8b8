#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "autotune/space.hpp"
#include "autotune/strategies.hpp"

namespace autotune {

inline constexpr std::string_view kPlanFileName = "plan.yaml";
inline constexpr std::string_view kTrialsFileName = "trials.csv";
inline constexpr std::string_view kOutcomesFileName = "outcomes.csv";
inline constexpr std::string_view kDatasetDirName = "datasets";

inline constexpr std::string_view kTrialsHeader =
    "benchmark,strategy,size,experiment,evaluation,xt,yt,zt,xw,yw,zw,runtime_ms,penalized,phase";
inline constexpr std::string_view kOutcomesHeader =
    "benchmark,strategy,size,experiment,evaluations_used,xt,yt,zt,xw,yw,zw,"
    "best_search_runtime_ms,final_mean_ms,final_repetitions,model_fallbacks";
inline constexpr std::string_view kDatasetHeader = "index,xt,yt,zt,xw,yw,zw,runtime_ms,penalized";

enum class TrialPhase { search, final };

/// One measurement persisted in the raw store.
struct TrialRecord {
  std::string benchmark;
  std::string strategy;
  std::size_t sample_size = 0;
  std::size_t experiment_index = 0;
  /// Search evaluations are numbered from 0; final repetitions continue the
  /// numbering after the last search evaluation.
  std::size_t evaluation_index = 0;
  Configuration config;
  double runtime_ms = 0.0;
  bool penalized = false;
  TrialPhase phase = TrialPhase::search;
};

/// One experiment summary persisted in the outcome store.
struct OutcomeRecord {
  std::string benchmark;
  std::string strategy;
  std::size_t sample_size = 0;
  std::size_t experiment_index = 0;
  std::size_t evaluations_used = 0;
  Configuration best_config;
  double best_search_runtime = 0.0;
  double final_mean = 0.0;
  std::size_t final_repetitions = 0;
  std::size_t model_fallbacks = 0;
};

/// Shortest decimal text that parses back to exactly `value`.
std::string format_double(double value);
double parse_double(std::string_view text);

std::string format_trial(const TrialRecord& record);
TrialRecord parse_trial(std::string_view line);

std::string format_outcome(const OutcomeRecord& record);
OutcomeRecord parse_outcome(std::string_view line);

std::string format_dataset_row(std::size_t index, const Trial& trial);
Trial parse_dataset_row(std::string_view line);

/// Converts one experiment into its persisted lines.
std::vector<TrialRecord> trial_records(const ExperimentOutcome& outcome, std::string_view benchmark,
                                       std::string_view strategy, std::size_t sample_size,
                                       std::size_t experiment_index);
OutcomeRecord outcome_record(const ExperimentOutcome& outcome, std::string_view benchmark,
                             std::string_view strategy, std::size_t sample_size,
                             std::size_t experiment_index);

/// Complete lines of a line-delimited file, header excluded. A trailing
/// partial line is ignored.
std::vector<std::string> read_record_lines(const std::filesystem::path& path);

std::vector<OutcomeRecord> read_outcomes(const std::filesystem::path& store_dir);
std::vector<TrialRecord> read_trials(const std::filesystem::path& store_dir);

std::filesystem::path dataset_path(const std::filesystem::path& store_dir,
                                   std::string_view benchmark, std::size_t sample_size,
                                   bool per_size);

}  // namespace autotune
