#include "autotune/store.hpp"

#include <charconv>
#include <fstream>
#include <stdexcept>

namespace autotune {

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(',', start);
    fields.push_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return fields;
}

std::size_t parse_count(std::string_view text) {
  std::size_t value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw std::runtime_error("store: bad integer field '" + std::string(text) + "'");
  }
  return value;
}

int parse_int(std::string_view text) {
  int value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw std::runtime_error("store: bad integer field '" + std::string(text) + "'");
  }
  return value;
}

bool parse_flag(std::string_view text) {
  if (text == "1") return true;
  if (text == "0") return false;
  throw std::runtime_error("store: bad flag field '" + std::string(text) + "'");
}

void require_fields(const std::vector<std::string_view>& fields, std::size_t n, std::string_view what) {
  if (fields.size() != n) {
    throw std::runtime_error("store: " + std::string(what) + " line has " +
                             std::to_string(fields.size()) + " fields, expected " + std::to_string(n));
  }
}

void append_config(std::string& out, const Configuration& c) {
  for (std::size_t d = 0; d < kDimensions; ++d) {
    out += ',';
    out += std::to_string(c[d]);
  }
}

Configuration parse_config(const std::vector<std::string_view>& fields, std::size_t first) {
  Configuration c;
  for (std::size_t d = 0; d < kDimensions; ++d) c[d] = parse_int(fields[first + d]);
  return c;
}

}  // namespace

std::string format_double(double value) {
  char buffer[64];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
  if (ec != std::errc()) throw std::runtime_error("format_double: conversion failed");
  return std::string(buffer, ptr);
}

double parse_double(std::string_view text) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw std::runtime_error("store: bad number field '" + std::string(text) + "'");
  }
  return value;
}

std::string format_trial(const TrialRecord& r) {
  std::string out = r.benchmark + ',' + r.strategy + ',' + std::to_string(r.sample_size) + ',' +
                    std::to_string(r.experiment_index) + ',' + std::to_string(r.evaluation_index);
  append_config(out, r.config);
  out += ',' + format_double(r.runtime_ms) + ',' + (r.penalized ? "1" : "0") + ',' +
         (r.phase == TrialPhase::search ? "search" : "final");
  return out;
}

TrialRecord parse_trial(std::string_view line) {
  const auto f = split_fields(line);
  require_fields(f, 14, "trial");
  TrialRecord r;
  r.benchmark = f[0];
  r.strategy = f[1];
  r.sample_size = parse_count(f[2]);
  r.experiment_index = parse_count(f[3]);
  r.evaluation_index = parse_count(f[4]);
  r.config = parse_config(f, 5);
  r.runtime_ms = parse_double(f[11]);
  r.penalized = parse_flag(f[12]);
  if (f[13] == "search") {
    r.phase = TrialPhase::search;
  } else if (f[13] == "final") {
    r.phase = TrialPhase::final;
  } else {
    throw std::runtime_error("store: bad phase '" + std::string(f[13]) + "'");
  }
  return r;
}

std::string format_outcome(const OutcomeRecord& r) {
  std::string out = r.benchmark + ',' + r.strategy + ',' + std::to_string(r.sample_size) + ',' +
                    std::to_string(r.experiment_index) + ',' + std::to_string(r.evaluations_used);
  append_config(out, r.best_config);
  out += ',' + format_double(r.best_search_runtime) + ',' + format_double(r.final_mean) + ',' +
         std::to_string(r.final_repetitions) + ',' + std::to_string(r.model_fallbacks);
  return out;
}

OutcomeRecord parse_outcome(std::string_view line) {
  const auto f = split_fields(line);
  require_fields(f, 15, "outcome");
  OutcomeRecord r;
  r.benchmark = f[0];
  r.strategy = f[1];
  r.sample_size = parse_count(f[2]);
  r.experiment_index = parse_count(f[3]);
  r.evaluations_used = parse_count(f[4]);
  r.best_config = parse_config(f, 5);
  r.best_search_runtime = parse_double(f[11]);
  r.final_mean = parse_double(f[12]);
  r.final_repetitions = parse_count(f[13]);
  r.model_fallbacks = parse_count(f[14]);
  return r;
}

std::string format_dataset_row(std::size_t index, const Trial& trial) {
  std::string out = std::to_string(index);
  append_config(out, trial.config);
  out += ',' + format_double(trial.measurement.runtime_ms) + ',' +
         (trial.measurement.penalized ? "1" : "0");
  return out;
}

Trial parse_dataset_row(std::string_view line) {
  const auto f = split_fields(line);
  require_fields(f, 9, "dataset");
  return {parse_config(f, 1), {parse_double(f[7]), parse_flag(f[8])}};
}

std::vector<TrialRecord> trial_records(const ExperimentOutcome& outcome, std::string_view benchmark,
                                       std::string_view strategy, std::size_t sample_size,
                                       std::size_t experiment_index) {
  std::vector<TrialRecord> out;
  out.reserve(outcome.history.size() + outcome.final_score.samples.size());
  std::size_t evaluation = 0;
  for (const auto& t : outcome.history) {
    out.push_back({std::string(benchmark), std::string(strategy), sample_size, experiment_index,
                   evaluation++, t.config, t.measurement.runtime_ms, t.measurement.penalized,
                   TrialPhase::search});
  }
  // Final repetitions inherit the penalty flag of the search measurement that
  // selected the configuration.
  bool best_penalized = false;
  for (const auto& t : outcome.history) {
    if (t.config == outcome.best_config &&
        t.measurement.runtime_ms == outcome.best_search_runtime) {
      best_penalized = t.measurement.penalized;
      break;
    }
  }
  for (double runtime : outcome.final_score.samples) {
    out.push_back({std::string(benchmark), std::string(strategy), sample_size, experiment_index,
                   evaluation++, outcome.best_config, runtime, best_penalized, TrialPhase::final});
  }
  return out;
}

OutcomeRecord outcome_record(const ExperimentOutcome& outcome, std::string_view benchmark,
                             std::string_view strategy, std::size_t sample_size,
                             std::size_t experiment_index) {
  return {std::string(benchmark), std::string(strategy), sample_size, experiment_index,
          outcome.evaluations_used, outcome.best_config, outcome.best_search_runtime,
          outcome.final_score.mean_runtime, outcome.final_score.repetitions(),
          outcome.model_fallbacks};
}

std::vector<std::string> read_record_lines(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("store: cannot open " + path.string());
  const std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  std::vector<std::string> lines;
  std::size_t start = 0;
  bool header = true;
  while (start < content.size()) {
    const auto pos = content.find('\n', start);
    if (pos == std::string::npos) break;  // partial trailing line
    if (!header) lines.emplace_back(content, start, pos - start);
    header = false;
    start = pos + 1;
  }
  return lines;
}

std::vector<OutcomeRecord> read_outcomes(const std::filesystem::path& store_dir) {
  std::vector<OutcomeRecord> out;
  for (const auto& line : read_record_lines(store_dir / kOutcomesFileName)) {
    out.push_back(parse_outcome(line));
  }
  return out;
}

std::vector<TrialRecord> read_trials(const std::filesystem::path& store_dir) {
  std::vector<TrialRecord> out;
  for (const auto& line : read_record_lines(store_dir / kTrialsFileName)) {
    out.push_back(parse_trial(line));
  }
  return out;
}

std::filesystem::path dataset_path(const std::filesystem::path& store_dir,
                                   std::string_view benchmark, std::size_t sample_size,
                                   bool per_size) {
  std::string name(benchmark);
  if (per_size) name += "_S" + std::to_string(sample_size);
  return store_dir / kDatasetDirName / (name + ".csv");
}

}  // namespace autotune
