#include "autotune/tournament.hpp"

#include <cmath>
#include <condition_variable>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <thread>

#include "autotune/errors.hpp"
#include "autotune/plan.hpp"
#include "autotune/store.hpp"

namespace autotune {

namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char ch : text) {
    h ^= static_cast<unsigned char>(ch);
    h *= 0x100000001b3ULL;
  }
  return h;
}

bool valid_id(std::string_view id) {
  if (id.empty()) return false;
  for (char ch : id) {
    const bool ok = (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') ||
                    (ch >= '0' && ch <= '9') || ch == '-' || ch == '_' || ch == '.';
    if (!ok) return false;
  }
  return true;
}

bool consumes_dataset(const StrategySpec& s) {
  return (s.kind == StrategyKind::random_search && !s.options.random_search.without_replacement) ||
         s.kind == StrategyKind::rf_surrogate;
}

struct Task {
  std::size_t benchmark;
  std::size_t strategy;
  std::size_t size_index;
  std::size_t experiment;
};

std::vector<Task> schedule(const TournamentPlan& plan) {
  std::vector<Task> tasks;
  tasks.reserve(plan.total_experiments());
  for (std::size_t b = 0; b < plan.benchmarks.size(); ++b) {
    for (std::size_t s = 0; s < plan.strategies.size(); ++s) {
      for (std::size_t k = 0; k < plan.sample_sizes.size(); ++k) {
        for (std::size_t e = 0; e < plan.experiments_per_size[k]; ++e) tasks.push_back({b, s, k, e});
      }
    }
  }
  return tasks;
}

std::size_t dataset_length(const TournamentPlan& plan, std::size_t size_index) {
  const auto need = [&](std::size_t k) { return plan.sample_sizes[k] * plan.experiments_per_size[k]; };
  std::size_t n = plan.dataset.size;
  if (plan.dataset.per_size) return std::max(n, need(size_index));
  for (std::size_t k = 0; k < plan.sample_sizes.size(); ++k) n = std::max(n, need(k));
  return n;
}

void write_file_atomically(const fs::path& path, const std::string& content) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    if (!out.flush()) throw std::runtime_error("cannot write " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::vector<Trial> load_or_generate_dataset(const TournamentPlan& plan, const BenchmarkSpec& bench,
                                            const Objective& objective, const fs::path& store_dir,
                                            std::size_t size_index) {
  const std::size_t n = dataset_length(plan, size_index);
  const std::size_t sample_size = plan.sample_sizes[size_index];
  const fs::path path = dataset_path(store_dir, bench.id, sample_size, plan.dataset.per_size);
  if (fs::exists(path)) {
    const auto lines = read_record_lines(path);
    if (lines.size() == n) {
      std::vector<Trial> data;
      data.reserve(n);
      for (const auto& line : lines) data.push_back(parse_dataset_row(line));
      return data;
    }
  }
  Rng rng(dataset_seed(plan.master_seed, bench.id, plan.dataset.per_size ? sample_size : 0));
  std::vector<Trial> data = pregenerate_dataset(plan.space, objective, n, rng);
  std::string content(kDatasetHeader);
  content += '\n';
  for (std::size_t i = 0; i < data.size(); ++i) content += format_dataset_row(i, data[i]) + '\n';
  fs::create_directories(path.parent_path());
  write_file_atomically(path, content);
  return data;
}

// Truncates `path` after the header and `lines` complete records. Returns false
// when the file holds fewer records.
bool truncate_records(const fs::path& path, std::size_t lines) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::size_t offset = 0;
  std::size_t seen = 0;
  std::string line;
  const std::size_t wanted = lines + 1;  // header
  while (seen < wanted && std::getline(in, line)) {
    if (in.eof()) break;  // no trailing newline: partial
    offset += line.size() + 1;
    ++seen;
  }
  in.close();
  if (seen < wanted) return false;
  fs::resize_file(path, offset);
  return true;
}

struct ExperimentLines {
  std::string trials;
  std::string outcome;
};

}  // namespace

void TournamentPlan::validate() const {
  if (benchmarks.empty()) throw PlanError("plan: at least one benchmark is required", 0, "benchmarks");
  if (strategies.empty()) throw PlanError("plan: at least one strategy is required", 0, "strategies");
  if (sample_sizes.empty()) throw PlanError("plan: sample_sizes must not be empty", 0, "sample_sizes");
  if (sample_sizes.size() != experiments_per_size.size()) {
    throw PlanError("plan: sample_sizes and experiments must have equal length", 0, "experiments");
  }
  for (std::size_t k = 0; k < sample_sizes.size(); ++k) {
    if (sample_sizes[k] < 1) throw PlanError("plan: sample sizes must be >= 1", 0, "sample_sizes");
    if (experiments_per_size[k] < 1) throw PlanError("plan: experiment counts must be >= 1", 0, "experiments");
  }
  if (std::set(sample_sizes.begin(), sample_sizes.end()).size() != sample_sizes.size()) {
    throw PlanError("plan: duplicate sample size", 0, "sample_sizes");
  }
  if (final_repetitions < 1) throw PlanError("plan: final_repetitions must be >= 1", 0, "final_repetitions");
  if (dataset.size < 1) throw PlanError("plan: dataset.size must be >= 1", 0, "dataset.size");
  if (!(alpha > 0.0 && alpha < 1.0)) throw PlanError("plan: alpha must lie in (0, 1)", 0, "report.alpha");
  if (!(confidence_level > 0.0 && confidence_level < 1.0)) {
    throw PlanError("plan: confidence must lie in (0, 1)", 0, "report.confidence");
  }

  std::set<std::string> ids;
  for (const auto& b : benchmarks) {
    if (!valid_id(b.id)) throw PlanError("plan: invalid benchmark id '" + b.id + "'", 0, "benchmarks.id");
    if (!ids.insert(b.id).second) throw PlanError("plan: duplicate benchmark id '" + b.id + "'", 0, "benchmarks.id");
    const auto& o = b.objective;
    if (o.kind == ObjectiveKind::custom) {
      throw PlanError("plan: benchmark kind 'custom' cannot be declared in a plan", 0, "benchmarks.kind");
    }
    if (o.noise_sigma < 0.0) throw PlanError("plan: noise_sigma must be >= 0", 0, "benchmarks.noise_sigma");
    if (!(o.penalty > 0.0)) throw PlanError("plan: penalty must be positive", 0, "benchmarks.penalty");
    if (o.kind == ObjectiveKind::external) {
      for (auto name : kDimensionNames) {
        if (o.external_command.find("{" + std::string(name) + "}") == std::string::npos) {
          throw PlanError("plan: external command of '" + b.id + "' lacks placeholder {" +
                              std::string(name) + "}",
                          0, "benchmarks.command");
        }
      }
      if (o.timeout.count() <= 0) throw PlanError("plan: timeout must be positive", 0, "benchmarks.timeout_s");
    }
  }

  ids.clear();
  for (const auto& s : strategies) {
    const std::string& id = s.name();
    if (!valid_id(id)) throw PlanError("plan: invalid strategy id '" + id + "'", 0, "strategies.id");
    if (!ids.insert(id).second) throw PlanError("plan: duplicate strategy id '" + id + "'", 0, "strategies.id");
    const std::size_t minimum = minimum_budget(s.kind, s.options);
    for (std::size_t size : sample_sizes) {
      if (s.kind != StrategyKind::exhaustive && size < minimum) {
        throw PlanError("plan: strategy '" + id + "' needs a sample size of at least " +
                            std::to_string(minimum) + ", got " + std::to_string(size),
                        0, "sample_sizes");
      }
    }
    const auto& g = s.options.genetic;
    if (s.kind == StrategyKind::genetic && (g.population || g.generations)) {
      if (!g.population || !g.generations) {
        throw PlanError("plan: ga.population and ga.generations must be set together", 0, "ga.population");
      }
      if (*g.population < 2 || *g.generations < 1) {
        throw PlanError("plan: ga.population must be >= 2 and ga.generations >= 1", 0, "ga.population");
      }
      for (std::size_t size : sample_sizes) {
        if (static_cast<std::size_t>(*g.population) * static_cast<std::size_t>(*g.generations) > size) {
          throw PlanError("plan: ga.population * ga.generations exceeds sample size " +
                              std::to_string(size),
                          0, "ga.population");
        }
      }
    }
    if (s.kind == StrategyKind::exhaustive && space.count_valid() > s.options.exhaustive.max_configs) {
      throw PlanError("plan: exhaustive strategy '" + id + "' exceeds its size guard", 0,
                      "exhaustive.max_configs");
    }
    if (s.kind == StrategyKind::random_search && s.options.random_search.without_replacement) {
      for (std::size_t size : sample_sizes) {
        if (size > space.count_valid()) {
          throw PlanError("plan: without-replacement random search needs sample sizes <= valid set",
                          0, "rs.without_replacement");
        }
      }
    }
  }
}

std::size_t TournamentPlan::total_experiments() const {
  std::size_t per_pair = 0;
  for (std::size_t e : experiments_per_size) per_pair += e;
  return per_pair * benchmarks.size() * strategies.size();
}

std::size_t default_experiments(std::size_t sample_size) {
  static const std::map<std::size_t, std::size_t> table{
      {25, 800}, {50, 400}, {100, 200}, {200, 100}, {400, 50}};
  if (const auto it = table.find(sample_size); it != table.end()) return it->second;
  if (sample_size == 0) throw DomainError("default_experiments: sample size must be >= 1");
  return std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround(20000.0 / static_cast<double>(sample_size))));
}

std::vector<Trial> pregenerate_dataset(const SearchSpace& space, const Objective& objective,
                                       std::size_t n, Rng& rng) {
  if (n < 1) throw DomainError("pregenerate_dataset: n must be >= 1");
  std::vector<Trial> data;
  data.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Configuration c = space.sample_uniform(rng, true);
    data.push_back({c, objective.evaluate_once(c, rng)});
  }
  return data;
}

std::span<const Trial> subdivide(std::span<const Trial> dataset, std::size_t sample_size,
                                 std::size_t experiment_index) {
  if ((experiment_index + 1) * sample_size > dataset.size()) {
    throw CapacityError("subdivide: experiment " + std::to_string(experiment_index) +
                        " at sample size " + std::to_string(sample_size) + " overruns a dataset of " +
                        std::to_string(dataset.size()));
  }
  return dataset.subspan(experiment_index * sample_size, sample_size);
}

std::uint64_t derive_seed(std::uint64_t master_seed, std::string_view benchmark,
                          std::string_view strategy, std::size_t sample_size,
                          std::size_t experiment_index) {
  std::uint64_t h = splitmix64(master_seed);
  h = splitmix64(h ^ fnv1a(benchmark));
  h = splitmix64(h ^ fnv1a(strategy));
  h = splitmix64(h ^ static_cast<std::uint64_t>(sample_size));
  return splitmix64(h ^ static_cast<std::uint64_t>(experiment_index));
}

std::uint64_t dataset_seed(std::uint64_t master_seed, std::string_view benchmark,
                           std::size_t sample_size) {
  return derive_seed(master_seed, benchmark, "#dataset", sample_size, 0);
}

Objective make_objective(const BenchmarkSpec& benchmark, const SearchSpace& space) {
  return Objective(benchmark.objective, space.constraint_limit());
}

RunSummary run_tournament(const TournamentPlan& plan, const fs::path& store_dir,
                          const RunOptions& options) {
  plan.validate();
  const auto started = std::chrono::steady_clock::now();
  const std::vector<Task> tasks = schedule(plan);

  fs::create_directories(store_dir);
  const fs::path plan_path = store_dir / kPlanFileName;
  const fs::path trials_path = store_dir / kTrialsFileName;
  const fs::path outcomes_path = store_dir / kOutcomesFileName;
  // The store location is not part of the stored plan.
  TournamentPlan stored = plan;
  stored.output_directory.clear();
  const std::string resolved = dump_plan(stored);

  std::size_t complete = 0;
  if (fs::exists(outcomes_path) || fs::exists(plan_path)) {
    if (!options.resume) {
      throw std::runtime_error("store " + store_dir.string() +
                               " already holds results; resume it or choose another directory");
    }
    std::ifstream in(plan_path, std::ios::binary);
    const std::string existing((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (existing != resolved) {
      throw std::runtime_error("store " + store_dir.string() + " was created from a different plan");
    }
  } else {
    write_file_atomically(plan_path, resolved);
  }

  if (fs::exists(outcomes_path)) {
    const auto outcomes = read_outcomes(store_dir);
    if (outcomes.size() > tasks.size()) throw std::runtime_error("store holds more experiments than the plan");
    std::size_t trial_lines = 0;
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
      const Task& t = tasks[i];
      const auto& o = outcomes[i];
      if (o.benchmark != plan.benchmarks[t.benchmark].id ||
          o.strategy != plan.strategies[t.strategy].name() ||
          o.sample_size != plan.sample_sizes[t.size_index] || o.experiment_index != t.experiment) {
        throw std::runtime_error("store outcome " + std::to_string(i) + " does not match the plan order");
      }
      trial_lines += o.evaluations_used + o.final_repetitions;
    }
    complete = outcomes.size();
    if (!truncate_records(outcomes_path, complete) ||
        (fs::exists(trials_path) && !truncate_records(trials_path, trial_lines))) {
      throw std::runtime_error("store " + store_dir.string() + " is inconsistent and cannot be resumed");
    }
    if (!fs::exists(trials_path)) throw std::runtime_error("store is missing " + trials_path.string());
  } else {
    write_file_atomically(outcomes_path, std::string(kOutcomesHeader) + '\n');
    write_file_atomically(trials_path, std::string(kTrialsHeader) + '\n');
  }

  RunSummary summary;
  summary.total_experiments = tasks.size();
  summary.already_complete = complete;

  std::size_t end = tasks.size();
  if (options.max_experiments > 0) end = std::min(end, complete + options.max_experiments);
  if (complete >= end) {
    summary.finished = complete == tasks.size();
    return summary;
  }

  std::vector<Objective> objectives;
  objectives.reserve(plan.benchmarks.size());
  for (const auto& b : plan.benchmarks) objectives.push_back(make_objective(b, plan.space));

  // datasets[b][k]; shared across sizes unless per_size.
  std::vector<std::vector<std::shared_ptr<const std::vector<Trial>>>> datasets(plan.benchmarks.size());
  const bool any_dataset_user = std::any_of(plan.strategies.begin(), plan.strategies.end(), consumes_dataset);
  if (plan.dataset.enabled && any_dataset_user) {
    for (std::size_t b = 0; b < plan.benchmarks.size(); ++b) {
      datasets[b].resize(plan.sample_sizes.size());
      for (std::size_t k = 0; k < plan.sample_sizes.size(); ++k) {
        if (!plan.dataset.per_size && k > 0) {
          datasets[b][k] = datasets[b][0];
          continue;
        }
        datasets[b][k] = std::make_shared<const std::vector<Trial>>(
            load_or_generate_dataset(plan, plan.benchmarks[b], objectives[b], store_dir, k));
      }
    }
  }

  const auto run_one = [&](std::size_t index) {
    const Task& t = tasks[index];
    const auto& bench = plan.benchmarks[t.benchmark];
    const auto& strategy = plan.strategies[t.strategy];
    const std::size_t size = plan.sample_sizes[t.size_index];
    Rng rng(derive_seed(plan.master_seed, bench.id, strategy.name(), size, t.experiment));
    std::span<const Trial> presampled;
    if (!datasets[t.benchmark].empty() && consumes_dataset(strategy)) {
      presampled = subdivide(*datasets[t.benchmark][t.size_index], size, t.experiment);
    }
    const ExperimentContext ctx{plan.space, objectives[t.benchmark], size, plan.final_repetitions,
                                presampled};
    const ExperimentOutcome outcome = run_strategy(strategy, ctx, rng);
    ExperimentLines lines;
    for (const auto& r : trial_records(outcome, bench.id, strategy.name(), size, t.experiment)) {
      lines.trials += format_trial(r);
      lines.trials += '\n';
    }
    lines.outcome = format_outcome(outcome_record(outcome, bench.id, strategy.name(), size, t.experiment));
    lines.outcome += '\n';
    return lines;
  };

  std::ofstream trials_out(trials_path, std::ios::binary | std::ios::app);
  std::ofstream outcomes_out(outcomes_path, std::ios::binary | std::ios::app);
  if (!trials_out || !outcomes_out) throw std::runtime_error("cannot open store files for append");

  std::size_t committed = complete;
  const auto commit = [&](const ExperimentLines& lines) {
    trials_out << lines.trials;
    trials_out.flush();
    outcomes_out << lines.outcome;
    outcomes_out.flush();
    if (!trials_out || !outcomes_out) throw std::runtime_error("write to store failed");
    ++committed;
    ++summary.executed;
    if (options.on_progress) {
      options.on_progress({committed, tasks.size(), std::chrono::steady_clock::now() - started,
                           summary.executed});
    }
  };
  const auto stop_requested = [&] {
    return options.stop && options.stop->load(std::memory_order_relaxed);
  };

  const unsigned workers = std::max(1u, options.parallelism);
  if (workers == 1) {
    for (std::size_t i = complete; i < end && !stop_requested(); ++i) commit(run_one(i));
  } else {
    std::mutex mutex;
    std::condition_variable ready;
    std::map<std::size_t, ExperimentLines> finished;
    std::exception_ptr failure;
    std::size_t next = complete;
    bool halt = false;

    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (;;) {
          std::size_t index = 0;
          {
            std::lock_guard lock(mutex);
            if (halt || next >= end || stop_requested()) return;
            index = next++;
          }
          try {
            ExperimentLines lines = run_one(index);
            std::lock_guard lock(mutex);
            finished.emplace(index, std::move(lines));
          } catch (...) {
            std::lock_guard lock(mutex);
            if (!failure) failure = std::current_exception();
            halt = true;
          }
          ready.notify_all();
        }
      });
    }

    std::size_t expected = complete;
    for (;;) {
      std::unique_lock lock(mutex);
      ready.wait_for(lock, std::chrono::milliseconds(200), [&] {
        return finished.count(expected) > 0 || failure || (next == expected && (next >= end || stop_requested()));
      });
      if (auto it = finished.find(expected); it != finished.end()) {
        ExperimentLines lines = std::move(it->second);
        finished.erase(it);
        lock.unlock();
        try {
          commit(lines);
        } catch (...) {
          std::lock_guard relock(mutex);
          halt = true;
          failure = std::current_exception();
          break;
        }
        ++expected;
        continue;
      }
      if (failure) break;
      if (next == expected && (next >= end || stop_requested())) break;
    }
    {
      std::lock_guard lock(mutex);
      halt = true;
    }
    pool.clear();
    if (failure) std::rethrow_exception(failure);
  }

  summary.finished = committed == tasks.size();
  return summary;
}

}  // namespace autotune
