#include "cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <optional>

#include "autotune/errors.hpp"
#include "autotune/plan.hpp"
#include "autotune/report.hpp"
#include "autotune/store.hpp"
#include "autotune/tournament.hpp"

namespace autotune::cli {

namespace fs = std::filesystem;

namespace {

std::string seconds_text(double s) {
  char buf[32];
  if (s >= 3600.0) {
    std::snprintf(buf, sizeof buf, "%dh%02dm", static_cast<int>(s / 3600.0), static_cast<int>(s / 60.0) % 60);
  } else if (s >= 60.0) {
    std::snprintf(buf, sizeof buf, "%dm%02ds", static_cast<int>(s / 60.0), static_cast<int>(s) % 60);
  } else {
    std::snprintf(buf, sizeof buf, "%.0fs", s);
  }
  return buf;
}

fs::path run_directory(const std::string& flag, const TournamentPlan& plan) {
  if (!flag.empty()) return flag;
  if (!plan.output_directory.empty()) return plan.output_directory;
  if (const char* env = std::getenv(kOutputDirEnv); env && *env) return env;
  return "autotune-results";
}

int cmd_run(const std::string& plan_path, unsigned jobs, bool resume, const std::string& out_flag,
            std::size_t stop_after, bool quiet, std::ostream& out, std::ostream& err,
            const std::atomic<bool>* stop) {
  const auto plan = load_plan(plan_path);
  const fs::path dir = run_directory(out_flag, plan);

  RunOptions options;
  options.parallelism = jobs == 0 ? 1 : jobs;
  options.resume = resume;
  options.max_experiments = stop_after;
  options.stop = stop;
  auto last = std::chrono::steady_clock::now() - std::chrono::seconds(2);
  if (!quiet) {
    options.on_progress = [&](const Progress& p) {
      const auto now = std::chrono::steady_clock::now();
      if (p.completed != p.total && now - last < std::chrono::seconds(1)) return;
      last = now;
      const double elapsed = std::chrono::duration<double>(p.elapsed).count();
      const std::size_t remaining = p.total - p.completed;
      std::string eta = "?";
      if (p.executed > 0) eta = seconds_text(elapsed / static_cast<double>(p.executed) * static_cast<double>(remaining));
      char pct[16];
      std::snprintf(pct, sizeof pct, "%.1f", p.total ? 100.0 * static_cast<double>(p.completed) / static_cast<double>(p.total) : 100.0);
      err << "progress " << p.completed << "/" << p.total << " (" << pct << "%) elapsed "
          << seconds_text(elapsed) << " eta " << eta << "\n" << std::flush;
    };
  }

  const auto summary = run_tournament(plan, dir, options);
  out << "store: " << dir.string() << "\n";
  out << "experiments: " << summary.total_experiments << "\n";
  out << "resumed: " << summary.already_complete << "\n";
  out << "executed: " << summary.executed << "\n";
  out << "status: " << (summary.finished ? "complete" : "partial") << "\n";
  if (!summary.finished && stop && stop->load()) {
    err << "interrupted; continue with --resume\n";
    return kExitRuntimeFailure;
  }
  return kExitOk;
}

int cmd_report(const std::string& store, const std::vector<std::string>& formats, const std::string& out_flag,
               const std::string& optimum, std::ostream& out) {
  const auto policy = optimum == "study" ? OptimumPolicy::study : OptimumPolicy::automatic;
  const auto report = build_report(fs::path(store), policy);
  const fs::path dir = out_flag.empty() ? fs::path(store) / "report" : fs::path(out_flag);
  for (const auto& f : formats) {
    const auto format = f == "csv" ? ReportFormat::csv : f == "json" ? ReportFormat::json : ReportFormat::svg;
    for (const auto& path : emit(report, format, dir)) out << path.string() << "\n";
  }
  return kExitOk;
}

int cmd_oracle(const std::string& plan_path, const std::vector<int>& thread, const std::vector<int>& workgroup,
               std::optional<std::int64_t> limit, const std::string& benchmark, std::ostream& out) {
  SearchSpace space;
  std::optional<BenchmarkSpec> bench;
  if (!plan_path.empty()) {
    const auto plan = load_plan(plan_path);
    space = plan.space;
    if (!benchmark.empty()) {
      for (const auto& b : plan.benchmarks) {
        if (b.id == benchmark) bench = b;
      }
    }
  }
  if (!thread.empty() || !workgroup.empty() || limit) {
    const IntRange t = thread.empty() ? SearchSpace::kDefaultThreadRange : IntRange{thread[0], thread[1]};
    const IntRange w = workgroup.empty() ? SearchSpace::kDefaultWorkgroupRange : IntRange{workgroup[0], workgroup[1]};
    space = SearchSpace::uniform(t, w, limit.value_or(SearchSpace::kDefaultConstraintLimit));
  }
  if (!benchmark.empty() && !bench) {
    const auto kind = parse_objective_kind(benchmark);
    if (!kind || *kind == ObjectiveKind::custom) throw PlanError("unknown benchmark '" + benchmark + "'", 0, "benchmark");
    bench = BenchmarkSpec{benchmark, ObjectiveSpec{}};
    bench->objective.kind = *kind;
  }
  out << "total_size: " << space.total_size() << "\n";
  out << "valid: " << space.count_valid() << "\n";
  if (bench) {
    if (!bench->objective.is_synthetic()) {
      throw RefusalError("oracle: benchmark '" + bench->id + "' is not synthetic; no brute-force optimum");
    }
    const auto best = brute_force_optimum(space, make_objective(*bench, space));
    out << "benchmark: " << bench->id << "\n";
    out << "optimum_config: ";
    for (std::size_t d = 0; d < kDimensions; ++d) out << (d ? "," : "") << best.config[d];
    out << "\n";
    out << "optimum_value: " << format_double(best.value) << "\n";
  }
  return kExitOk;
}

}  // namespace

int main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
         const std::atomic<bool>* stop) {
  CLI::App app{"Search-strategy tournaments for integer autotuning spaces"};
  app.require_subcommand(1);

  std::string plan_path, store, out_dir, optimum = "auto", benchmark;
  unsigned jobs = 1;
  bool resume = false, quiet = false;
  std::size_t stop_after = 0;
  std::vector<std::string> formats{"csv", "json", "svg"};
  std::vector<int> thread, workgroup;
  std::optional<std::int64_t> limit;

  auto* run = app.add_subcommand("run", "Run or resume a tournament");
  run->add_option("plan", plan_path, "Plan file")->required()->check(CLI::ExistingFile);
  run->add_option("-j,--jobs", jobs, "Worker threads")->check(CLI::Range(1u, 1024u));
  run->add_flag("--resume", resume, "Continue an interrupted store");
  run->add_option("-o,--out", out_dir, std::string("Store directory (default: plan output.directory, then $") + kOutputDirEnv + ")");
  run->add_option("--stop-after", stop_after, "Stop after this many new experiments");
  run->add_flag("-q,--quiet", quiet, "No progress lines");

  auto* report = app.add_subcommand("report", "Build report files from a store");
  report->add_option("store", store, "Store directory")->required()->check(CLI::ExistingDirectory);
  report->add_option("-f,--format", formats, "csv, json, svg")
      ->delimiter(',')
      ->check(CLI::IsMember({"csv", "json", "svg"}));
  report->add_option("-o,--out", out_dir, "Report directory (default: <store>/report)");
  report->add_option("--optimum", optimum, "Optimum policy")->check(CLI::IsMember({"auto", "study"}));

  auto* oracle = app.add_subcommand("oracle", "Space counts and brute-force optima");
  oracle->add_option("--plan", plan_path, "Take the space and benchmarks from a plan")->check(CLI::ExistingFile);
  oracle->add_option("--thread", thread, "Thread coarsening range LO HI")->expected(2);
  oracle->add_option("--workgroup", workgroup, "Work-group range LO HI")->expected(2);
  oracle->add_option("--limit", limit, "Work-group product limit");
  oracle->add_option("-b,--benchmark", benchmark, "Benchmark kind or plan benchmark id");

  auto* validate = app.add_subcommand("validate", "Check a plan and print it with defaults resolved");
  validate->add_option("plan", plan_path, "Plan file")->required()->check(CLI::ExistingFile);

  std::vector<const char*> argv{"autotune"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitPlanError;
  }

  const std::string source = plan_path.empty() ? store : plan_path;
  try {
    if (*run) return cmd_run(plan_path, jobs, resume, out_dir, stop_after, quiet, out, err, stop);
    if (*report) return cmd_report(store, formats, out_dir, optimum, out);
    if (*oracle) return cmd_oracle(plan_path, thread, workgroup, limit, benchmark, out);
    if (*validate) {
      out << dump_plan(load_plan(plan_path));
      return kExitOk;
    }
  } catch (const PlanError& e) {
    err << source << ": error: " << e.what() << "\n";
    return kExitPlanError;
  } catch (const RefusalError& e) {
    err << "error: " << e.what() << "\n";
    return kExitPlanError;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return kExitPlanError;
  } catch (const IncompleteStoreError& e) {
    err << store << ": error: " << e.what() << "\n";
    return kExitIncompleteStore;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntimeFailure;
  }
  return kExitRuntimeFailure;
}

}  // namespace autotune::cli
