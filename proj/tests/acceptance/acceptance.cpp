// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "autotune/forest.hpp"
#include "autotune/gaussian_process.hpp"
#include "autotune/objective.hpp"
#include "autotune/parzen.hpp"
#include "autotune/report.hpp"
#include "autotune/stats.hpp"
#include "autotune/store.hpp"
#include "autotune/strategies.hpp"
#include "autotune/tournament.hpp"
#include "dense_gp.hpp"
#include "fixtures.hpp"

using namespace autotune;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

// Collects failed sub-checks of one criterion.
struct Check {
  std::vector<std::string> failures;
  std::string note;

  void expect(bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  }
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

StrategySpec strategy(StrategyKind kind, const std::string& id) {
  StrategySpec s;
  s.kind = kind;
  s.id = id;
  return s;
}

// ---- 1: space cardinality

void space_cardinality(Check& c) {
  const auto start = Clock::now();
  const SearchSpace space;
  c.expect(space.total_size() == 2097152, "total_size = " + std::to_string(space.total_size()));
  // Thread factors are unconstrained; count admissible work-group triples.
  std::uint64_t groups = 0;
  for (int x = 1; x <= 8; ++x)
    for (int y = 1; y <= 8; ++y)
      for (int z = 1; z <= 8; ++z) groups += x * y * z <= 256 ? 1 : 0;
  const std::uint64_t oracle = groups * 16 * 16 * 16;
  const auto valid = space.enumerate_valid();
  c.expect(valid.size() == oracle, "enumerate_valid " + std::to_string(valid.size()) + " vs oracle " +
                                       std::to_string(oracle));
  c.expect(space.count_valid() == oracle, "count_valid disagrees with oracle");
  const double t = seconds_since(start);
  c.expect(t < 5.0, "took " + fmt(t) + " s");
  c.note = "total 2097152, valid " + std::to_string(valid.size()) + ", " + fmt(t) + " s";
}

// ---- 2: MWU exactness

double u_of(const std::vector<double>& a, const std::vector<double>& b) {
  double u = 0.0;
  for (double x : a)
    for (double y : b) u += x > y ? 1.0 : x == y ? 0.5 : 0.0;
  return u;
}

void mwu_exactness(Check& c) {
  using stats::Alternative;
  std::size_t cases = 0;
  double worst = 0.0;
  for (std::size_t n = 2; n <= 10; ++n) {
    std::vector<double> pooled(n);
    std::iota(pooled.begin(), pooled.end(), 1.0);
    for (std::size_t na = 1; na < n; ++na) {
      // Null distribution by enumerating every labelling.
      std::vector<double> us;
      std::vector<std::uint32_t> masks;
      for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
        if (static_cast<std::size_t>(__builtin_popcount(mask)) != na) continue;
        std::vector<double> a, b;
        for (std::size_t i = 0; i < n; ++i) ((mask >> i) & 1u ? a : b).push_back(pooled[i]);
        us.push_back(u_of(a, b));
        masks.push_back(mask);
      }
      const double total = static_cast<double>(us.size());
      for (std::size_t k = 0; k < masks.size(); ++k) {
        std::vector<double> a, b;
        for (std::size_t i = 0; i < n; ++i) ((masks[k] >> i) & 1u ? a : b).push_back(pooled[i]);
        double le = 0.0, ge = 0.0;
        for (double u : us) {
          le += u <= us[k] ? 1.0 : 0.0;
          ge += u >= us[k] ? 1.0 : 0.0;
        }
        const double want_less = le / total, want_greater = ge / total;
        const double want_two = std::min(1.0, 2.0 * std::min(want_less, want_greater));
        const double got_less = stats::mann_whitney_u(a, b, Alternative::less, stats::MwuMethod::exact).p_value;
        const double got_greater =
            stats::mann_whitney_u(a, b, Alternative::greater, stats::MwuMethod::exact).p_value;
        const double got_two =
            stats::mann_whitney_u(a, b, Alternative::two_sided, stats::MwuMethod::exact).p_value;
        worst = std::max({worst, std::abs(got_less - want_less), std::abs(got_greater - want_greater),
                          std::abs(got_two - want_two)});
        ++cases;
      }
    }
  }
  c.expect(worst <= 1e-12, "max exact deviation " + fmt(worst));

  const std::vector<double> a{1, 2, 3}, b{4, 5, 6};
  const double fixture = stats::mann_whitney_u(a, b, stats::Alternative::less).p_value;
  c.expect(fixture == 0.05, "fixture p = " + fmt(fixture));

  // Normal approximation against a shuffled-label estimate at n = m = 30.
  std::mt19937_64 gen(2024);
  std::normal_distribution<double> normal;
  std::vector<double> x, y;
  for (int i = 0; i < 30; ++i) x.push_back(normal(gen));
  for (int i = 0; i < 30; ++i) y.push_back(normal(gen) + 0.4);
  const double approx =
      stats::mann_whitney_u(x, y, stats::Alternative::less, stats::MwuMethod::normal_approx).p_value;
  std::vector<double> pooled(x);
  pooled.insert(pooled.end(), y.begin(), y.end());
  const double observed = u_of(x, y);
  // With distinct values U = rank sum - n(n+1)/2, so compare rank sums.
  std::vector<std::size_t> order(60);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return pooled[i] < pooled[j]; });
  std::vector<double> ranks(60);
  for (std::size_t r = 0; r < 60; ++r) ranks[order[r]] = static_cast<double>(r + 1);
  const double threshold = observed + 30.0 * 31.0 / 2.0;
  const int shuffles = 1000000;
  int hits = 0;
  for (int s = 0; s < shuffles; ++s) {
    for (std::size_t i = 0; i < 30; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, 59);
      std::swap(ranks[i], ranks[pick(gen)]);
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < 30; ++i) sum += ranks[i];
    hits += sum <= threshold ? 1 : 0;
  }
  const double estimate = static_cast<double>(hits) / shuffles;
  c.expect(std::abs(approx - estimate) <= 0.005,
           "normal approx " + fmt(approx) + " vs permutation " + fmt(estimate));
  c.note = std::to_string(cases) + " splits, max deviation " + fmt(worst) + "; normal " + fmt(approx) +
           " vs shuffled " + fmt(estimate);
}

// ---- 3: CLES

void cles_correctness(Check& c) {
  std::mt19937_64 gen(7);
  std::uniform_int_distribution<int> size(1, 40), value(0, 12);
  double worst_sym = 0.0;
  for (int k = 0; k < 100; ++k) {
    std::vector<double> a(static_cast<std::size_t>(size(gen))), b(static_cast<std::size_t>(size(gen)));
    for (auto& v : a) v = value(gen);
    for (auto& v : b) v = value(gen);
    const double brute = u_of(a, b) / static_cast<double>(a.size() * b.size());
    const double got = stats::cles(a, b);
    c.expect(got == brute, "pair " + std::to_string(k) + ": " + fmt(got) + " vs " + fmt(brute));
    worst_sym = std::max(worst_sym, std::abs(stats::cles(a, b) + stats::cles(b, a) - 1.0));
  }
  c.expect(worst_sym <= 1e-12, "antisymmetry off by " + fmt(worst_sym));
  const double fixture = stats::cles(std::vector<double>{2, 3}, std::vector<double>{1, 2});
  c.expect(fixture == 0.875, "fixture " + fmt(fixture));
  c.note = "100 pairs exact, antisymmetry within " + fmt(worst_sym) + ", fixture " + fmt(fixture);
}

// ---- 4, 5: toy tournament

TournamentPlan toy_plan() {
  TournamentPlan plan;
  BenchmarkSpec add{"add", {}};
  BenchmarkSpec harris{"harris", {}};
  harris.objective.kind = ObjectiveKind::synthetic_harris;
  plan.benchmarks = {add, harris};
  plan.strategies = {strategy(StrategyKind::random_search, "rs"), strategy(StrategyKind::rf_surrogate, "rf"),
                     strategy(StrategyKind::genetic, "ga"), strategy(StrategyKind::bo_gp, "bo-gp"),
                     strategy(StrategyKind::bo_tpe, "bo-tpe")};
  plan.sample_sizes = {25, 50};
  plan.experiments_per_size = {40, 20};
  plan.master_seed = 20240611;
  return plan;
}

std::string store_bytes(const fs::path& dir, const TournamentPlan& plan) {
  std::string all;
  std::vector<fs::path> files{kPlanFileName, kTrialsFileName, kOutcomesFileName};
  for (const auto& b : plan.benchmarks) {
    files.push_back(fs::relative(dataset_path(dir, b.id, 0, false), dir));
  }
  for (const auto& f : files) all += f.string() + "\n" + fixture::read_file(dir / f);
  return all;
}

void determinism(Check& c, const fs::path& root) {
  const auto plan = toy_plan();
  const auto start = Clock::now();
  RunOptions eight;
  eight.parallelism = 8;
  run_tournament(plan, root / "first");
  run_tournament(plan, root / "second");
  run_tournament(plan, root / "parallel", eight);
  const auto first = store_bytes(root / "first", plan);
  c.expect(first == store_bytes(root / "second", plan), "two serial runs differ");
  c.expect(first == store_bytes(root / "parallel", plan), "parallelism 1 and 8 differ");
  c.expect(read_outcomes(root / "first").size() == plan.total_experiments(), "outcome count");
  c.note = std::to_string(plan.total_experiments()) + " experiments, " + std::to_string(first.size()) +
           " bytes, 3 runs in " + fmt(seconds_since(start)) + " s";
}

void budget_accounting(Check& c, const fs::path& root) {
  const auto plan = toy_plan();
  const fs::path dir = root / "first";
  const auto outcomes = read_outcomes(dir);
  std::map<std::tuple<std::string, std::string, std::size_t, std::size_t>, std::vector<TrialRecord>> search;
  for (auto& t : read_trials(dir)) {
    if (t.phase == TrialPhase::search) search[{t.benchmark, t.strategy, t.sample_size, t.experiment_index}].push_back(t);
  }
  std::map<std::string, std::vector<Trial>> datasets;
  for (const auto& b : plan.benchmarks) {
    for (const auto& line : read_record_lines(dataset_path(dir, b.id, 0, false))) {
      datasets[b.id].push_back(parse_dataset_row(line));
    }
  }
  std::size_t checked = 0;
  for (const auto& o : outcomes) {
    const std::size_t s = o.sample_size;
    std::size_t want = s;
    if (o.strategy == "ga") {
      const auto [pop, gen] = ga_schedule(s);
      want = static_cast<std::size_t>(pop) * static_cast<std::size_t>(gen);
    }
    const std::string id = o.benchmark + "/" + o.strategy + "/S=" + std::to_string(s) + "/#" +
                           std::to_string(o.experiment_index);
    c.expect(o.evaluations_used == want, id + ": evaluations_used " + std::to_string(o.evaluations_used));
    const auto& trials = search[{o.benchmark, o.strategy, s, o.experiment_index}];
    c.expect(trials.size() == want, id + ": " + std::to_string(trials.size()) + " search trials");
    if (o.strategy == "rf" && trials.size() == s) {
      // Training data is the experiment's slice of the pre-measured dataset.
      const auto slice = subdivide(datasets[o.benchmark], s, o.experiment_index);
      for (std::size_t i = 0; i < s - 10; ++i) {
        if (trials[i].config != slice[i].config || trials[i].runtime_ms != slice[i].measurement.runtime_ms) {
          c.expect(false, id + ": training trial " + std::to_string(i) + " is not from the dataset");
          break;
        }
      }
    }
    ++checked;
  }

  // Direct count of the RF split with a known surrogate ranking.
  const SearchSpace space;
  std::size_t evaluations = 0;
  const Objective objective(
      [&](const Configuration& cfg) {
        ++evaluations;
        return 1.0 + static_cast<double>(cfg.xt());
      },
      0.0);
  const std::uint64_t total = space.total_size();
  const auto score = [&](const Configuration& cfg) {
    return static_cast<double>((space.box_index(cfg) * 7919) % total);
  };
  std::size_t trained_on = 0;
  const PredictorFactory factory = [&](std::span<const Observation> train, Rng&) {
    trained_on = train.size();
    return std::function<double(const Configuration&)>(score);
  };
  for (std::size_t s : {25u, 50u, 100u}) {
    evaluations = 0;
    const ExperimentContext ctx{space, objective, s, 1, {}};
    Rng rng(s);
    const auto out = run_rf_surrogate(ctx, RfSurrogateOptions{}, rng, factory);
    std::vector<std::pair<double, std::uint64_t>> ranked;
    for (const auto& cfg : space.enumerate_valid()) ranked.push_back({score(cfg), space.box_index(cfg)});
    std::partial_sort(ranked.begin(), ranked.begin() + 10, ranked.end());
    c.expect(trained_on == s - 10, "S=" + std::to_string(s) + ": trained on " + std::to_string(trained_on));
    c.expect(out.history.size() == s, "S=" + std::to_string(s) + ": history " + std::to_string(out.history.size()));
    c.expect(evaluations == s + 1, "S=" + std::to_string(s) + ": objective called " + std::to_string(evaluations));
    for (std::size_t i = 0; i < 10 && out.history.size() == s; ++i) {
      c.expect(space.box_index(out.history[s - 10 + i].config) == ranked[i].second,
               "S=" + std::to_string(s) + ": prediction " + std::to_string(i) + " is not the surrogate's top pick");
    }
  }
  c.note = std::to_string(checked) + " experiments; RF split S-10 + 10 at S in {25,50,100}";
}

// ---- 6: oracle equivalence

void oracle_equivalence(Check& c) {
  const auto space = fixture::reduced_space();
  const Objective objective(fixture::noiseless(ObjectiveKind::synthetic_add), space.constraint_limit());
  const auto brute = brute_force_optimum(space, objective);
  const auto& fixture = fixture::kReducedOptima[0];
  c.expect(space.count_valid() == 512, "reduced space has " + std::to_string(space.count_valid()));
  c.expect(brute.value == fixture.value && brute.config == fixture.config,
           "brute force " + to_string(brute.config) + " = " + fmt(brute.value));
  StrategySpec all = strategy(StrategyKind::exhaustive, "all");
  StrategySpec rs = strategy(StrategyKind::random_search, "rs");
  rs.options.random_search.without_replacement = true;
  for (const auto& spec : {all, rs}) {
    const ExperimentContext ctx{space, objective, 512, 10, {}};
    Rng rng(3);
    const auto out = run_strategy(spec, ctx, rng);
    // Ties in the landscape allow another configuration with the same value.
    if (spec.kind == StrategyKind::exhaustive) {
      c.expect(out.best_config == brute.config, spec.id + " found " + to_string(out.best_config));
    }
    c.expect(objective.noiseless(out.best_config) == brute.value, spec.id + " found " + to_string(out.best_config));
    c.expect(out.best_search_runtime == brute.value, spec.id + " best " + fmt(out.best_search_runtime));
    c.expect(out.final_score.mean_runtime == brute.value, spec.id + " final " + fmt(out.final_score.mean_runtime));
    c.expect(out.evaluations_used == 512, spec.id + " used " + std::to_string(out.evaluations_used));
  }
  c.note = "optimum " + to_string(brute.config) + " = " + fmt(brute.value);
}

// ---- 7: random-search trend

BenchmarkSpec noiseless_mandelbrot() {
  return BenchmarkSpec{"mandelbrot", fixture::noiseless(ObjectiveKind::synthetic_mandelbrot)};
}

void trend(Check& c, const fs::path& root) {
  const auto start = Clock::now();
  TournamentPlan plan;
  plan.benchmarks = {noiseless_mandelbrot()};
  plan.strategies = {strategy(StrategyKind::random_search, "rs")};
  plan.sample_sizes = {25, 50, 100, 200, 400};
  plan.experiments_per_size = {100, 100, 100, 100, 100};
  plan.dataset.size = 40000;
  plan.master_seed = 7;
  run_tournament(plan, root / "trend");
  const auto report = build_report(root / "trend");
  std::string text;
  double previous = 0.0;
  for (std::size_t k = 0; k < plan.sample_sizes.size(); ++k) {
    const double percent = report.cell("mandelbrot", plan.sample_sizes[k]).percent_of_optimum[0];
    text += (k ? " " : "") + fmt(percent);
    if (k) c.expect(percent >= previous - 1.0, "drop at S=" + std::to_string(plan.sample_sizes[k]));
    previous = percent;
  }
  const double t = seconds_since(start);
  c.expect(t < 600.0, "took " + fmt(t) + " s");
  c.note = "percent of optimum " + text + " in " + fmt(t) + " s";
}

// ---- 8: search quality

double median_best(const std::vector<OutcomeRecord>& outcomes, const std::string& strat) {
  std::vector<double> v;
  for (const auto& o : outcomes) {
    if (o.strategy == strat) v.push_back(o.best_search_runtime);
  }
  return stats::median(v);
}

void search_quality(Check& c, const fs::path& root) {
  const auto start = Clock::now();
  TournamentPlan small;
  small.benchmarks = {noiseless_mandelbrot()};
  small.strategies = {strategy(StrategyKind::random_search, "rs"), strategy(StrategyKind::bo_gp, "bo-gp"),
                      strategy(StrategyKind::bo_tpe, "bo-tpe")};
  small.sample_sizes = {100};
  small.experiments_per_size = {100};
  small.master_seed = 8;
  run_tournament(small, root / "quality100");
  const auto at100 = read_outcomes(root / "quality100");

  TournamentPlan large = small;
  large.strategies = {strategy(StrategyKind::random_search, "rs"), strategy(StrategyKind::genetic, "ga")};
  large.sample_sizes = {400};
  run_tournament(large, root / "quality400");
  const auto at400 = read_outcomes(root / "quality400");

  const double rs100 = median_best(at100, "rs"), gp = median_best(at100, "bo-gp"),
               tpe = median_best(at100, "bo-tpe");
  const double rs400 = median_best(at400, "rs"), ga = median_best(at400, "ga");
  c.expect(tpe <= rs100, "S=100 bo-tpe " + fmt(tpe) + " > rs " + fmt(rs100));
  c.expect(gp <= rs100, "S=100 bo-gp " + fmt(gp) + " > rs " + fmt(rs100));
  c.expect(ga <= rs400, "S=400 ga " + fmt(ga) + " > rs " + fmt(rs400));
  c.note = "S=100 rs " + fmt(rs100) + " bo-gp " + fmt(gp) + " bo-tpe " + fmt(tpe) + "; S=400 rs " + fmt(rs400) +
           " ga " + fmt(ga) + "; " + fmt(seconds_since(start)) + " s";
}

// ---- 9: report integrity

void report_integrity(Check& c, const fs::path& root) {
  const fs::path store = root / "first";
  const auto report = build_report(store);
  const auto written = emit(report, ReportFormat::csv, root / "report");
  const auto rebuilt = figure_matrices(build_report(store));
  c.expect(written.size() == rebuilt.size(), "matrix count");
  double worst = 0.0;
  std::size_t cells = 0;
  for (std::size_t m = 0; m < std::min(written.size(), rebuilt.size()); ++m) {
    const auto back = matrix_from_csv(fixture::read_file(written[m]));
    c.expect(back.rows == rebuilt[m].rows && back.columns == rebuilt[m].columns, written[m].string() + " layout");
    if (back.values.size() != rebuilt[m].values.size()) continue;
    for (std::size_t i = 0; i < back.values.size(); ++i) {
      for (std::size_t k = 0; k < back.values[i].size(); ++k) {
        worst = std::max(worst, std::abs(back.values[i][k] - rebuilt[m].values[i][k]));
        ++cells;
      }
    }
  }
  c.expect(worst <= 1e-9, "cell deviation " + fmt(worst));

  TournamentPlan exh;
  exh.space = fixture::reduced_space();
  exh.benchmarks = {BenchmarkSpec{"add", fixture::noiseless(ObjectiveKind::synthetic_add)},
                    BenchmarkSpec{"mandelbrot", fixture::noiseless(ObjectiveKind::synthetic_mandelbrot)}};
  exh.strategies = {strategy(StrategyKind::random_search, "rs"), strategy(StrategyKind::exhaustive, "all")};
  exh.sample_sizes = {25, 50};
  exh.experiments_per_size = {4, 2};
  exh.dataset.size = 200;
  run_tournament(exh, root / "exhaustive");
  const auto exh_report = build_report(root / "exhaustive");
  for (const auto& cell : exh_report.cells) {
    c.expect(cell.percent_of_optimum[1] == 100.0,
             cell.benchmark + "/S=" + std::to_string(cell.sample_size) + " exhaustive " +
                 fmt(cell.percent_of_optimum[1]));
  }

  std::vector<double> base, gap5, gap05;
  for (int i = 0; i < 30; ++i) {
    const double jitter = 1.0 + 0.0001 * i;
    base.push_back(100.0 * jitter);
    gap5.push_back(95.0 * jitter);
    gap05.push_back(99.5 * jitter);
  }
  c.expect(significantly_faster(gap5, base, 0.01), "5% gap not flagged");
  c.expect(!significantly_faster(gap05, base, 0.01), "0.5% gap flagged");
  c.note = std::to_string(cells) + " cells within " + fmt(worst) + "; exhaustive 100%; 5%/0.5% gap fixtures";
}

// ---- 10: model oracles

void model_oracles(Check& c) {
  const SearchSpace space;
  const std::vector<Observation> points{
      {{1, 1, 1, 1, 1, 1}, 3.0},  {{4, 8, 2, 2, 4, 1}, 1.5},  {{16, 3, 9, 8, 1, 4}, 2.25},
      {{7, 7, 7, 4, 4, 4}, 0.75}, {{12, 15, 1, 1, 8, 2}, 4.0},
  };
  Rng rng(10);
  double worst = 0.0;
  for (double ls : {0.1, 0.2, 0.5}) {
    for (double noise : {0.0, 0.01}) {
      const auto model = GpModel::fit_with_length_scale(points, space, ls, noise);
      const fixture::DenseGp dense(points, space, ls, noise + model.jitter());
      for (int i = 0; i < 40; ++i) {
        const auto q = i < 5 ? points[static_cast<std::size_t>(i)].config : space.sample_uniform(rng, false);
        const auto got = model.posterior(q);
        const auto want = dense.at(space, q);
        worst = std::max({worst, std::abs(got.mean - want.mean),
                          std::abs(got.variance - std::max(0.0, want.variance))});
      }
    }
  }
  c.expect(worst <= 1e-8, "GP deviation " + fmt(worst));

  const double phi0 = 1.0 / std::sqrt(2.0 * std::numbers::pi);
  const double ei = expected_improvement(2.5, 1.0, 2.5);
  c.expect(std::abs(ei - phi0) <= 1e-9, "EI " + fmt(ei));

  std::vector<Observation> train;
  std::vector<Configuration> seen;
  while (train.size() < 400) {
    const auto cfg = space.sample_uniform(rng, false);
    if (std::find(seen.begin(), seen.end(), cfg) != seen.end()) continue;
    seen.push_back(cfg);
    train.push_back({cfg, std::sin(cfg.xt() * 0.7) * cfg.yw() + cfg.zt() * 0.01 * cfg.xw()});
  }
  ForestOptions unbounded;
  unbounded.trees = 1;
  unbounded.max_depth = 0;
  unbounded.bootstrap = false;
  const auto tree = RegressionTree::fit(train, unbounded, rng);
  std::size_t misses = 0;
  for (const auto& o : train) misses += tree.predict(o.config) == o.runtime ? 0 : 1;
  c.expect(misses == 0, std::to_string(misses) + " training points not interpolated");

  double parzen_worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Observation> history;
    const int n = 2 + trial * 9;
    for (int i = 0; i < n; ++i) history.push_back({space.sample_uniform(rng, false), rng.uniform01()});
    const auto pair = parzen_fit(history, space);
    for (std::size_t d = 0; d < kDimensions; ++d) {
      const double g = std::accumulate(pair.good[d].begin(), pair.good[d].end(), 0.0);
      const double b = std::accumulate(pair.bad[d].begin(), pair.bad[d].end(), 0.0);
      parzen_worst = std::max({parzen_worst, std::abs(g - 1.0), std::abs(b - 1.0)});
    }
  }
  c.expect(parzen_worst <= 1e-12, "Parzen mass off by " + fmt(parzen_worst));
  c.note = "GP within " + fmt(worst) + ", EI " + fmt(ei) + ", tree exact on 400 points, Parzen within " +
           fmt(parzen_worst);
}

}  // namespace

int main() {
  fixture::TempDir root("acceptance");
  const std::vector<std::pair<std::string, std::function<void(Check&)>>> criteria{
      {"space cardinality", space_cardinality},
      {"MWU exactness", mwu_exactness},
      {"CLES correctness", cles_correctness},
      {"determinism", [&](Check& c) { determinism(c, root.path()); }},
      {"budget accounting", [&](Check& c) { budget_accounting(c, root.path()); }},
      {"oracle equivalence", oracle_equivalence},
      {"random-search trend", [&](Check& c) { trend(c, root.path()); }},
      {"search quality", [&](Check& c) { search_quality(c, root.path()); }},
      {"report integrity", [&](Check& c) { report_integrity(c, root.path()); }},
      {"model oracles", model_oracles},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Check check;
    try {
      criteria[i].second(check);
    } catch (const std::exception& e) {
      check.failures.push_back(std::string("exception: ") + e.what());
    }
    const bool ok = check.failures.empty();
    failed += ok ? 0 : 1;
    std::printf("%s %zu %s: %s\n", ok ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), check.note.c_str());
    for (std::size_t k = 0; k < check.failures.size() && k < 10; ++k) {
      std::printf("    %s\n", check.failures[k].c_str());
    }
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
