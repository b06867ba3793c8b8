#include "autotune/report.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <tuple>

#include "autotune/errors.hpp"
#include "autotune/plan.hpp"
#include "autotune/stats.hpp"

namespace autotune {

namespace {

using Key = std::tuple<std::string, std::string, std::size_t>;

std::map<Key, std::vector<const OutcomeRecord*>> group(const std::vector<OutcomeRecord>& outcomes) {
  std::map<Key, std::vector<const OutcomeRecord*>> cells;
  for (const auto& o : outcomes) cells[{o.benchmark, o.strategy, o.sample_size}].push_back(&o);
  for (auto& [key, list] : cells) {
    std::stable_sort(list.begin(), list.end(), [](const OutcomeRecord* a, const OutcomeRecord* b) {
      return a->experiment_index < b->experiment_index;
    });
  }
  return cells;
}

// Distinct experiment indices below the planned count.
std::size_t complete_count(const std::vector<const OutcomeRecord*>& list, std::size_t planned) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < list.size(); ++i) {
    if (list[i]->experiment_index >= planned) break;
    if (i > 0 && list[i]->experiment_index == list[i - 1]->experiment_index) continue;
    ++n;
  }
  return n;
}

}  // namespace

const CellReport& ComparisonReport::cell(const std::string& benchmark, std::size_t sample_size) const {
  for (const auto& c : cells) {
    if (c.benchmark == benchmark && c.sample_size == sample_size) return c;
  }
  throw DomainError("report: no cell for " + benchmark + " at S=" + std::to_string(sample_size));
}

std::vector<std::string> missing_cells(const TournamentPlan& plan,
                                       const std::vector<OutcomeRecord>& outcomes) {
  const auto cells = group(outcomes);
  std::vector<std::string> missing;
  for (const auto& b : plan.benchmarks) {
    for (const auto& s : plan.strategies) {
      for (std::size_t k = 0; k < plan.sample_sizes.size(); ++k) {
        const auto size = plan.sample_sizes[k];
        const auto planned = plan.experiments_per_size[k];
        const auto it = cells.find({b.id, s.name(), size});
        const std::size_t have = it == cells.end() ? 0 : complete_count(it->second, planned);
        if (have < planned) {
          missing.push_back(b.id + "/" + s.name() + "/S=" + std::to_string(size) + " (" +
                            std::to_string(have) + " of " + std::to_string(planned) + ")");
        }
      }
    }
  }
  return missing;
}

bool significantly_faster(std::span<const double> a, std::span<const double> b, double alpha) {
  const auto test = stats::mann_whitney_u(a, b, stats::Alternative::less);
  const double ma = stats::median(a);
  const double mb = stats::median(b);
  return test.p_value < alpha && mb > 0.0 && (mb - ma) / mb > kMinimumRelativeGap;
}

void significance_flags(ComparisonReport& report, double alpha) {
  report.alpha = alpha;
  for (auto& cell : report.cells) {
    const auto n = cell.strategies.size();
    cell.significant.assign(n, std::vector<bool>(n, false));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (i == j) continue;
        const double mi = cell.median_runtime[i];
        const double mj = cell.median_runtime[j];
        cell.significant[i][j] =
            cell.p_values[i][j] < alpha && mj > 0.0 && (mj - mi) / mj > kMinimumRelativeGap;
      }
    }
  }
}

ComparisonReport build_report(const TournamentPlan& plan, const std::vector<OutcomeRecord>& outcomes,
                              OptimumPolicy policy) {
  if (const auto missing = missing_cells(plan, outcomes); !missing.empty()) {
    std::string message = "report: incomplete store, missing cells:";
    for (const auto& m : missing) message += "\n  " + m;
    throw IncompleteStoreError(message);
  }
  const auto grouped = group(outcomes);

  ComparisonReport report;
  report.alpha = plan.alpha;
  report.confidence_level = plan.confidence_level;
  report.sample_sizes = plan.sample_sizes;
  for (const auto& b : plan.benchmarks) report.benchmarks.push_back(b.id);
  for (std::size_t i = 0; i < plan.strategies.size(); ++i) {
    report.strategies.push_back(plan.strategies[i].name());
    if (!report.rs_index && plan.strategies[i].kind == StrategyKind::random_search) report.rs_index = i;
  }

  // Final scores per benchmark, strategy and size, truncated to the plan.
  const auto runtimes = [&](const std::string& bench, const std::string& strat, std::size_t k) {
    const auto& list = grouped.at({bench, strat, plan.sample_sizes[k]});
    std::vector<double> values;
    for (const auto* o : list) {
      if (o->experiment_index >= plan.experiments_per_size[k]) break;
      if (!values.empty() && o->experiment_index < values.size()) continue;
      values.push_back(o->final_mean);
    }
    return values;
  };

  for (const auto& bench : plan.benchmarks) {
    BenchmarkOptimum optimum{bench.id, 0.0, "study"};
    const bool noiseless = bench.objective.is_synthetic() && bench.objective.noise_sigma == 0.0;
    if (policy == OptimumPolicy::automatic && noiseless) {
      optimum.runtime = brute_force_optimum(plan.space, make_objective(bench, plan.space)).value;
      optimum.source = "brute-force";
    } else {
      optimum.runtime = std::numeric_limits<double>::infinity();
      for (const auto& s : plan.strategies) {
        for (std::size_t k = 0; k < plan.sample_sizes.size(); ++k) {
          for (double v : runtimes(bench.id, s.name(), k)) optimum.runtime = std::min(optimum.runtime, v);
        }
      }
    }
    report.optima.push_back(optimum);
  }

  const auto n = report.strategies.size();
  for (std::size_t bi = 0; bi < plan.benchmarks.size(); ++bi) {
    for (std::size_t k = 0; k < plan.sample_sizes.size(); ++k) {
      CellReport cell;
      cell.benchmark = report.benchmarks[bi];
      cell.sample_size = plan.sample_sizes[k];
      cell.strategies = report.strategies;
      for (const auto& name : report.strategies) cell.final_runtimes.push_back(runtimes(cell.benchmark, name, k));
      for (const auto& r : cell.final_runtimes) {
        cell.median_runtime.push_back(stats::median(r));
        cell.percent_of_optimum.push_back(stats::percent_of_optimum(r, report.optima[bi].runtime));
      }
      if (report.rs_index) {
        const auto& rs = cell.final_runtimes[*report.rs_index];
        for (const auto& r : cell.final_runtimes) {
          cell.median_speedup_vs_rs.push_back(stats::median_speedup(r, rs));
          // Probability that the strategy's result beats random search.
          cell.cles_vs_rs.push_back(stats::cles(rs, r));
        }
      }
      cell.p_values.assign(n, std::vector<double>(n, 1.0));
      cell.cles.assign(n, std::vector<double>(n, 0.5));
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          if (i == j) continue;
          cell.p_values[i][j] =
              stats::mann_whitney_u(cell.final_runtimes[i], cell.final_runtimes[j], stats::Alternative::less)
                  .p_value;
          cell.cles[i][j] = stats::cles(cell.final_runtimes[j], cell.final_runtimes[i]);
        }
      }
      report.cells.push_back(std::move(cell));
    }
  }
  significance_flags(report, plan.alpha);

  for (std::size_t k = 0; k < plan.sample_sizes.size(); ++k) {
    for (std::size_t si = 0; si < n; ++si) {
      std::vector<double> percents;
      for (std::size_t bi = 0; bi < plan.benchmarks.size(); ++bi) {
        percents.push_back(report.cells[bi * plan.sample_sizes.size() + k].percent_of_optimum[si]);
      }
      AggregateEntry entry{plan.sample_sizes[k], report.strategies[si], stats::mean(percents), 0.0, 0.0};
      if (percents.size() >= 2) {
        std::tie(entry.ci_low, entry.ci_high) = stats::confidence_interval(percents, plan.confidence_level);
      } else {
        entry.ci_low = entry.ci_high = entry.mean_percent;
      }
      report.aggregate.push_back(entry);
    }
  }
  return report;
}

ComparisonReport build_report(const std::filesystem::path& store_dir, OptimumPolicy policy) {
  const auto plan = load_plan(store_dir / kPlanFileName);
  return build_report(plan, read_outcomes(store_dir), policy);
}

std::vector<NamedMatrix> figure_matrices(const ComparisonReport& report) {
  std::vector<NamedMatrix> out;
  const auto sizes = report.sample_sizes.size();
  const auto n = report.strategies.size();
  const auto family = [&](const std::string& name, const std::string& bench, std::size_t bi,
                          const std::vector<double> CellReport::*field) {
    NamedMatrix m{name, bench, report.strategies, report.sample_sizes, Matrix(n, std::vector<double>(sizes))};
    for (std::size_t k = 0; k < sizes; ++k) {
      const auto& cell = report.cells[bi * sizes + k];
      for (std::size_t i = 0; i < n; ++i) m.values[i][k] = (cell.*field)[i];
    }
    return m;
  };
  for (std::size_t bi = 0; bi < report.benchmarks.size(); ++bi) {
    const auto& bench = report.benchmarks[bi];
    out.push_back(family("percent_of_optimum", bench, bi, &CellReport::percent_of_optimum));
    if (report.rs_index) {
      out.push_back(family("speedup_vs_rs", bench, bi, &CellReport::median_speedup_vs_rs));
      out.push_back(family("cles_vs_rs", bench, bi, &CellReport::cles_vs_rs));
    }
  }
  NamedMatrix mean{"mean_percent_of_optimum", "", report.strategies, report.sample_sizes,
                   Matrix(n, std::vector<double>(sizes))};
  for (const auto& a : report.aggregate) {
    const auto k = static_cast<std::size_t>(
        std::find(report.sample_sizes.begin(), report.sample_sizes.end(), a.sample_size) -
        report.sample_sizes.begin());
    const auto i = static_cast<std::size_t>(
        std::find(report.strategies.begin(), report.strategies.end(), a.strategy) - report.strategies.begin());
    mean.values[i][k] = a.mean_percent;
  }
  out.push_back(std::move(mean));
  return out;
}

std::string matrix_to_csv(const NamedMatrix& matrix) {
  std::string out = "strategy";
  for (auto s : matrix.columns) out += "," + std::to_string(s);
  out += "\n";
  for (std::size_t i = 0; i < matrix.rows.size(); ++i) {
    out += matrix.rows[i];
    for (double v : matrix.values[i]) out += "," + format_double(v);
    out += "\n";
  }
  return out;
}

NamedMatrix matrix_from_csv(const std::string& text) {
  NamedMatrix m;
  std::istringstream in(text);
  std::string line;
  const auto split = [](const std::string& l) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream s(l);
    while (std::getline(s, field, ',')) fields.push_back(field);
    return fields;
  };
  if (!std::getline(in, line)) throw DomainError("csv: empty matrix");
  const auto header = split(line);
  for (std::size_t i = 1; i < header.size(); ++i) m.columns.push_back(std::stoull(header[i]));
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = split(line);
    if (fields.size() != header.size()) throw DomainError("csv: ragged row '" + line + "'");
    m.rows.push_back(fields[0]);
    std::vector<double> row;
    for (std::size_t i = 1; i < fields.size(); ++i) row.push_back(parse_double(fields[i]));
    m.values.push_back(std::move(row));
  }
  return m;
}

std::string report_to_json(const ComparisonReport& report) {
  using nlohmann::ordered_json;
  ordered_json doc;
  doc["format"] = "autotune-report";
  doc["version"] = 1;
  doc["definitions"] = {
      {"percent_of_optimum", "100 * optimum / median final runtime of the cell"},
      {"optimum", "brute-force noiseless minimum for noiseless synthetic benchmarks, otherwise the "
                  "lowest final runtime observed in the study"},
      {"median_speedup_vs_rs", "median final runtime of random search / median final runtime of the strategy"},
      {"cles_vs_rs", "probability that a final runtime of the strategy is lower than one of random search, ties count half"},
      {"p_values", "row i, column j: one-sided Mann-Whitney U p-value that strategy i is faster than strategy j"},
      {"cles", "row i, column j: probability that strategy i beats strategy j, ties count half"},
      {"significant", "row i, column j: p < alpha and the median of i is more than 1% below the median of j"},
  };
  doc["alpha"] = report.alpha;
  doc["confidence_level"] = report.confidence_level;
  doc["benchmarks"] = report.benchmarks;
  doc["strategies"] = report.strategies;
  doc["sample_sizes"] = report.sample_sizes;
  doc["reference_strategy"] =
      report.rs_index ? ordered_json(report.strategies[*report.rs_index]) : ordered_json(nullptr);

  auto optima = ordered_json::array();
  for (const auto& o : report.optima) {
    optima.push_back({{"benchmark", o.benchmark}, {"runtime_ms", o.runtime}, {"source", o.source}});
  }
  doc["optima"] = optima;

  auto cells = ordered_json::array();
  for (const auto& c : report.cells) {
    ordered_json cell;
    cell["benchmark"] = c.benchmark;
    cell["sample_size"] = c.sample_size;
    cell["experiments"] = c.final_runtimes.empty() ? 0 : c.final_runtimes.front().size();
    auto per = ordered_json::array();
    for (std::size_t i = 0; i < c.strategies.size(); ++i) {
      ordered_json s;
      s["strategy"] = c.strategies[i];
      s["median_runtime_ms"] = c.median_runtime[i];
      s["percent_of_optimum"] = c.percent_of_optimum[i];
      s["median_speedup_vs_rs"] = report.rs_index ? ordered_json(c.median_speedup_vs_rs[i]) : ordered_json(nullptr);
      s["cles_vs_rs"] = report.rs_index ? ordered_json(c.cles_vs_rs[i]) : ordered_json(nullptr);
      per.push_back(s);
    }
    cell["strategies"] = per;
    cell["p_values"] = c.p_values;
    cell["cles"] = c.cles;
    cell["significant"] = c.significant;
    cells.push_back(cell);
  }
  doc["cells"] = cells;

  auto aggregate = ordered_json::array();
  for (const auto& a : report.aggregate) {
    aggregate.push_back({{"sample_size", a.sample_size},
                         {"strategy", a.strategy},
                         {"mean_percent_of_optimum", a.mean_percent},
                         {"ci_low", a.ci_low},
                         {"ci_high", a.ci_high}});
  }
  doc["aggregate"] = aggregate;
  return doc.dump(2) + "\n";
}

namespace {

std::string matrix_stem(const NamedMatrix& m) {
  return m.benchmark.empty() ? m.name : m.name + "." + m.benchmark;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  out.flush();
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace

std::vector<std::filesystem::path> emit(const ComparisonReport& report, ReportFormat format,
                                        const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  std::vector<std::filesystem::path> written;
  if (format == ReportFormat::json) {
    written.push_back(out_dir / "report.json");
    write_text(written.back(), report_to_json(report));
    return written;
  }
  for (const auto& m : figure_matrices(report)) {
    if (format == ReportFormat::csv) {
      written.push_back(out_dir / (matrix_stem(m) + ".csv"));
      write_text(written.back(), matrix_to_csv(m));
    } else {
      written.push_back(out_dir / (matrix_stem(m) + ".svg"));
      write_text(written.back(), heatmap_svg(m));
    }
  }
  return written;
}

}  // namespace autotune
