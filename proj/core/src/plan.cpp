#include "autotune/plan.hpp"

#include <yaml-cpp/yaml.h>

#include <fstream>
#include <set>
#include <sstream>

#include "autotune/errors.hpp"
#include "autotune/store.hpp"

namespace autotune {

namespace {

int line_of(const YAML::Node& node) { return node.Mark().line >= 0 ? node.Mark().line + 1 : 0; }

[[noreturn]] void fail(const YAML::Node& node, const std::string& key, const std::string& message) {
  throw PlanError("line " + std::to_string(line_of(node)) + ": '" + key + "': " + message,
                  line_of(node), key);
}

template <typename T>
T scalar(const YAML::Node& node, const std::string& key) {
  if (!node.IsScalar()) fail(node, key, "expected a scalar value");
  try {
    return node.as<T>();
  } catch (const YAML::BadConversion&) {
    fail(node, key, "cannot convert '" + node.Scalar() + "'");
  }
}

std::size_t count(const YAML::Node& node, const std::string& key) {
  const auto v = scalar<long long>(node, key);
  if (v < 0) fail(node, key, "must be non-negative");
  return static_cast<std::size_t>(v);
}

void check_keys(const YAML::Node& map, const std::string& where, const std::set<std::string>& allowed) {
  if (!map.IsMap()) fail(map, where, "expected a mapping");
  for (const auto& entry : map) {
    const auto key = entry.first.Scalar();
    if (!allowed.count(key)) {
      fail(entry.first, where.empty() ? key : where + "." + key, "unknown key");
    }
  }
}

IntRange range(const YAML::Node& node, const std::string& key) {
  if (!node.IsSequence() || node.size() != 2) fail(node, key, "expected [lo, hi]");
  IntRange r{scalar<int>(node[0], key), scalar<int>(node[1], key)};
  if (r.lo < 1 || r.hi < r.lo) fail(node, key, "expected 1 <= lo <= hi");
  return r;
}

std::vector<std::size_t> counts(const YAML::Node& node, const std::string& key) {
  if (!node.IsSequence()) fail(node, key, "expected a list");
  std::vector<std::size_t> out;
  for (const auto& item : node) out.push_back(count(item, key));
  return out;
}

SearchSpace parse_space(const YAML::Node& node) {
  check_keys(node, "space", {"thread", "workgroup", "xt", "yt", "zt", "xw", "yw", "zw", "limit"});
  std::array<IntRange, kDimensions> ranges{
      SearchSpace::kDefaultThreadRange,    SearchSpace::kDefaultThreadRange,
      SearchSpace::kDefaultThreadRange,    SearchSpace::kDefaultWorkgroupRange,
      SearchSpace::kDefaultWorkgroupRange, SearchSpace::kDefaultWorkgroupRange};
  if (node["thread"]) ranges[0] = ranges[1] = ranges[2] = range(node["thread"], "space.thread");
  if (node["workgroup"]) ranges[3] = ranges[4] = ranges[5] = range(node["workgroup"], "space.workgroup");
  for (std::size_t d = 0; d < kDimensions; ++d) {
    const std::string name(kDimensionNames[d]);
    if (node[name]) ranges[d] = range(node[name], "space." + name);
  }
  std::int64_t limit = SearchSpace::kDefaultConstraintLimit;
  if (node["limit"]) limit = scalar<std::int64_t>(node["limit"], "space.limit");
  try {
    return SearchSpace(ranges, limit);
  } catch (const DomainError& e) {
    fail(node, "space", e.what());
  }
}

BenchmarkSpec parse_benchmark(const YAML::Node& node) {
  check_keys(node, "benchmarks", {"id", "kind", "noise_sigma", "penalty", "command", "timeout_s"});
  if (!node["kind"]) fail(node, "benchmarks.kind", "missing required key");
  BenchmarkSpec b;
  const auto kind_name = scalar<std::string>(node["kind"], "benchmarks.kind");
  const auto kind = parse_objective_kind(kind_name);
  if (!kind || *kind == ObjectiveKind::custom) {
    fail(node["kind"], "benchmarks.kind", "unknown benchmark kind '" + kind_name + "'");
  }
  b.objective.kind = *kind;
  b.id = node["id"] ? scalar<std::string>(node["id"], "benchmarks.id") : kind_name;
  if (node["noise_sigma"]) {
    b.objective.noise_sigma = scalar<double>(node["noise_sigma"], "benchmarks.noise_sigma");
    if (b.objective.noise_sigma < 0.0) fail(node["noise_sigma"], "benchmarks.noise_sigma", "must be >= 0");
  }
  if (node["penalty"]) {
    b.objective.penalty = scalar<double>(node["penalty"], "benchmarks.penalty");
    if (!(b.objective.penalty > 0.0)) fail(node["penalty"], "benchmarks.penalty", "must be positive");
  }
  if (node["command"]) {
    if (*kind != ObjectiveKind::external) fail(node["command"], "benchmarks.command", "only valid for external benchmarks");
    b.objective.external_command = scalar<std::string>(node["command"], "benchmarks.command");
  } else if (*kind == ObjectiveKind::external) {
    fail(node, "benchmarks.command", "external benchmarks need a command");
  }
  if (node["timeout_s"]) {
    const auto seconds = scalar<double>(node["timeout_s"], "benchmarks.timeout_s");
    if (!(seconds > 0.0)) fail(node["timeout_s"], "benchmarks.timeout_s", "must be positive");
    b.objective.timeout = std::chrono::milliseconds(static_cast<long long>(seconds * 1000.0 + 0.5));
  }
  return b;
}

StrategySpec parse_strategy(const YAML::Node& node) {
  if (!node.IsMap()) fail(node, "strategies", "expected a mapping");
  if (!node["kind"]) fail(node, "strategies.kind", "missing required key");
  const auto kind_name = scalar<std::string>(node["kind"], "strategies.kind");
  const auto kind = parse_strategy_kind(kind_name);
  if (!kind) fail(node["kind"], "strategies.kind", "unknown strategy kind '" + kind_name + "'");

  std::set<std::string> allowed{"kind", "id"};
  switch (*kind) {
    case StrategyKind::random_search:
      allowed.insert("rs.without_replacement");
      break;
    case StrategyKind::rf_surrogate:
      allowed.insert({"rf.trees", "rf.max_depth", "rf.feature_subset_size", "rf.bootstrap",
                      "rf.prediction_count", "rf.candidate_cap"});
      break;
    case StrategyKind::genetic:
      allowed.insert({"ga.population", "ga.generations", "ga.mutation_rate", "ga.crossover_rate"});
      break;
    case StrategyKind::bo_gp:
      allowed.insert({"bo_gp.init_fraction", "bo_gp.candidates", "bo_gp.noise_variance",
                      "bo_gp.length_scales"});
      break;
    case StrategyKind::bo_tpe:
      allowed.insert({"bo_tpe.gamma", "bo_tpe.candidates", "bo_tpe.startup", "bo_tpe.prior_weight"});
      break;
    case StrategyKind::exhaustive:
      allowed.insert("exhaustive.max_configs");
      break;
  }
  check_keys(node, "strategies", allowed);

  StrategySpec s;
  s.kind = *kind;
  s.id = node["id"] ? scalar<std::string>(node["id"], "strategies.id") : kind_name;
  auto& o = s.options;
  const auto opt = [&](const char* key) { return node[key]; };
  const auto probability = [&](const char* key, double& out, bool open_low) {
    if (!opt(key)) return;
    out = scalar<double>(opt(key), key);
    if (out > 1.0 || out < 0.0 || (open_low && out == 0.0)) fail(opt(key), key, "must lie in [0, 1]");
  };

  if (opt("rs.without_replacement")) o.random_search.without_replacement = scalar<bool>(opt("rs.without_replacement"), "rs.without_replacement");

  if (opt("rf.trees")) o.rf.forest.trees = scalar<int>(opt("rf.trees"), "rf.trees");
  if (opt("rf.max_depth")) o.rf.forest.max_depth = scalar<int>(opt("rf.max_depth"), "rf.max_depth");
  if (opt("rf.feature_subset_size")) o.rf.forest.feature_subset_size = scalar<int>(opt("rf.feature_subset_size"), "rf.feature_subset_size");
  if (opt("rf.bootstrap")) o.rf.forest.bootstrap = scalar<bool>(opt("rf.bootstrap"), "rf.bootstrap");
  if (opt("rf.prediction_count")) o.rf.prediction_count = count(opt("rf.prediction_count"), "rf.prediction_count");
  if (opt("rf.candidate_cap")) o.rf.candidate_cap = count(opt("rf.candidate_cap"), "rf.candidate_cap");
  if (o.rf.forest.trees < 1) fail(node, "rf.trees", "must be >= 1");
  if (o.rf.forest.feature_subset_size < 1 || o.rf.forest.feature_subset_size > 6) fail(node, "rf.feature_subset_size", "must lie in [1, 6]");
  if (o.rf.prediction_count < 1) fail(node, "rf.prediction_count", "must be >= 1");

  if (opt("ga.population")) o.genetic.population = scalar<int>(opt("ga.population"), "ga.population");
  if (opt("ga.generations")) o.genetic.generations = scalar<int>(opt("ga.generations"), "ga.generations");
  probability("ga.mutation_rate", o.genetic.mutation_rate, false);
  probability("ga.crossover_rate", o.genetic.crossover_rate, false);

  probability("bo_gp.init_fraction", o.bo_gp.init_fraction, false);
  if (opt("bo_gp.candidates")) o.bo_gp.candidates = count(opt("bo_gp.candidates"), "bo_gp.candidates");
  if (opt("bo_gp.noise_variance")) o.bo_gp.gp.noise_variance = scalar<double>(opt("bo_gp.noise_variance"), "bo_gp.noise_variance");
  if (opt("bo_gp.length_scales")) {
    const auto& list = opt("bo_gp.length_scales");
    if (!list.IsSequence() || list.size() == 0) fail(list, "bo_gp.length_scales", "expected a non-empty list");
    o.bo_gp.gp.length_scale_grid.clear();
    for (const auto& v : list) {
      const auto ls = scalar<double>(v, "bo_gp.length_scales");
      if (!(ls > 0.0)) fail(v, "bo_gp.length_scales", "must be positive");
      o.bo_gp.gp.length_scale_grid.push_back(ls);
    }
  }
  if (o.bo_gp.candidates < 1) fail(node, "bo_gp.candidates", "must be >= 1");
  if (o.bo_gp.gp.noise_variance < 0.0) fail(node, "bo_gp.noise_variance", "must be >= 0");

  if (opt("bo_tpe.gamma")) {
    o.bo_tpe.gamma = scalar<double>(opt("bo_tpe.gamma"), "bo_tpe.gamma");
    if (!(o.bo_tpe.gamma > 0.0 && o.bo_tpe.gamma < 1.0)) fail(opt("bo_tpe.gamma"), "bo_tpe.gamma", "must lie in (0, 1)");
  }
  probability("bo_tpe.prior_weight", o.bo_tpe.prior_weight, true);
  if (opt("bo_tpe.candidates")) o.bo_tpe.candidates = count(opt("bo_tpe.candidates"), "bo_tpe.candidates");
  if (opt("bo_tpe.startup")) o.bo_tpe.startup = count(opt("bo_tpe.startup"), "bo_tpe.startup");
  if (o.bo_tpe.candidates < 1) fail(node, "bo_tpe.candidates", "must be >= 1");

  if (opt("exhaustive.max_configs")) o.exhaustive.max_configs = count(opt("exhaustive.max_configs"), "exhaustive.max_configs");
  return s;
}

}  // namespace

TournamentPlan parse_plan(std::string_view text) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(text));
  } catch (const YAML::ParserException& e) {
    throw PlanError("line " + std::to_string(e.mark.line + 1) + ": syntax error: " + e.msg,
                    e.mark.line + 1);
  }
  if (!root.IsMap()) throw PlanError("plan: top level must be a mapping", 1);
  check_keys(root, "", {"seed", "space", "benchmarks", "strategies", "sample_sizes", "experiments",
                        "final_repetitions", "dataset", "report", "output"});

  TournamentPlan plan;
  if (root["seed"]) plan.master_seed = scalar<std::uint64_t>(root["seed"], "seed");
  if (root["space"]) plan.space = parse_space(root["space"]);

  if (!root["benchmarks"]) throw PlanError("plan: missing required key 'benchmarks'", 0, "benchmarks");
  if (!root["benchmarks"].IsSequence()) fail(root["benchmarks"], "benchmarks", "expected a list");
  for (const auto& b : root["benchmarks"]) plan.benchmarks.push_back(parse_benchmark(b));

  if (!root["strategies"]) throw PlanError("plan: missing required key 'strategies'", 0, "strategies");
  if (!root["strategies"].IsSequence()) fail(root["strategies"], "strategies", "expected a list");
  for (const auto& s : root["strategies"]) plan.strategies.push_back(parse_strategy(s));

  if (root["sample_sizes"]) plan.sample_sizes = counts(root["sample_sizes"], "sample_sizes");
  if (root["experiments"]) {
    plan.experiments_per_size = counts(root["experiments"], "experiments");
    if (plan.experiments_per_size.size() != plan.sample_sizes.size()) {
      fail(root["experiments"], "experiments", "must have one entry per sample size");
    }
  } else {
    plan.experiments_per_size.clear();
    for (std::size_t s : plan.sample_sizes) {
      if (s < 1) fail(root["sample_sizes"], "sample_sizes", "must be >= 1");
      plan.experiments_per_size.push_back(default_experiments(s));
    }
  }
  if (root["final_repetitions"]) plan.final_repetitions = scalar<int>(root["final_repetitions"], "final_repetitions");

  if (const auto d = root["dataset"]) {
    check_keys(d, "dataset", {"enabled", "size", "per_size"});
    if (d["enabled"]) plan.dataset.enabled = scalar<bool>(d["enabled"], "dataset.enabled");
    if (d["size"]) plan.dataset.size = count(d["size"], "dataset.size");
    if (d["per_size"]) plan.dataset.per_size = scalar<bool>(d["per_size"], "dataset.per_size");
  }
  if (const auto r = root["report"]) {
    check_keys(r, "report", {"alpha", "confidence"});
    if (r["alpha"]) plan.alpha = scalar<double>(r["alpha"], "report.alpha");
    if (r["confidence"]) plan.confidence_level = scalar<double>(r["confidence"], "report.confidence");
  }
  if (const auto o = root["output"]) {
    check_keys(o, "output", {"directory"});
    if (o["directory"]) plan.output_directory = scalar<std::string>(o["directory"], "output.directory");
  }

  try {
    plan.validate();
  } catch (const PlanError& e) {
    // Anchor validation failures to the key's line when it can be located.
    const std::string top = e.key().substr(0, e.key().find('.'));
    YAML::Node anchor = root[top];
    if (!anchor && (top == "rs" || top == "rf" || top == "ga" || top == "bo_gp" || top == "bo_tpe" || top == "exhaustive")) {
      anchor = root["strategies"];
    }
    const int line = anchor ? line_of(anchor) : 0;
    throw PlanError("line " + std::to_string(line) + ": '" + e.key() + "': " + e.what(), line, e.key());
  }
  return plan;
}

TournamentPlan load_plan(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw PlanError("cannot read plan file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_plan(buffer.str());
}

namespace {

std::string num(double v) { return format_double(v); }

void emit_range(YAML::Emitter& out, const IntRange& r) {
  out << YAML::Flow << YAML::BeginSeq << r.lo << r.hi << YAML::EndSeq;
}

}  // namespace

std::string dump_plan(const TournamentPlan& plan) {
  YAML::Emitter out;
  out << YAML::BeginMap;
  out << YAML::Key << "seed" << YAML::Value << plan.master_seed;
  out << YAML::Key << "space" << YAML::Value << YAML::BeginMap;
  for (std::size_t d = 0; d < kDimensions; ++d) {
    out << YAML::Key << std::string(kDimensionNames[d]) << YAML::Value;
    emit_range(out, plan.space.range(d));
  }
  out << YAML::Key << "limit" << YAML::Value << plan.space.constraint_limit();
  out << YAML::EndMap;

  out << YAML::Key << "benchmarks" << YAML::Value << YAML::BeginSeq;
  for (const auto& b : plan.benchmarks) {
    out << YAML::BeginMap;
    out << YAML::Key << "id" << YAML::Value << b.id;
    out << YAML::Key << "kind" << YAML::Value << std::string(to_string(b.objective.kind));
    out << YAML::Key << "noise_sigma" << YAML::Value << num(b.objective.noise_sigma);
    out << YAML::Key << "penalty" << YAML::Value << num(b.objective.penalty);
    if (b.objective.kind == ObjectiveKind::external) {
      out << YAML::Key << "command" << YAML::Value << YAML::DoubleQuoted << b.objective.external_command;
      out << YAML::Key << "timeout_s" << YAML::Value
          << num(static_cast<double>(b.objective.timeout.count()) / 1000.0);
    }
    out << YAML::EndMap;
  }
  out << YAML::EndSeq;

  out << YAML::Key << "strategies" << YAML::Value << YAML::BeginSeq;
  for (const auto& s : plan.strategies) {
    const auto& o = s.options;
    out << YAML::BeginMap;
    out << YAML::Key << "kind" << YAML::Value << std::string(to_string(s.kind));
    out << YAML::Key << "id" << YAML::Value << s.name();
    switch (s.kind) {
      case StrategyKind::random_search:
        out << YAML::Key << "rs.without_replacement" << YAML::Value << o.random_search.without_replacement;
        break;
      case StrategyKind::rf_surrogate:
        out << YAML::Key << "rf.trees" << YAML::Value << o.rf.forest.trees;
        out << YAML::Key << "rf.max_depth" << YAML::Value << o.rf.forest.max_depth;
        out << YAML::Key << "rf.feature_subset_size" << YAML::Value << o.rf.forest.feature_subset_size;
        out << YAML::Key << "rf.bootstrap" << YAML::Value << o.rf.forest.bootstrap;
        out << YAML::Key << "rf.prediction_count" << YAML::Value << o.rf.prediction_count;
        out << YAML::Key << "rf.candidate_cap" << YAML::Value << o.rf.candidate_cap;
        break;
      case StrategyKind::genetic:
        if (o.genetic.population) out << YAML::Key << "ga.population" << YAML::Value << *o.genetic.population;
        if (o.genetic.generations) out << YAML::Key << "ga.generations" << YAML::Value << *o.genetic.generations;
        out << YAML::Key << "ga.mutation_rate" << YAML::Value << num(o.genetic.mutation_rate);
        out << YAML::Key << "ga.crossover_rate" << YAML::Value << num(o.genetic.crossover_rate);
        break;
      case StrategyKind::bo_gp:
        out << YAML::Key << "bo_gp.init_fraction" << YAML::Value << num(o.bo_gp.init_fraction);
        out << YAML::Key << "bo_gp.candidates" << YAML::Value << o.bo_gp.candidates;
        out << YAML::Key << "bo_gp.noise_variance" << YAML::Value << num(o.bo_gp.gp.noise_variance);
        out << YAML::Key << "bo_gp.length_scales" << YAML::Value << YAML::Flow << YAML::BeginSeq;
        for (double ls : o.bo_gp.gp.length_scale_grid) out << num(ls);
        out << YAML::EndSeq;
        break;
      case StrategyKind::bo_tpe:
        out << YAML::Key << "bo_tpe.gamma" << YAML::Value << num(o.bo_tpe.gamma);
        out << YAML::Key << "bo_tpe.prior_weight" << YAML::Value << num(o.bo_tpe.prior_weight);
        out << YAML::Key << "bo_tpe.candidates" << YAML::Value << o.bo_tpe.candidates;
        if (o.bo_tpe.startup) out << YAML::Key << "bo_tpe.startup" << YAML::Value << *o.bo_tpe.startup;
        break;
      case StrategyKind::exhaustive:
        out << YAML::Key << "exhaustive.max_configs" << YAML::Value << o.exhaustive.max_configs;
        break;
    }
    out << YAML::EndMap;
  }
  out << YAML::EndSeq;

  out << YAML::Key << "sample_sizes" << YAML::Value << YAML::Flow << plan.sample_sizes;
  out << YAML::Key << "experiments" << YAML::Value << YAML::Flow << plan.experiments_per_size;
  out << YAML::Key << "final_repetitions" << YAML::Value << plan.final_repetitions;
  out << YAML::Key << "dataset" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "enabled" << YAML::Value << plan.dataset.enabled;
  out << YAML::Key << "size" << YAML::Value << plan.dataset.size;
  out << YAML::Key << "per_size" << YAML::Value << plan.dataset.per_size;
  out << YAML::EndMap;
  out << YAML::Key << "report" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "alpha" << YAML::Value << num(plan.alpha);
  out << YAML::Key << "confidence" << YAML::Value << num(plan.confidence_level);
  out << YAML::EndMap;
  if (!plan.output_directory.empty()) {
    out << YAML::Key << "output" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "directory" << YAML::Value << plan.output_directory;
    out << YAML::EndMap;
  }
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

}  // namespace autotune
