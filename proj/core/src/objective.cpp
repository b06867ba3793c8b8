#include "autotune/objective.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "autotune/errors.hpp"

namespace autotune {

namespace {

struct KindName {
  ObjectiveKind kind;
  std::string_view name;
};

constexpr KindName kKindNames[] = {
    {ObjectiveKind::synthetic_add, "synthetic-add"},
    {ObjectiveKind::synthetic_harris, "synthetic-harris"},
    {ObjectiveKind::synthetic_mandelbrot, "synthetic-mandelbrot"},
    {ObjectiveKind::external, "external"},
    {ObjectiveKind::custom, "custom"},
};

// Shared core of all three landscapes: warp quantization, a thread-coarsening
// sweet spot at T = 2 and a work-group sweet spot at W = 32.
double add_landscape(const Configuration& c) {
  const double threads = static_cast<double>(c.thread_product());
  const std::int64_t w = c.workgroup_product();
  const double warp_eff = static_cast<double>(w) / (32.0 * static_cast<double>((w + 31) / 32));
  return 1.0 + 0.6 * (1.0 - warp_eff) + 0.25 * std::abs(std::log2(threads) - 1.0) +
         0.15 * std::abs(std::log2(static_cast<double>(w)) - 5.0);
}

}  // namespace

std::string_view to_string(ObjectiveKind kind) {
  for (const auto& entry : kKindNames) {
    if (entry.kind == kind) return entry.name;
  }
  return "unknown";
}

std::optional<ObjectiveKind> parse_objective_kind(std::string_view name) {
  for (const auto& entry : kKindNames) {
    if (entry.name == name) return entry.kind;
  }
  return std::nullopt;
}

double base_value(const ObjectiveSpec& spec, const Configuration& c) {
  if (!spec.is_synthetic()) {
    throw std::invalid_argument("base_value: objective kind '" + std::string(to_string(spec.kind)) +
                                "' has no synthetic landscape");
  }
  if (c.workgroup_product() > kLandscapeWorkgroupLimit) return spec.penalty;

  double value = add_landscape(c);
  switch (spec.kind) {
    case ObjectiveKind::synthetic_harris:
      value += 0.4 * std::abs(std::log2(static_cast<double>(c.xw())) -
                              std::log2(static_cast<double>(c.yw())));
      value += c.zw() > 1 ? 0.2 : 0.0;
      break;
    case ObjectiveKind::synthetic_mandelbrot:
      value += 0.3 * (1.0 + std::sin(static_cast<double>(c.xt() * c.yw() + c.yt() * c.xw()))) / 2.0;
      break;
    default:
      break;
  }
  return value;
}

Objective::Objective(ObjectiveSpec spec, std::int64_t constraint_limit)
    : spec_(std::move(spec)), constraint_limit_(constraint_limit) {
  if (spec_.noise_sigma < 0.0) throw DomainError("objective: noise_sigma must be >= 0");
  if (!(spec_.penalty > 0.0)) throw DomainError("objective: penalty must be positive");
  if (spec_.kind == ObjectiveKind::custom) {
    throw std::invalid_argument("objective: custom kind requires a landscape function");
  }
}

Objective::Objective(Landscape landscape, double noise_sigma, double penalty,
                     std::int64_t constraint_limit)
    : landscape_(std::move(landscape)), constraint_limit_(constraint_limit) {
  spec_.kind = ObjectiveKind::custom;
  spec_.noise_sigma = noise_sigma;
  spec_.penalty = penalty;
  if (noise_sigma < 0.0) throw DomainError("objective: noise_sigma must be >= 0");
  if (!(penalty > 0.0)) throw DomainError("objective: penalty must be positive");
}

double Objective::noiseless(const Configuration& c) const {
  if (c.workgroup_product() > constraint_limit_) return spec_.penalty;
  if (spec_.kind == ObjectiveKind::custom) return landscape_(c);
  return base_value(spec_, c);
}

Measurement Objective::evaluate_once(const Configuration& c, Rng& rng) const {
  if (c.workgroup_product() > constraint_limit_) return {spec_.penalty, true};

  if (spec_.kind == ObjectiveKind::external) {
    std::lock_guard lock(*external_mutex_);
    const auto runtime = run_external(spec_.external_command, c, spec_.timeout);
    if (!runtime) return {spec_.penalty, true};
    return {*runtime, false};
  }

  const double base = noiseless(c);
  if (base >= spec_.penalty) return {spec_.penalty, true};
  if (spec_.noise_sigma == 0.0) return {base, false};
  return {base * std::exp(spec_.noise_sigma * rng.normal()), false};
}

FinalScore Objective::evaluate_final(const Configuration& c, Rng& rng, int repetitions) const {
  if (repetitions < 1) throw DomainError("evaluate_final: repetitions must be >= 1");
  FinalScore score;
  score.samples.reserve(static_cast<std::size_t>(repetitions));
  for (int i = 0; i < repetitions; ++i) score.samples.push_back(evaluate_once(c, rng).runtime_ms);
  score.mean_runtime = running_mean(score.samples);
  return score;
}

double running_mean(const std::vector<double>& values) {
  double mean = 0.0;
  std::size_t n = 0;
  for (double v : values) {
    ++n;
    mean += (v - mean) / static_cast<double>(n);
  }
  return mean;
}

Optimum brute_force_optimum(const SearchSpace& space, const Objective& objective) {
  if (objective.spec().kind == ObjectiveKind::external) {
    throw RefusalError("brute-force optimum needs a synthetic or custom objective");
  }
  Optimum best{Configuration{}, std::numeric_limits<double>::infinity()};
  bool found = false;
  const auto total = space.total_size();
  for (std::uint64_t i = 0; i < total; ++i) {
    const auto c = space.box_at(i);
    if (!space.satisfies_constraint(c)) continue;
    const double v = objective.noiseless(c);
    if (!found || v < best.value) {
      best = {c, v};
      found = true;
    }
  }
  if (!found) throw DomainError("brute-force optimum: space has no valid configuration");
  return best;
}

}  // namespace autotune
