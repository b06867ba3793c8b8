#pragma once

#include <chrono>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "autotune/rng.hpp"
#include "autotune/space.hpp"

namespace autotune {

enum class ObjectiveKind { synthetic_add, synthetic_harris, synthetic_mandelbrot, external, custom };

std::string_view to_string(ObjectiveKind kind);
std::optional<ObjectiveKind> parse_objective_kind(std::string_view name);

inline constexpr double kDefaultPenaltyMs = 10000.0;
inline constexpr double kDefaultNoiseSigma = 0.05;
inline constexpr std::int64_t kLandscapeWorkgroupLimit = 256;

struct ObjectiveSpec {
  ObjectiveKind kind = ObjectiveKind::synthetic_add;
  /// Lognormal multiplicative noise: runtime = base * exp(sigma * z).
  double noise_sigma = kDefaultNoiseSigma;
  double penalty = kDefaultPenaltyMs;
  /// Command template with {xt} {yt} {zt} {xw} {yw} {zw} placeholders.
  std::string external_command;
  std::chrono::milliseconds timeout{60000};

  bool is_synthetic() const {
    return kind == ObjectiveKind::synthetic_add || kind == ObjectiveKind::synthetic_harris ||
           kind == ObjectiveKind::synthetic_mandelbrot;
  }
};

struct Measurement {
  double runtime_ms = 0.0;
  bool penalized = false;
};

struct FinalScore {
  double mean_runtime = 0.0;
  std::vector<double> samples;

  std::size_t repetitions() const { return samples.size(); }
};

/// Noiseless synthetic landscape value in ms. Work-group products above 256
/// map to `spec.penalty`. Throws std::invalid_argument for non-synthetic kinds.
double base_value(const ObjectiveSpec& spec, const Configuration& c);

/// Replaces the six placeholders of `command_template` with the values of `c`.
std::string substitute_command(std::string_view command_template, const Configuration& c);

/// Runs `command_template` for `c` through /bin/sh and parses a runtime in ms
/// from the last non-empty line of stdout. Returns nullopt on a nonzero exit,
/// a timeout, or unparseable output.
std::optional<double> run_external(std::string_view command_template, const Configuration& c,
                                   std::chrono::milliseconds timeout = std::chrono::seconds(60));

/// Measurement function used by the strategies.
///
/// Wraps a synthetic landscape, an external command, or an arbitrary
/// noiseless function. Configurations violating the space constraint are
/// never executed and return the penalty. External runs are serialized per
/// instance.
class Objective {
 public:
  using Landscape = std::function<double(const Configuration&)>;

  explicit Objective(ObjectiveSpec spec,
                     std::int64_t constraint_limit = SearchSpace::kDefaultConstraintLimit);

  /// Custom noiseless landscape with the same noise and penalty handling as
  /// the synthetic kinds.
  Objective(Landscape landscape, double noise_sigma, double penalty = kDefaultPenaltyMs,
            std::int64_t constraint_limit = SearchSpace::kDefaultConstraintLimit);

  const ObjectiveSpec& spec() const { return spec_; }

  /// Noiseless value for synthetic and custom objectives.
  double noiseless(const Configuration& c) const;

  /// One measurement, as taken during search.
  Measurement evaluate_once(const Configuration& c, Rng& rng) const;

  /// `repetitions` independent measurements and their mean.
  FinalScore evaluate_final(const Configuration& c, Rng& rng, int repetitions = 10) const;

 private:
  ObjectiveSpec spec_;
  Landscape landscape_;
  std::int64_t constraint_limit_;
  std::unique_ptr<std::mutex> external_mutex_ = std::make_unique<std::mutex>();
};

/// Welford running mean; exact when all samples are equal.
double running_mean(const std::vector<double>& values);

struct Optimum {
  Configuration config;
  double value = 0.0;
};

/// Noiseless minimum over every valid configuration of `space`. Ties go to
/// the configuration that comes first in enumeration order. Throws
/// RefusalError for external objectives.
Optimum brute_force_optimum(const SearchSpace& space, const Objective& objective);

}  // namespace autotune
