#pragma once

#include <memory>
#include <span>
#include <vector>

#include "autotune/observation.hpp"
#include "autotune/space.hpp"

namespace autotune {

struct GpOptions {
  /// Candidate length scales (unit-cube units); the one with the largest log
  /// marginal likelihood is kept.
  std::vector<double> length_scale_grid{0.1, 0.2, 0.5};
  /// Observation noise variance, in units of the standardized targets.
  double noise_variance = 0.01;
  double jitter = 1e-6;
  double max_jitter = 1e-3;
};

struct Posterior {
  double mean = 0.0;
  double variance = 0.0;
};

/// Matern 5/2 correlation at scaled distance r = |x - x'| / length_scale.
double matern52(double scaled_distance);

/// Gaussian-process regression with a Matern 5/2 kernel.
///
/// Inputs are min-max normalized to the unit cube using the space ranges.
/// Targets are standardized (zero mean, unit variance) before fitting, so the
/// prior is N(mean(y), var(y)) in the original units with unit signal variance
/// in the standardized ones.
class GpModel {
 public:
  GpModel(GpModel&&) noexcept;
  GpModel& operator=(GpModel&&) noexcept;
  ~GpModel();

  /// Fits with the best length scale from `options.length_scale_grid`.
  /// Throws DomainError without data, NumericalError if every grid entry fails.
  static GpModel fit(std::span<const Observation> samples, const SearchSpace& space,
                     const GpOptions& options = {});

  /// Fits with a fixed length scale.
  static GpModel fit_with_length_scale(std::span<const Observation> samples,
                                       const SearchSpace& space, double length_scale,
                                       double noise_variance, double jitter = 1e-6,
                                       double max_jitter = 1e-3);

  Posterior posterior(const Configuration& c) const;
  std::vector<Posterior> posterior(std::span<const Configuration> queries) const;

  double length_scale() const;
  double noise_variance() const;
  /// Jitter that made the covariance factorizable.
  double jitter() const;
  double log_marginal_likelihood() const;
  double prior_mean() const;
  double prior_variance() const;

  /// Unit-cube coordinates used by the kernel.
  static std::array<double, kDimensions> normalize(const SearchSpace& space,
                                                   const Configuration& c);

 private:
  struct State;
  explicit GpModel(std::unique_ptr<State> state);
  std::unique_ptr<State> state_;
};

/// Expected improvement for minimization:
/// (best - mean) * Phi(z) + sigma * phi(z), z = (best - mean) / sigma.
/// Returns max(0, best - mean) when the variance is zero.
double expected_improvement(double mean, double variance, double best_observed);

}  // namespace autotune
