#pragma once

#include <array>
#include <span>
#include <vector>

#include "autotune/observation.hpp"
#include "autotune/rng.hpp"
#include "autotune/space.hpp"

namespace autotune {

inline constexpr double kDefaultTpeGamma = 0.15;
inline constexpr double kDefaultTpePriorWeight = 0.25;

/// Per-dimension categorical densities of the good (lowest runtime) and bad
/// observations. Each density is a mixture of the empirical histogram and a
/// uniform prior over the dimension's range, so every bin is positive.
struct ParzenPair {
  double gamma = kDefaultTpeGamma;
  double prior_weight = kDefaultTpePriorWeight;
  std::size_t good_count = 0;
  std::size_t bad_count = 0;
  std::array<int, kDimensions> range_lo{};
  std::array<std::vector<double>, kDimensions> good;
  std::array<std::vector<double>, kDimensions> bad;

  double good_density(std::size_t dim, int value) const {
    return good[dim][static_cast<std::size_t>(value - range_lo[dim])];
  }
  double bad_density(std::size_t dim, int value) const {
    return bad[dim][static_cast<std::size_t>(value - range_lo[dim])];
  }
};

/// Number of observations in the good set: ceil(gamma * n), clamped to [1, n-1].
std::size_t parzen_good_count(std::size_t n, double gamma);

/// Splits `history` by runtime (stable, ascending) and builds both densities.
/// Throws DomainError for fewer than two observations or gamma outside (0,1).
ParzenPair parzen_fit(std::span<const Observation> history, const SearchSpace& space,
                      double gamma = kDefaultTpeGamma,
                      double prior_weight = kDefaultTpePriorWeight);

/// Product over dimensions of good_density / bad_density.
double parzen_score(const ParzenPair& pair, const Configuration& c);

/// Draws each dimension independently from the good density.
Configuration parzen_sample_good(const ParzenPair& pair, Rng& rng);

}  // namespace autotune
