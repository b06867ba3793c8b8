#include "autotune/parzen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "autotune/errors.hpp"

namespace autotune {

std::size_t parzen_good_count(std::size_t n, double gamma) {
  // The epsilon keeps products like 0.15 * 20 from rounding up a whole unit.
  auto good = static_cast<std::size_t>(std::ceil(gamma * static_cast<double>(n) - 1e-9));
  return std::clamp<std::size_t>(good, 1, n - 1);
}

namespace {

std::vector<double> density(std::span<const Observation> history,
                            std::span<const std::size_t> members, std::size_t dim,
                            const IntRange& range, double prior_weight) {
  const auto bins = static_cast<std::size_t>(range.size());
  std::vector<double> counts(bins, 0.0);
  for (std::size_t i : members) {
    counts[static_cast<std::size_t>(history[i].config[dim] - range.lo)] += 1.0;
  }
  const double n = static_cast<double>(members.size());
  const double uniform = 1.0 / static_cast<double>(bins);
  for (auto& c : counts) c = (1.0 - prior_weight) * (c / n) + prior_weight * uniform;
  return counts;
}

}  // namespace

ParzenPair parzen_fit(std::span<const Observation> history, const SearchSpace& space, double gamma,
                      double prior_weight) {
  if (history.size() < 2) throw DomainError("parzen: at least two observations required");
  if (!(gamma > 0.0 && gamma < 1.0)) throw DomainError("parzen: gamma must lie in (0, 1)");
  if (!(prior_weight > 0.0 && prior_weight <= 1.0)) {
    throw DomainError("parzen: prior weight must lie in (0, 1]");
  }

  std::vector<std::size_t> order(history.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return history[a].runtime < history[b].runtime;
  });
  const std::size_t n_good = parzen_good_count(history.size(), gamma);
  const std::span<const std::size_t> good(order.data(), n_good);
  const std::span<const std::size_t> bad(order.data() + n_good, order.size() - n_good);

  ParzenPair pair;
  pair.gamma = gamma;
  pair.prior_weight = prior_weight;
  pair.good_count = good.size();
  pair.bad_count = bad.size();
  for (std::size_t d = 0; d < kDimensions; ++d) {
    pair.range_lo[d] = space.range(d).lo;
    pair.good[d] = density(history, good, d, space.range(d), prior_weight);
    pair.bad[d] = density(history, bad, d, space.range(d), prior_weight);
  }
  return pair;
}

double parzen_score(const ParzenPair& pair, const Configuration& c) {
  double ratio = 1.0;
  for (std::size_t d = 0; d < kDimensions; ++d) {
    ratio *= pair.good_density(d, c[d]) / pair.bad_density(d, c[d]);
  }
  return ratio;
}

Configuration parzen_sample_good(const ParzenPair& pair, Rng& rng) {
  Configuration c;
  for (std::size_t d = 0; d < kDimensions; ++d) {
    const auto& weights = pair.good[d];
    const double u = rng.uniform01();
    double acc = 0.0;
    std::size_t bin = weights.size() - 1;
    for (std::size_t k = 0; k < weights.size(); ++k) {
      acc += weights[k];
      if (u < acc) {
        bin = k;
        break;
      }
    }
    c[d] = pair.range_lo[d] + static_cast<int>(bin);
  }
  return c;
}

}  // namespace autotune
