#include "autotune/stats.hpp"

#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <numeric>
#include <vector>

#include "autotune/errors.hpp"

namespace autotune::stats {

namespace {

void require_nonempty(std::span<const double> a, std::span<const double> b, const char* what) {
  if (a.empty() || b.empty()) throw DomainError(std::string(what) + ": empty sample");
}

// Average ranks (1-based) of the pooled sample; also returns the tie term
// sum(t^3 - t) over groups of tied values.
std::vector<double> pooled_ranks(std::span<const double> pooled, double& tie_term) {
  const std::size_t n = pooled.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t x, std::size_t y) { return pooled[x] < pooled[y]; });
  std::vector<double> ranks(n);
  tie_term = 0.0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && pooled[order[j + 1]] == pooled[order[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
    const auto t = static_cast<double>(j - i + 1);
    tie_term += t * t * t - t;
    i = j + 1;
  }
  return ranks;
}

struct Tails {
  double less;
  double greater;
};

// Exact null distribution of U without ties: number of arrangements of n
// a-labels and m b-labels with U = u, by the recursion
// c(n, m, u) = c(n-1, m, u-m) + c(n, m-1, u).
Tails exact_untied(std::size_t n, std::size_t m, double u_obs) {
  const std::size_t max_u = n * m;
  // table[i][j] is the count vector for (i, j).
  std::vector<std::vector<std::vector<double>>> table(
      n + 1, std::vector<std::vector<double>>(m + 1));
  for (std::size_t i = 0; i <= n; ++i) {
    for (std::size_t j = 0; j <= m; ++j) {
      auto& counts = table[i][j];
      counts.assign(i * j + 1, 0.0);
      if (i == 0 || j == 0) {
        counts[0] = 1.0;
        continue;
      }
      const auto& with_a_last = table[i - 1][j];  // largest value is an a: adds j
      const auto& with_b_last = table[i][j - 1];
      for (std::size_t u = 0; u < with_a_last.size(); ++u) counts[u + j] += with_a_last[u];
      for (std::size_t u = 0; u < with_b_last.size(); ++u) counts[u] += with_b_last[u];
    }
  }
  const auto& dist = table[n][m];
  const double total = std::accumulate(dist.begin(), dist.end(), 0.0);
  double less = 0.0;
  double greater = 0.0;
  for (std::size_t u = 0; u <= max_u; ++u) {
    const auto value = static_cast<double>(u);
    if (value <= u_obs) less += dist[u];
    if (value >= u_obs) greater += dist[u];
  }
  return {less / total, greater / total};
}

// Exact permutation distribution with ties: every choice of which pooled
// positions carry the a-label.
Tails exact_enumerated(std::span<const double> ranks, std::size_t n, double u_obs) {
  const std::size_t total_n = ranks.size();
  const double offset = static_cast<double>(n) * static_cast<double>(n + 1) / 2.0;
  std::vector<std::size_t> pick(n);
  std::iota(pick.begin(), pick.end(), std::size_t{0});
  double count = 0.0;
  double less = 0.0;
  double greater = 0.0;
  for (;;) {
    double rank_sum = 0.0;
    for (std::size_t p : pick) rank_sum += ranks[p];
    const double u = rank_sum - offset;
    count += 1.0;
    if (u <= u_obs) less += 1.0;
    if (u >= u_obs) greater += 1.0;

    std::size_t i = n;
    while (i > 0 && pick[i - 1] == total_n - n + (i - 1)) --i;
    if (i == 0) break;
    ++pick[i - 1];
    for (std::size_t k = i; k < n; ++k) pick[k] = pick[k - 1] + 1;
  }
  return {less / count, greater / count};
}

double binomial(std::size_t n, std::size_t k) {
  double r = 1.0;
  for (std::size_t i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  return r;
}

double pick_tail(const Tails& tails, Alternative alternative) {
  switch (alternative) {
    case Alternative::less:
      return std::min(1.0, tails.less);
    case Alternative::greater:
      return std::min(1.0, tails.greater);
    case Alternative::two_sided:
      return std::min(1.0, 2.0 * std::min(tails.less, tails.greater));
  }
  return 1.0;
}

}  // namespace

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

TestResult mann_whitney_u(std::span<const double> a, std::span<const double> b,
                          Alternative alternative, MwuMethod method) {
  require_nonempty(a, b, "mann_whitney_u");
  const std::size_t n = a.size();
  const std::size_t m = b.size();

  std::vector<double> pooled(a.begin(), a.end());
  pooled.insert(pooled.end(), b.begin(), b.end());
  double tie_term = 0.0;
  const std::vector<double> ranks = pooled_ranks(pooled, tie_term);
  const double rank_sum_a = std::accumulate(ranks.begin(), ranks.begin() + static_cast<std::ptrdiff_t>(n), 0.0);
  const double u = rank_sum_a - static_cast<double>(n) * static_cast<double>(n + 1) / 2.0;
  const bool ties = tie_term > 0.0;

  if (method == MwuMethod::automatic) {
    method = n + m <= kExactMwuLimit ? MwuMethod::exact : MwuMethod::normal_approx;
  }

  TestResult result;
  result.u_statistic = u;
  result.alternative = alternative;
  result.method = method;

  if (method == MwuMethod::exact) {
    Tails tails;
    if (!ties) {
      tails = exact_untied(n, m, u);
    } else {
      if (binomial(n + m, n) > 5e7) {
        throw DomainError("mann_whitney_u: exact test with ties is too large to enumerate");
      }
      tails = exact_enumerated(ranks, n, u);
    }
    result.p_value = pick_tail(tails, alternative);
    return result;
  }

  const double nn = static_cast<double>(n);
  const double mm = static_cast<double>(m);
  const double total = nn + mm;
  const double mu = nn * mm / 2.0;
  double var = nn * mm / 12.0 * ((total + 1.0) - tie_term / (total * (total - 1.0)));
  if (!(var > 0.0)) {
    result.p_value = 1.0;
    return result;
  }
  const double sd = std::sqrt(var);
  const Tails tails{normal_cdf((u - mu + 0.5) / sd), normal_cdf(-(u - mu - 0.5) / sd)};
  result.p_value = pick_tail(tails, alternative);
  return result;
}

double cles(std::span<const double> a, std::span<const double> b) {
  require_nonempty(a, b, "cles");
  std::vector<double> sorted_b(b.begin(), b.end());
  std::sort(sorted_b.begin(), sorted_b.end());
  std::uint64_t greater = 0;
  std::uint64_t equal = 0;
  for (double x : a) {
    const auto [lo, hi] = std::equal_range(sorted_b.begin(), sorted_b.end(), x);
    greater += static_cast<std::uint64_t>(lo - sorted_b.begin());
    equal += static_cast<std::uint64_t>(hi - lo);
  }
  const auto pairs = static_cast<double>(a.size()) * static_cast<double>(b.size());
  return (2.0 * static_cast<double>(greater) + static_cast<double>(equal)) / (2.0 * pairs);
}

double median(std::span<const double> values) {
  if (values.empty()) throw DomainError("median: empty sample");
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  const std::size_t mid = v.size() / 2;
  if (v.size() % 2) return v[mid];
  return v[mid - 1] + (v[mid] - v[mid - 1]) / 2.0;
}

double percent_of_optimum(std::span<const double> runtimes, double optimum) {
  if (!(optimum > 0.0)) throw DomainError("percent_of_optimum: optimum must be positive");
  return 100.0 * (optimum / median(runtimes));
}

double median_speedup(std::span<const double> alg, std::span<const double> rs) {
  require_nonempty(alg, rs, "median_speedup");
  return median(rs) / median(alg);
}

double mean(std::span<const double> values) {
  if (values.empty()) throw DomainError("mean: empty sample");
  double m = 0.0;
  std::size_t n = 0;
  for (double v : values) {
    ++n;
    m += (v - m) / static_cast<double>(n);
  }
  return m;
}

std::pair<double, double> confidence_interval(std::span<const double> values, double level) {
  if (values.size() < 2) throw DomainError("confidence_interval: at least two values required");
  if (!(level > 0.0 && level < 1.0)) throw DomainError("confidence_interval: level must lie in (0, 1)");
  const double m = mean(values);
  double ss = 0.0;
  for (double v : values) ss += (v - m) * (v - m);
  const auto n = static_cast<double>(values.size());
  const double sd = std::sqrt(ss / (n - 1.0));
  const boost::math::students_t dist(n - 1.0);
  const double t = boost::math::quantile(dist, 0.5 + level / 2.0);
  const double half = t * sd / std::sqrt(n);
  return {m - half, m + half};
}

}  // namespace autotune::stats
