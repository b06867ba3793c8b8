#pragma once

#include <cstddef>
#include <span>
#include <utility>

namespace autotune::stats {

enum class Alternative { less, greater, two_sided };
enum class MwuMethod { automatic, exact, normal_approx };

struct TestResult {
  /// U statistic of the first sample: pairs with a > b plus half the ties.
  double u_statistic = 0.0;
  double p_value = 1.0;
  Alternative alternative = Alternative::two_sided;
  MwuMethod method = MwuMethod::exact;
};

/// Largest combined sample size for which the automatic method enumerates the
/// exact null distribution.
inline constexpr std::size_t kExactMwuLimit = 16;

/// Mann-Whitney U test of `a` against `b`. `less` tests whether `a` tends to
/// be smaller than `b`.
///
/// The automatic method is exact when the combined size is at most
/// kExactMwuLimit, and otherwise uses the normal approximation with a tie
/// corrected variance and a 0.5 continuity correction. Without ties the exact
/// distribution comes from the standard counting recursion; with ties it is
/// enumerated over all label assignments of the observed values.
/// Throws DomainError on an empty sample.
TestResult mann_whitney_u(std::span<const double> a, std::span<const double> b,
                          Alternative alternative, MwuMethod method = MwuMethod::automatic);

/// P(A > B) + 0.5 P(A = B) over all pairs, computed exactly from pair counts.
double cles(std::span<const double> a, std::span<const double> b);

/// Average of the two middle order statistics for even counts.
double median(std::span<const double> values);

/// 100 * optimum / median(runtimes). Throws DomainError for optimum <= 0.
double percent_of_optimum(std::span<const double> runtimes, double optimum);

/// median(rs) / median(alg).
double median_speedup(std::span<const double> alg, std::span<const double> rs);

double mean(std::span<const double> values);

/// Student-t interval for the mean. Throws DomainError for fewer than two values.
std::pair<double, double> confidence_interval(std::span<const double> values, double level = 0.95);

/// Standard normal CDF.
double normal_cdf(double z);

}  // namespace autotune::stats
