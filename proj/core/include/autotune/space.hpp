#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "autotune/rng.hpp"

namespace autotune {

inline constexpr std::size_t kDimensions = 6;
inline constexpr std::array<std::string_view, kDimensions> kDimensionNames{
    "xt", "yt", "zt", "xw", "yw", "zw"};

/// One point of the tuning space: three thread-coarsening factors followed by
/// three work-group sizes. Ordering is lexicographic over (xt, ..., zw).
struct Configuration {
  std::array<int, kDimensions> values{1, 1, 1, 1, 1, 1};

  constexpr Configuration() = default;
  constexpr Configuration(int xt, int yt, int zt, int xw, int yw, int zw)
      : values{xt, yt, zt, xw, yw, zw} {}

  constexpr int operator[](std::size_t dim) const { return values[dim]; }
  constexpr int& operator[](std::size_t dim) { return values[dim]; }

  constexpr int xt() const { return values[0]; }
  constexpr int yt() const { return values[1]; }
  constexpr int zt() const { return values[2]; }
  constexpr int xw() const { return values[3]; }
  constexpr int yw() const { return values[4]; }
  constexpr int zw() const { return values[5]; }

  constexpr std::int64_t thread_product() const {
    return std::int64_t{values[0]} * values[1] * values[2];
  }
  constexpr std::int64_t workgroup_product() const {
    return std::int64_t{values[3]} * values[4] * values[5];
  }

  friend constexpr auto operator<=>(const Configuration&, const Configuration&) = default;
};

std::string to_string(const Configuration& c);

/// Inclusive integer interval.
struct IntRange {
  int lo = 1;
  int hi = 1;

  constexpr int size() const { return hi - lo + 1; }
  constexpr bool contains(int v) const { return v >= lo && v <= hi; }
  friend constexpr bool operator==(const IntRange&, const IntRange&) = default;
};

/// Box of six integer ranges plus an upper bound on the work-group product.
class SearchSpace {
 public:
  static constexpr IntRange kDefaultThreadRange{1, 16};
  static constexpr IntRange kDefaultWorkgroupRange{1, 8};
  static constexpr std::int64_t kDefaultConstraintLimit = 256;

  /// Default space: threads [1,16]^3, work groups [1,8]^3, limit 256.
  SearchSpace();

  /// Throws DomainError when a range is empty or no configuration can satisfy
  /// the constraint.
  SearchSpace(const std::array<IntRange, kDimensions>& ranges, std::int64_t constraint_limit);

  /// Same range for the three thread dims and for the three work-group dims.
  static SearchSpace uniform(IntRange thread, IntRange workgroup,
                             std::int64_t constraint_limit = kDefaultConstraintLimit);

  const IntRange& range(std::size_t dim) const { return ranges_[dim]; }
  const std::array<IntRange, kDimensions>& ranges() const { return ranges_; }
  std::int64_t constraint_limit() const { return constraint_limit_; }

  /// Cardinality of the box, ignoring the constraint.
  std::uint64_t total_size() const;

  bool contains(const Configuration& c) const;

  /// Work-group product bound only; no range check.
  bool satisfies_constraint(const Configuration& c) const {
    return c.workgroup_product() <= constraint_limit_;
  }

  /// Throws DomainError if `c` lies outside the box.
  bool is_valid(const Configuration& c) const;

  /// All valid configurations, xt slowest and zw fastest.
  std::vector<Configuration> enumerate_valid() const;

  /// Number of valid configurations, counted without materializing them.
  std::uint64_t count_valid() const;

  /// Uniform over the valid set (rejection) when `constrained`, else over the box.
  Configuration sample_uniform(Rng& rng, bool constrained) const;

  /// Position of `c` in the lexicographic enumeration of the whole box.
  std::uint64_t box_index(const Configuration& c) const;
  Configuration box_at(std::uint64_t index) const;

  friend bool operator==(const SearchSpace&, const SearchSpace&) = default;

 private:
  std::array<IntRange, kDimensions> ranges_;
  std::int64_t constraint_limit_;
};

}  // namespace autotune
