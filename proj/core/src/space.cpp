#include "autotune/space.hpp"

#include <sstream>

#include "autotune/errors.hpp"

namespace autotune {

std::string to_string(const Configuration& c) {
  std::ostringstream out;
  out << '(';
  for (std::size_t d = 0; d < kDimensions; ++d) {
    if (d) out << ',';
    out << c[d];
  }
  out << ')';
  return out.str();
}

SearchSpace::SearchSpace()
    : SearchSpace({kDefaultThreadRange, kDefaultThreadRange, kDefaultThreadRange,
                   kDefaultWorkgroupRange, kDefaultWorkgroupRange, kDefaultWorkgroupRange},
                  kDefaultConstraintLimit) {}

SearchSpace::SearchSpace(const std::array<IntRange, kDimensions>& ranges,
                         std::int64_t constraint_limit)
    : ranges_(ranges), constraint_limit_(constraint_limit) {
  for (std::size_t d = 0; d < kDimensions; ++d) {
    if (ranges_[d].size() < 1) {
      throw DomainError("search space: empty range for " + std::string(kDimensionNames[d]));
    }
    if (ranges_[d].lo < 1) {
      throw DomainError("search space: range for " + std::string(kDimensionNames[d]) +
                        " must start at 1 or above");
    }
  }
  const std::int64_t smallest = std::int64_t{ranges_[3].lo} * ranges_[4].lo * ranges_[5].lo;
  if (smallest > constraint_limit_) {
    throw DomainError("search space: constraint limit " + std::to_string(constraint_limit_) +
                      " excludes every configuration");
  }
}

SearchSpace SearchSpace::uniform(IntRange thread, IntRange workgroup,
                                 std::int64_t constraint_limit) {
  return SearchSpace({thread, thread, thread, workgroup, workgroup, workgroup}, constraint_limit);
}

std::uint64_t SearchSpace::total_size() const {
  std::uint64_t n = 1;
  for (const auto& r : ranges_) n *= static_cast<std::uint64_t>(r.size());
  return n;
}

bool SearchSpace::contains(const Configuration& c) const {
  for (std::size_t d = 0; d < kDimensions; ++d) {
    if (!ranges_[d].contains(c[d])) return false;
  }
  return true;
}

bool SearchSpace::is_valid(const Configuration& c) const {
  if (!contains(c)) {
    throw DomainError("configuration " + to_string(c) + " lies outside the search space");
  }
  return satisfies_constraint(c);
}

std::vector<Configuration> SearchSpace::enumerate_valid() const {
  std::vector<Configuration> out;
  out.reserve(count_valid());
  const std::uint64_t n = total_size();
  for (std::uint64_t i = 0; i < n; ++i) {
    Configuration c = box_at(i);
    if (satisfies_constraint(c)) out.push_back(c);
  }
  return out;
}

std::uint64_t SearchSpace::count_valid() const {
  std::uint64_t workgroups = 0;
  for (int a = ranges_[3].lo; a <= ranges_[3].hi; ++a) {
    for (int b = ranges_[4].lo; b <= ranges_[4].hi; ++b) {
      for (int c = ranges_[5].lo; c <= ranges_[5].hi; ++c) {
        if (std::int64_t{a} * b * c <= constraint_limit_) ++workgroups;
      }
    }
  }
  return workgroups * static_cast<std::uint64_t>(ranges_[0].size()) * ranges_[1].size() *
         ranges_[2].size();
}

Configuration SearchSpace::sample_uniform(Rng& rng, bool constrained) const {
  for (;;) {
    Configuration c;
    for (std::size_t d = 0; d < kDimensions; ++d) {
      c[d] = static_cast<int>(rng.uniform_int(ranges_[d].lo, ranges_[d].hi));
    }
    if (!constrained || satisfies_constraint(c)) return c;
  }
}

std::uint64_t SearchSpace::box_index(const Configuration& c) const {
  std::uint64_t index = 0;
  for (std::size_t d = 0; d < kDimensions; ++d) {
    index = index * static_cast<std::uint64_t>(ranges_[d].size()) +
            static_cast<std::uint64_t>(c[d] - ranges_[d].lo);
  }
  return index;
}

Configuration SearchSpace::box_at(std::uint64_t index) const {
  Configuration c;
  for (std::size_t k = kDimensions; k-- > 0;) {
    const auto size = static_cast<std::uint64_t>(ranges_[k].size());
    c[k] = ranges_[k].lo + static_cast<int>(index % size);
    index /= size;
  }
  return c;
}

}  // namespace autotune
