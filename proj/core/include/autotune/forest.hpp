#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "autotune/observation.hpp"
#include "autotune/rng.hpp"
#include "autotune/space.hpp"

namespace autotune {

struct ForestOptions {
  int trees = 100;
  /// Maximum tree depth; 0 or negative means unlimited.
  int max_depth = 10;
  /// Features examined per split. If none of them can split the node, the
  /// remaining features are examined as well.
  int feature_subset_size = 2;
  bool bootstrap = true;
};

/// CART regression tree over integer features. A split sends x[feature] <=
/// threshold left.
class RegressionTree {
 public:
  struct Node {
    int feature = -1;  // -1 marks a leaf
    int threshold = 0;
    std::int32_t left = -1;
    std::int32_t right = -1;
    double value = 0.0;
  };

  /// Inclusive per-dimension bounds of a leaf region.
  using Box = std::array<IntRange, kDimensions>;

  static RegressionTree fit(std::span<const Observation> samples, const ForestOptions& options,
                            Rng& rng);

  double predict(const Configuration& c) const;

  /// Depth of the deepest leaf; a single-leaf tree has depth 0.
  int depth() const;
  std::size_t leaf_count() const;
  const std::vector<Node>& nodes() const { return nodes_; }

  /// Visits every leaf whose region intersects `bounds`, clipped to it.
  void for_each_leaf(const Box& bounds, const std::function<void(const Box&, double)>& visit) const;

 private:
  std::vector<Node> nodes_;
};

/// Bagged ensemble of regression trees with random feature subsets.
class ForestModel {
 public:
  /// Throws DomainError for fewer than two samples.
  static ForestModel fit(std::span<const Observation> samples, const ForestOptions& options,
                         Rng& rng);

  /// Builds a forest from already fitted trees.
  explicit ForestModel(std::vector<RegressionTree> trees, ForestOptions options = {});

  /// Mean of the per-tree predictions.
  double predict(const Configuration& c) const;

  /// Predictions for every point of the box of `space` in box_index order,
  /// including points that violate the constraint. Uses a summed difference
  /// array over the leaf regions, so the cost is independent of the number
  /// of trees times the box size.
  std::vector<double> predict_box(const SearchSpace& space) const;

  const std::vector<RegressionTree>& trees() const { return trees_; }
  const ForestOptions& options() const { return options_; }

 private:
  ForestModel() = default;

  std::vector<RegressionTree> trees_;
  ForestOptions options_;
};

}  // namespace autotune
