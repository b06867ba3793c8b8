#include "autotune/forest.hpp"

#include <algorithm>
#include <bit>
#include <numeric>

#include "autotune/errors.hpp"

namespace autotune {

namespace {

double mean_of(std::span<const Observation> samples, std::span<const std::size_t> idx) {
  double mean = 0.0;
  std::size_t n = 0;
  for (std::size_t i : idx) {
    ++n;
    mean += (samples[i].runtime - mean) / static_cast<double>(n);
  }
  return mean;
}

struct Split {
  int feature = -1;
  int threshold = 0;
  double score = 0.0;
};

class TreeBuilder {
 public:
  TreeBuilder(std::span<const Observation> samples, const ForestOptions& options, Rng& rng,
              std::vector<RegressionTree::Node>& nodes)
      : samples_(samples), options_(options), rng_(rng), nodes_(nodes) {}

  std::int32_t build(std::vector<std::size_t>& idx, int depth) {
    const auto node_id = static_cast<std::int32_t>(nodes_.size());
    nodes_.push_back({});
    nodes_[node_id].value = mean_of(samples_, idx);

    if (idx.size() < 2) return node_id;
    if (options_.max_depth > 0 && depth >= options_.max_depth) return node_id;
    const auto [lo, hi] = std::minmax_element(idx.begin(), idx.end(), [&](auto a, auto b) {
      return samples_[a].runtime < samples_[b].runtime;
    });
    if (samples_[*lo].runtime == samples_[*hi].runtime) return node_id;

    const Split split = find_split(idx);
    if (split.feature < 0) return node_id;

    std::vector<std::size_t> left;
    std::vector<std::size_t> right;
    for (std::size_t i : idx) {
      (samples_[i].config[static_cast<std::size_t>(split.feature)] <= split.threshold ? left : right)
          .push_back(i);
    }
    idx.clear();
    idx.shrink_to_fit();

    nodes_[node_id].feature = split.feature;
    nodes_[node_id].threshold = split.threshold;
    const std::int32_t l = build(left, depth + 1);
    const std::int32_t r = build(right, depth + 1);
    nodes_[node_id].left = l;
    nodes_[node_id].right = r;
    return node_id;
  }

 private:
  Split find_split(std::vector<std::size_t>& idx) {
    std::array<int, kDimensions> features{};
    std::iota(features.begin(), features.end(), 0);
    for (std::size_t i = kDimensions - 1; i > 0; --i) {
      const auto j = static_cast<std::size_t>(rng_.uniform_int(0, static_cast<std::int64_t>(i)));
      std::swap(features[i], features[j]);
    }

    const auto subset = static_cast<std::size_t>(
        std::clamp(options_.feature_subset_size, 1, static_cast<int>(kDimensions)));
    Split best;
    for (std::size_t k = 0; k < kDimensions; ++k) {
      // Keep looking past the subset only while no feature could split.
      if (k >= subset && best.feature >= 0) break;
      evaluate_feature(idx, features[k], best);
    }
    return best;
  }

  void evaluate_feature(std::vector<std::size_t>& idx, int feature, Split& best) {
    const auto f = static_cast<std::size_t>(feature);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
      const int va = samples_[a].config[f];
      const int vb = samples_[b].config[f];
      return va != vb ? va < vb : a < b;
    });

    double total = 0.0;
    for (std::size_t i : idx) total += samples_[i].runtime;
    const auto n = static_cast<double>(idx.size());

    double left_sum = 0.0;
    for (std::size_t k = 0; k + 1 < idx.size(); ++k) {
      left_sum += samples_[idx[k]].runtime;
      const int v = samples_[idx[k]].config[f];
      if (v == samples_[idx[k + 1]].config[f]) continue;
      const double nl = static_cast<double>(k + 1);
      const double nr = n - nl;
      const double right_sum = total - left_sum;
      // Maximizing this is equivalent to maximizing the variance reduction.
      const double score = left_sum * left_sum / nl + right_sum * right_sum / nr;
      if (best.feature < 0 || score > best.score) best = {feature, v, score};
    }
  }

  std::span<const Observation> samples_;
  const ForestOptions& options_;
  Rng& rng_;
  std::vector<RegressionTree::Node>& nodes_;
};

}  // namespace

RegressionTree RegressionTree::fit(std::span<const Observation> samples,
                                   const ForestOptions& options, Rng& rng) {
  if (samples.empty()) throw DomainError("regression tree: no training samples");
  std::vector<std::size_t> idx(samples.size());
  if (options.bootstrap) {
    for (auto& i : idx) {
      i = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(samples.size()) - 1));
    }
  } else {
    std::iota(idx.begin(), idx.end(), std::size_t{0});
  }
  RegressionTree tree;
  TreeBuilder(samples, options, rng, tree.nodes_).build(idx, 0);
  return tree;
}

double RegressionTree::predict(const Configuration& c) const {
  std::int32_t i = 0;
  while (nodes_[static_cast<std::size_t>(i)].feature >= 0) {
    const Node& node = nodes_[static_cast<std::size_t>(i)];
    i = c[static_cast<std::size_t>(node.feature)] <= node.threshold ? node.left : node.right;
  }
  return nodes_[static_cast<std::size_t>(i)].value;
}

int RegressionTree::depth() const {
  int deepest = 0;
  std::vector<std::pair<std::int32_t, int>> stack{{0, 0}};
  while (!stack.empty()) {
    const auto [i, d] = stack.back();
    stack.pop_back();
    const Node& node = nodes_[static_cast<std::size_t>(i)];
    if (node.feature < 0) {
      deepest = std::max(deepest, d);
    } else {
      stack.push_back({node.left, d + 1});
      stack.push_back({node.right, d + 1});
    }
  }
  return deepest;
}

std::size_t RegressionTree::leaf_count() const {
  return static_cast<std::size_t>(
      std::count_if(nodes_.begin(), nodes_.end(), [](const Node& n) { return n.feature < 0; }));
}

void RegressionTree::for_each_leaf(const Box& bounds,
                                   const std::function<void(const Box&, double)>& visit) const {
  std::vector<std::pair<std::int32_t, Box>> stack{{0, bounds}};
  while (!stack.empty()) {
    auto [i, box] = stack.back();
    stack.pop_back();
    const Node& node = nodes_[static_cast<std::size_t>(i)];
    if (node.feature < 0) {
      visit(box, node.value);
      continue;
    }
    const auto f = static_cast<std::size_t>(node.feature);
    Box left = box;
    left[f].hi = std::min(left[f].hi, node.threshold);
    Box right = box;
    right[f].lo = std::max(right[f].lo, node.threshold + 1);
    if (right[f].lo <= right[f].hi) stack.push_back({node.right, right});
    if (left[f].lo <= left[f].hi) stack.push_back({node.left, left});
  }
}

ForestModel::ForestModel(std::vector<RegressionTree> trees, ForestOptions options)
    : trees_(std::move(trees)), options_(options) {
  if (trees_.empty()) throw DomainError("forest: at least one tree required");
  options_.trees = static_cast<int>(trees_.size());
}

ForestModel ForestModel::fit(std::span<const Observation> samples, const ForestOptions& options,
                             Rng& rng) {
  if (samples.size() < 2) throw DomainError("forest: at least two training samples required");
  if (options.trees < 1) throw DomainError("forest: trees must be >= 1");
  ForestModel model;
  model.options_ = options;
  model.trees_.reserve(static_cast<std::size_t>(options.trees));
  for (int t = 0; t < options.trees; ++t) {
    Rng tree_rng(rng.next_u64());
    model.trees_.push_back(RegressionTree::fit(samples, options, tree_rng));
  }
  return model;
}

double ForestModel::predict(const Configuration& c) const {
  double mean = 0.0;
  std::size_t n = 0;
  for (const auto& tree : trees_) {
    ++n;
    mean += (tree.predict(c) - mean) / static_cast<double>(n);
  }
  return mean;
}

std::vector<double> ForestModel::predict_box(const SearchSpace& space) const {
  // Difference array over the padded box: each leaf region adds its value at
  // the 2^6 corners with alternating signs, and six prefix-sum passes turn the
  // corners back into per-point sums.
  std::array<std::size_t, kDimensions> padded{};
  std::array<std::size_t, kDimensions> stride{};
  for (std::size_t d = 0; d < kDimensions; ++d) {
    padded[d] = static_cast<std::size_t>(space.range(d).size()) + 1;
  }
  stride[kDimensions - 1] = 1;
  for (std::size_t d = kDimensions - 1; d > 0; --d) stride[d - 1] = stride[d] * padded[d];
  const std::size_t padded_total = stride[0] * padded[0];
  std::vector<double> diff(padded_total, 0.0);

  RegressionTree::Box bounds;
  for (std::size_t d = 0; d < kDimensions; ++d) bounds[d] = space.range(d);
  for (const auto& tree : trees_) {
    tree.for_each_leaf(bounds, [&](const RegressionTree::Box& box, double value) {
      for (unsigned mask = 0; mask < (1u << kDimensions); ++mask) {
        std::size_t index = 0;
        for (std::size_t d = 0; d < kDimensions; ++d) {
          const int coord = (mask >> d) & 1u ? box[d].hi + 1 : box[d].lo;
          index += static_cast<std::size_t>(coord - bounds[d].lo) * stride[d];
        }
        diff[index] += std::popcount(mask) % 2 ? -value : value;
      }
    });
  }

  for (std::size_t d = 0; d < kDimensions; ++d) {
    const std::size_t outer = padded_total / (stride[d] * padded[d]);
    for (std::size_t o = 0; o < outer; ++o) {
      double* block = diff.data() + o * stride[d] * padded[d];
      for (std::size_t c = 1; c < padded[d]; ++c) {
        double* row = block + c * stride[d];
        const double* prev = row - stride[d];
        for (std::size_t j = 0; j < stride[d]; ++j) row[j] += prev[j];
      }
    }
  }

  const double inv_trees = 1.0 / static_cast<double>(trees_.size());
  std::vector<double> out;
  out.reserve(space.total_size());
  std::array<std::size_t, kDimensions> coord{};
  const std::uint64_t total = space.total_size();
  for (std::uint64_t i = 0; i < total; ++i) {
    std::size_t index = 0;
    for (std::size_t d = 0; d < kDimensions; ++d) index += coord[d] * stride[d];
    out.push_back(diff[index] * inv_trees);
    for (std::size_t d = kDimensions; d-- > 0;) {
      if (++coord[d] < padded[d] - 1) break;
      coord[d] = 0;
    }
  }
  return out;
}

}  // namespace autotune
