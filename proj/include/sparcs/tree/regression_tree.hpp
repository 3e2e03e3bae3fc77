#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <json.hpp>

#include "sparcs/data/dataset.hpp"

namespace sparcs::tree {

// Internal nodes route value <= threshold to `left`. Leaves have feature == -1
// and predict `value`, the mean training target routed to them. `gain` is
// the SSE reduction achieved by an internal node's split.
struct TreeNode {
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;
  std::size_t count = 0;
  double gain = 0.0;

  bool is_leaf() const { return feature < 0; }
};

class RegressionTree {
 public:
  RegressionTree() = default;
  // Validates that node 0 is the root, every non-root node has exactly one
  // parent, children come after their parent, and depth <= max_depth.
  RegressionTree(std::vector<TreeNode> nodes, int max_depth, std::size_t feature_count);

  // Throws DataError when row.size() != feature_count().
  double predict(std::span<const double> row) const;
  std::vector<double> predict(const data::Dataset& dataset) const;

  const std::vector<TreeNode>& nodes() const { return nodes_; }
  int max_depth() const { return max_depth_; }
  std::size_t feature_count() const { return feature_count_; }
  int depth() const;
  std::size_t leaf_count() const;

  // The same tree with every node at `depth` turned into a leaf (depth <=
  // max_depth). Greedy
  // growth is top-down, so this equals refitting with max_depth = depth.
  RegressionTree truncated(int depth) const;

  // {"max_depth", "feature_count", "node_fields", "nodes": [[feature,
  // threshold, left, right, value, count, gain], ...]}. Doubles are written
  // in shortest round-trip form, so predictions survive a round trip bit for
  // bit.
  nlohmann::json to_json() const;
  static RegressionTree from_json(const nlohmann::json& j);

 private:
  double predict_unchecked(const double* row) const;

  std::vector<TreeNode> nodes_;
  int max_depth_ = 0;
  std::size_t feature_count_ = 0;
};

}  // namespace sparcs::tree
