#include "sparcs/tree/regression_tree.hpp"

#include <algorithm>
#include <stdexcept>

#include "sparcs/common/errors.hpp"

namespace sparcs::tree {

RegressionTree::RegressionTree(std::vector<TreeNode> nodes, int max_depth, std::size_t feature_count)
    : nodes_(std::move(nodes)), max_depth_(max_depth), feature_count_(feature_count) {
  if (nodes_.empty()) throw DataError("regression tree needs at least one node");
  std::vector<int> parents(nodes_.size(), 0);
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const auto& n = nodes_[i];
    if (n.is_leaf()) continue;
    if (static_cast<std::size_t>(n.feature) >= feature_count_) {
      throw DataError("tree split on feature outside the schema");
    }
    for (int child : {n.left, n.right}) {
      if (child <= static_cast<int>(i) || static_cast<std::size_t>(child) >= nodes_.size()) {
        throw DataError("tree node has an invalid child index");
      }
      if (++parents[static_cast<std::size_t>(child)] > 1) throw DataError("tree node has two parents");
    }
  }
  for (std::size_t i = 1; i < nodes_.size(); ++i) {
    if (parents[i] != 1) throw DataError("tree node " + std::to_string(i) + " is detached");
  }
  if (depth() > max_depth_) throw DataError("tree deeper than its max_depth");
}

double RegressionTree::predict_unchecked(const double* row) const {
  const TreeNode* node = &nodes_[0];
  while (!node->is_leaf()) {
    node = &nodes_[static_cast<std::size_t>(
        row[node->feature] <= node->threshold ? node->left : node->right)];
  }
  return node->value;
}

double RegressionTree::predict(std::span<const double> row) const {
  if (row.size() != feature_count_) {
    throw DataError("row has " + std::to_string(row.size()) + " features, tree expects " +
                    std::to_string(feature_count_));
  }
  return predict_unchecked(row.data());
}

std::vector<double> RegressionTree::predict(const data::Dataset& dataset) const {
  if (dataset.feature_count() != feature_count_) throw DataError("dataset width differs from tree");
  std::vector<double> out(dataset.row_count());
  std::vector<double> row(feature_count_);
  for (std::size_t r = 0; r < dataset.row_count(); ++r) {
    dataset.row(r, row);
    out[r] = predict_unchecked(row.data());
  }
  return out;
}

int RegressionTree::depth() const {
  // Children always follow their parent, so one forward pass suffices.
  std::vector<int> level(nodes_.size(), 0);
  int deepest = 0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    deepest = std::max(deepest, level[i]);
    if (!nodes_[i].is_leaf()) {
      level[static_cast<std::size_t>(nodes_[i].left)] = level[i] + 1;
      level[static_cast<std::size_t>(nodes_[i].right)] = level[i] + 1;
    }
  }
  return deepest;
}

std::size_t RegressionTree::leaf_count() const {
  return static_cast<std::size_t>(
      std::count_if(nodes_.begin(), nodes_.end(), [](const TreeNode& n) { return n.is_leaf(); }));
}

namespace {

int copy_truncated(const std::vector<TreeNode>& src, int node, int depth, int limit,
                   std::vector<TreeNode>& out) {
  const int index = static_cast<int>(out.size());
  out.push_back(src[static_cast<std::size_t>(node)]);
  const TreeNode& s = src[static_cast<std::size_t>(node)];
  if (s.is_leaf()) return index;
  if (depth >= limit) {
    TreeNode& n = out[static_cast<std::size_t>(index)];
    n.feature = -1;
    n.threshold = 0.0;
    n.left = n.right = -1;
    n.gain = 0.0;
    return index;
  }
  const int left = copy_truncated(src, s.left, depth + 1, limit, out);
  const int right = copy_truncated(src, s.right, depth + 1, limit, out);
  out[static_cast<std::size_t>(index)].left = left;
  out[static_cast<std::size_t>(index)].right = right;
  return index;
}

}  // namespace

RegressionTree RegressionTree::truncated(int depth) const {
  if (depth < 0) throw std::invalid_argument("truncation depth must be >= 0");
  if (depth > max_depth_) throw std::invalid_argument("truncation depth exceeds the tree's max_depth");
  std::vector<TreeNode> out;
  out.reserve(nodes_.size());
  copy_truncated(nodes_, 0, 0, depth, out);
  return RegressionTree(std::move(out), depth, feature_count_);
}

nlohmann::json RegressionTree::to_json() const {
  nlohmann::json nodes = nlohmann::json::array();
  for (const auto& n : nodes_) {
    nodes.push_back({n.feature, n.threshold, n.left, n.right, n.value, n.count, n.gain});
  }
  return {
      {"max_depth", max_depth_},
      {"feature_count", feature_count_},
      {"node_fields", {"feature", "threshold", "left", "right", "value", "count", "gain"}},
      {"nodes", std::move(nodes)},
  };
}

RegressionTree RegressionTree::from_json(const nlohmann::json& j) {
  try {
    std::vector<TreeNode> nodes;
    for (const auto& rec : j.at("nodes")) {
      if (!rec.is_array() || rec.size() != 7) throw DataError("tree node record must have 7 fields");
      TreeNode n;
      n.feature = rec[0].get<int>();
      n.threshold = rec[1].get<double>();
      n.left = rec[2].get<int>();
      n.right = rec[3].get<int>();
      n.value = rec[4].get<double>();
      n.count = rec[5].get<std::size_t>();
      n.gain = rec[6].get<double>();
      nodes.push_back(n);
    }
    return RegressionTree(std::move(nodes), j.at("max_depth").get<int>(),
                          j.at("feature_count").get<std::size_t>());
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed tree JSON: ") + e.what());
  }
}

}  // namespace sparcs::tree
