#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "sparcs/data/dataset.hpp"
#include "sparcs/tree/regression_tree.hpp"

namespace sparcs::tree {

struct TreeConfig {
  int max_depth = 10;
  std::size_t min_leaf = 20;
};

// Splits whose SSE reduction is at or below this fraction of the node SSE
// are treated as zero gain.
inline constexpr double kRelativeGainFloor = 1e-12;

// Read-only column-major view of the features a tree is grown on.
class FeatureColumns {
 public:
  explicit FeatureColumns(const data::Dataset& dataset);
  FeatureColumns(std::vector<std::span<const double>> columns, std::size_t rows);

  std::size_t feature_count() const { return columns_.size(); }
  std::size_t row_count() const { return rows_; }
  double operator()(std::size_t row, std::size_t feature) const { return columns_[feature][row]; }
  std::span<const double> column(std::size_t feature) const { return columns_[feature]; }

 private:
  std::vector<std::span<const double>> columns_;
  std::size_t rows_ = 0;
};

// For every feature, the participating row ids ordered by feature value
// (ties by row id). Presorting once lets every node's split scan run in
// linear time; subsets (CV folds) are derived by filtering.
class SortedIndex {
 public:
  // All rows of `columns`.
  explicit SortedIndex(const FeatureColumns& columns);

  // Rows with keep[row] != 0, preserving the per-feature order.
  SortedIndex subset(std::span<const char> keep) const;

  std::size_t feature_count() const { return order_.size(); }
  std::size_t size() const { return order_.empty() ? 0 : order_[0].size(); }
  const std::vector<std::uint32_t>& order(std::size_t feature) const { return order_[feature]; }

 private:
  SortedIndex() = default;
  std::vector<std::vector<std::uint32_t>> order_;
};

// Exact greedy CART on the rows in `rows`. `target` is indexed by row id.
// At each node every (feature, midpoint threshold) is scored by SSE
// reduction; ties go to the lowest feature index, then the lowest threshold.
// Growth stops at max_depth, when a node has fewer than 2 * min_leaf rows or
// constant target, or when the best gain is not positive.
RegressionTree fit_tree(const FeatureColumns& columns, std::span<const double> target,
                        const SortedIndex& rows, const TreeConfig& cfg);

// Convenience overload over every row of a Dataset. Throws DataError on an
// empty dataset or when row_count < 2 * min_leaf.
RegressionTree fit_tree(const data::Dataset& dataset, const TreeConfig& cfg);

}  // namespace sparcs::tree
