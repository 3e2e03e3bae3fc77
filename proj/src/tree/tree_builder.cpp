#include "sparcs/tree/tree_builder.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "sparcs/common/errors.hpp"

namespace sparcs::tree {

FeatureColumns::FeatureColumns(const data::Dataset& dataset) : rows_(dataset.row_count()) {
  for (std::size_t f = 0; f < dataset.feature_count(); ++f) columns_.push_back(dataset.column(f));
}

FeatureColumns::FeatureColumns(std::vector<std::span<const double>> columns, std::size_t rows)
    : columns_(std::move(columns)), rows_(rows) {
  for (const auto& c : columns_) {
    if (c.size() != rows_) throw DataError("feature column length mismatch");
  }
}

SortedIndex::SortedIndex(const FeatureColumns& columns) {
  if (columns.row_count() > std::numeric_limits<std::uint32_t>::max()) {
    throw DataError("too many rows for a 32-bit row index");
  }
  order_.resize(columns.feature_count());
  for (std::size_t f = 0; f < columns.feature_count(); ++f) {
    auto& ord = order_[f];
    ord.resize(columns.row_count());
    std::iota(ord.begin(), ord.end(), std::uint32_t{0});
    const auto col = columns.column(f);
    std::stable_sort(ord.begin(), ord.end(),
                     [&](std::uint32_t a, std::uint32_t b) { return col[a] < col[b]; });
  }
}

SortedIndex SortedIndex::subset(std::span<const char> keep) const {
  SortedIndex out;
  out.order_.resize(order_.size());
  for (std::size_t f = 0; f < order_.size(); ++f) {
    auto& dst = out.order_[f];
    for (auto row : order_[f]) {
      if (keep[row]) dst.push_back(row);
    }
  }
  return out;
}

namespace {

struct SplitCandidate {
  int feature = -1;
  double threshold = 0.0;
  std::size_t left_count = 0;
  double gain = 0.0;
};

class Builder {
 public:
  Builder(const FeatureColumns& columns, std::span<const double> target, const SortedIndex& rows,
          const TreeConfig& cfg)
      : x_(columns), y_(target), cfg_(cfg), goes_left_(columns.row_count(), 0) {
    order_.reserve(rows.feature_count());
    for (std::size_t f = 0; f < rows.feature_count(); ++f) order_.push_back(rows.order(f));
    scratch_.resize(rows.size());
  }

  RegressionTree build() {
    grow(0, order_.empty() ? 0 : order_[0].size(), 0);
    return RegressionTree(std::move(nodes_), cfg_.max_depth, x_.feature_count());
  }

 private:
  int grow(std::size_t begin, std::size_t end, int depth) {
    const int index = static_cast<int>(nodes_.size());
    nodes_.emplace_back();

    const std::size_t n = end - begin;
    const auto& any_order = order_[0];
    double sum = 0.0;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (std::size_t i = begin; i < end; ++i) {
      const double y = y_[any_order[i]];
      sum += y;
      lo = std::min(lo, y);
      hi = std::max(hi, y);
    }
    const double mean = sum / static_cast<double>(n);
    nodes_[static_cast<std::size_t>(index)].value = mean;
    nodes_[static_cast<std::size_t>(index)].count = n;

    if (depth >= cfg_.max_depth || n < 2 * cfg_.min_leaf || lo == hi) return index;

    double node_sse = 0.0;
    for (std::size_t i = begin; i < end; ++i) {
      const double d = y_[any_order[i]] - mean;
      node_sse += d * d;
    }

    const SplitCandidate best = find_split(begin, end, sum);
    if (best.feature < 0 || !(best.gain > kRelativeGainFloor * node_sse)) return index;

    const auto& split_order = order_[static_cast<std::size_t>(best.feature)];
    for (std::size_t i = begin; i < end; ++i) goes_left_[split_order[i]] = i < begin + best.left_count;
    for (auto& ord : order_) partition(ord, begin, end);

    const std::size_t mid = begin + best.left_count;
    const int left = grow(begin, mid, depth + 1);
    const int right = grow(mid, end, depth + 1);
    auto& node = nodes_[static_cast<std::size_t>(index)];
    node.feature = best.feature;
    node.threshold = best.threshold;
    node.left = left;
    node.right = right;
    node.gain = best.gain;
    return index;
  }

  SplitCandidate find_split(std::size_t begin, std::size_t end, double total) const {
    SplitCandidate best;
    const std::size_t n = end - begin;
    const double parent_term = total * total / static_cast<double>(n);
    for (std::size_t f = 0; f < order_.size(); ++f) {
      const auto& ord = order_[f];
      const auto col = x_.column(f);
      double left_sum = 0.0;
      for (std::size_t i = begin; i + 1 < end; ++i) {
        left_sum += y_[ord[i]];
        const std::size_t n_left = i - begin + 1;
        const std::size_t n_right = n - n_left;
        const double v = col[ord[i]];
        const double v_next = col[ord[i + 1]];
        if (!(v < v_next) || n_left < cfg_.min_leaf || n_right < cfg_.min_leaf) continue;
        const double right_sum = total - left_sum;
        const double gain = left_sum * left_sum / static_cast<double>(n_left) +
                            right_sum * right_sum / static_cast<double>(n_right) - parent_term;
        if (gain > best.gain) {
          best = {static_cast<int>(f), 0.5 * (v + v_next), n_left, gain};
        }
      }
    }
    return best;
  }

  // Stable partition of ord[begin, end) by goes_left_.
  void partition(std::vector<std::uint32_t>& ord, std::size_t begin, std::size_t end) {
    std::size_t write = begin;
    std::size_t spill = 0;
    for (std::size_t i = begin; i < end; ++i) {
      const auto row = ord[i];
      if (goes_left_[row]) {
        ord[write++] = row;
      } else {
        scratch_[spill++] = row;
      }
    }
    std::copy(scratch_.begin(), scratch_.begin() + static_cast<std::ptrdiff_t>(spill),
              ord.begin() + static_cast<std::ptrdiff_t>(write));
  }

  const FeatureColumns& x_;
  std::span<const double> y_;
  TreeConfig cfg_;
  std::vector<std::vector<std::uint32_t>> order_;
  std::vector<std::uint32_t> scratch_;
  std::vector<char> goes_left_;
  std::vector<TreeNode> nodes_;
};

}  // namespace

RegressionTree fit_tree(const FeatureColumns& columns, std::span<const double> target,
                        const SortedIndex& rows, const TreeConfig& cfg) {
  if (rows.size() == 0) throw DataError("fit_tree: no rows");
  if (columns.feature_count() == 0) throw DataError("fit_tree: no features");
  if (target.size() != columns.row_count()) throw DataError("fit_tree: target length mismatch");
  if (cfg.max_depth < 0) throw std::invalid_argument("fit_tree: max_depth must be >= 0");
  if (cfg.min_leaf < 1) throw std::invalid_argument("fit_tree: min_leaf must be >= 1");
  return Builder(columns, target, rows, cfg).build();
}

RegressionTree fit_tree(const data::Dataset& dataset, const TreeConfig& cfg) {
  if (dataset.row_count() == 0) throw DataError("fit_tree: empty dataset");
  if (dataset.row_count() < 2 * cfg.min_leaf) {
    throw DataError("fit_tree: need at least 2 * min_leaf rows");
  }
  FeatureColumns columns(dataset);
  SortedIndex index(columns);
  return fit_tree(columns, dataset.target(), index, cfg);
}

}  // namespace sparcs::tree
