#pragma once

// Recomputes boosted-tree split gains by replaying each tree on the training
// residuals it was fit to: gain = SSE(node) - SSE(left) - SSE(right), each
// SSE by a two-pass mean.

#include <cstddef>
#include <vector>

#include "sparcs/data/dataset.hpp"
#include "sparcs/tree/gbt.hpp"

namespace oracle {

inline long double sse_of(const std::vector<long double>& v) {
  if (v.empty()) return 0.0L;
  long double m = 0.0L;
  for (auto x : v) m += x;
  m /= static_cast<long double>(v.size());
  long double s = 0.0L;
  for (auto x : v) s += (x - m) * (x - m);
  return s;
}

inline std::vector<long double> replay_gains(const sparcs::tree::GbtEnsemble& ens,
                                             const sparcs::data::Dataset& ds) {
  const std::size_t n = ds.row_count();
  std::vector<long double> gains(ds.feature_count(), 0.0L);
  std::vector<long double> pred(n, ens.base_prediction());
  std::vector<std::vector<double>> rows(n);
  for (std::size_t r = 0; r < n; ++r) rows[r] = ds.row(r);
  for (const auto& tree : ens.trees()) {
    const auto& nodes = tree.nodes();
    std::vector<std::vector<long double>> at(nodes.size());
    for (std::size_t r = 0; r < n; ++r) {
      const long double resid = ds.target()[r] - pred[r];
      int i = 0;
      at[0].push_back(resid);
      while (!nodes[i].is_leaf()) {
        i = rows[r][nodes[i].feature] <= nodes[i].threshold ? nodes[i].left : nodes[i].right;
        at[i].push_back(resid);
      }
    }
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      if (nodes[i].is_leaf()) continue;
      gains[nodes[i].feature] += sse_of(at[i]) - sse_of(at[nodes[i].left]) - sse_of(at[nodes[i].right]);
    }
    for (std::size_t r = 0; r < n; ++r) pred[r] += ens.learning_rate() * tree.predict(rows[r]);
  }
  return gains;
}

}  // namespace oracle
