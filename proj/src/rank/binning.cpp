#include "sparcs/rank/binning.hpp"

#include <algorithm>
#include <stdexcept>

namespace sparcs::rank {

std::vector<double> quantile_edges(std::span<const double> values, std::size_t bins) {
  if (bins == 0) throw std::invalid_argument("quantile_edges: bins must be positive");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> edges;
  const std::size_t n = sorted.size();
  if (n == 0) return edges;
  for (std::size_t k = 1; k < bins; ++k) {
    const double e = sorted[std::min(n - 1, k * n / bins)];
    if (edges.empty() || edges.back() != e) edges.push_back(e);
  }
  return edges;
}

std::vector<std::uint32_t> assign_bins(std::span<const double> values, std::span<const double> edges) {
  std::vector<std::uint32_t> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    out[i] = static_cast<std::uint32_t>(std::upper_bound(edges.begin(), edges.end(), values[i]) -
                                        edges.begin());
  }
  return out;
}

std::vector<std::uint32_t> discretize_feature(const data::Dataset& dataset, std::size_t feature,
                                              std::size_t numeric_bins) {
  const auto col = dataset.column(feature);
  if (!dataset.schema().feature(feature).is_categorical()) return quantile_bins(col, numeric_bins);
  std::vector<std::uint32_t> out(col.size());
  for (std::size_t i = 0; i < col.size(); ++i) out[i] = static_cast<std::uint32_t>(col[i]);
  return out;
}

}  // namespace sparcs::rank
