#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "sparcs/data/dataset.hpp"

namespace sparcs::rank {

// Quantile edges for `bins` bins: the sorted values at positions
// floor(k * n / bins), k = 1..bins-1. Duplicate edges collapse, so heavily
// tied data yields fewer non-empty bins.
std::vector<double> quantile_edges(std::span<const double> values, std::size_t bins);

// bin(v) = number of edges <= v.
std::vector<std::uint32_t> assign_bins(std::span<const double> values, std::span<const double> edges);

inline std::vector<std::uint32_t> quantile_bins(std::span<const double> values, std::size_t bins) {
  return assign_bins(values, quantile_edges(values, bins));
}

// Discrete levels of one feature: category codes as-is, numeric features
// binned into `numeric_bins` quantile bins.
std::vector<std::uint32_t> discretize_feature(const data::Dataset& dataset, std::size_t feature,
                                              std::size_t numeric_bins);

}  // namespace sparcs::rank
