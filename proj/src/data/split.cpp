#include "sparcs/data/split.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sparcs/common/errors.hpp"
#include "sparcs/common/rng.hpp"

namespace sparcs::data {

SplitIndices split_indices(std::size_t n, const SplitConfig& cfg) {
  if (n < 2) throw DataError("split needs at least 2 rows");
  if (!(cfg.test_fraction > 0.0 && cfg.test_fraction < 1.0)) {
    throw std::invalid_argument("test_fraction must lie in (0, 1)");
  }
  const auto n_test = static_cast<std::size_t>(std::llround(cfg.test_fraction * static_cast<double>(n)));
  if (n_test == 0 || n_test == n) {
    throw DataError("test_fraction " + std::to_string(cfg.test_fraction) + " leaves an empty side for " +
                    std::to_string(n) + " rows");
  }
  auto order = shuffled_indices(n, cfg.seed);
  SplitIndices out;
  out.test.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_test));
  out.train.assign(order.begin() + static_cast<std::ptrdiff_t>(n_test), order.end());
  std::sort(out.test.begin(), out.test.end());
  std::sort(out.train.begin(), out.train.end());
  return out;
}

TrainTest split(const Dataset& dataset, const SplitConfig& cfg) {
  auto idx = split_indices(dataset.row_count(), cfg);
  return {dataset.take(idx.train), dataset.take(idx.test)};
}

}  // namespace sparcs::data
