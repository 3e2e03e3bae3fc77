#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "sparcs/data/dataset.hpp"

namespace sparcs::data {

struct SplitConfig {
  double test_fraction = 0.5;
  std::uint64_t seed = 0;
};

struct SplitIndices {
  // Both ascending; together a partition of 0..n-1.
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

// |test| = round(test_fraction * n). Throws std::invalid_argument when
// test_fraction is outside (0, 1) and DataError when n < 2 or either side
// would be empty.
SplitIndices split_indices(std::size_t n, const SplitConfig& cfg);

struct TrainTest {
  Dataset train;
  Dataset test;
};

TrainTest split(const Dataset& dataset, const SplitConfig& cfg);

}  // namespace sparcs::data
