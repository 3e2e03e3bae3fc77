#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <json.hpp>

#include "sparcs/data/dataset.hpp"
#include "sparcs/model/fitted_model.hpp"

namespace sparcs::eval {

// Shuffles 0..n-1 with `seed` and cuts the permutation into k contiguous
// folds; fold f holds positions [f n / k, (f + 1) n / k). Each fold is
// returned sorted. Throws std::invalid_argument unless 2 <= k <= n.
std::vector<std::vector<std::size_t>> kfold_partition(std::size_t n, std::size_t k,
                                                      std::uint64_t seed);

struct CvConfig {
  std::size_t folds = 5;
  std::uint64_t seed = 0;
  // Folds evaluated concurrently; results do not depend on this.
  unsigned threads = 1;
};

struct CvResult {
  model::ModelFamily family = model::ModelFamily::kTree;
  std::size_t folds = 0;
  std::uint64_t seed = 0;
  std::vector<model::HyperParams> grid;
  std::vector<std::vector<double>> fold_r2;  // [setting][fold]
  std::vector<double> mean_r2;
  std::vector<double> std_r2;  // sample standard deviation across folds
  std::size_t chosen = 0;

  const model::HyperParams& best() const { return grid.at(chosen); }
  nlohmann::json to_json() const;
};

// Scores every setting in `grid` by k-fold R^2 on `train` and picks the
// highest mean; exact ties go to the earliest setting, so grids should be
// listed from simplest to most complex. Supports tree, ridge, lasso and
// elasticnet (the families with a tuning parameter); other families throw
// std::invalid_argument. Throws DataError when a fold's training part is too
// small to fit or its validation target is constant.
CvResult cross_validate(const data::Dataset& train, model::ModelFamily family,
                        const std::vector<model::HyperParams>& grid, const CvConfig& cfg);

// Default search grids in ascending complexity: max_depth 2..16 for trees;
// for lasso and elastic net 20 log-spaced penalties from the all-zero
// penalty down by a factor 1e-4; for ridge 20 log-spaced penalties from
// 1e2 n down to 1e-4 n. Other fields are copied from `base`.
std::vector<model::HyperParams> default_grid(const data::Dataset& train, model::ModelFamily family,
                                             const model::HyperParams& base);

}  // namespace sparcs::eval
