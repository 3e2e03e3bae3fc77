#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <json.hpp>

#include "sparcs/data/dataset.hpp"
#include "sparcs/tree/regression_tree.hpp"
#include "sparcs/tree/tree_builder.hpp"

namespace sparcs::tree {

struct GbtConfig {
  int n_trees = 50;
  double learning_rate = 0.1;
  int max_depth = 3;
  std::size_t min_leaf = 20;
};

// Squared-loss gradient boosting: prediction = base + learning_rate * sum of
// tree outputs, each tree fit to the residuals of the ensemble before it.
class GbtEnsemble {
 public:
  GbtEnsemble() = default;
  GbtEnsemble(double base_prediction, double learning_rate, std::vector<RegressionTree> trees);

  double predict(std::span<const double> row) const;
  std::vector<double> predict(const data::Dataset& dataset) const;

  double base_prediction() const { return base_; }
  double learning_rate() const { return learning_rate_; }
  const std::vector<RegressionTree>& trees() const { return trees_; }
  std::size_t split_count() const;

  // Total SSE reduction of all splits on each feature, summed over trees.
  std::vector<double> total_gain(std::size_t feature_count) const;
  // total_gain normalized to sum 1; all zeros when the ensemble has no split.
  std::vector<double> gain_importance(std::size_t feature_count) const;

  nlohmann::json to_json() const;
  static GbtEnsemble from_json(const nlohmann::json& j);

 private:
  double base_ = 0.0;
  double learning_rate_ = 1.0;
  std::vector<RegressionTree> trees_;
};

// Throws std::invalid_argument when n_trees < 1 or learning_rate is outside
// (0, 1], DataError for the same data errors as fit_tree. When `train_sse` is given it
// receives the training SSE after the base prediction and after each round.
GbtEnsemble fit_gbt(const data::Dataset& dataset, const GbtConfig& cfg,
                    std::vector<double>* train_sse = nullptr);

}  // namespace sparcs::tree
