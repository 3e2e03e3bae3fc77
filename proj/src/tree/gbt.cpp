#include "sparcs/tree/gbt.hpp"

#include <numeric>
#include <stdexcept>

#include "sparcs/common/errors.hpp"

namespace sparcs::tree {

GbtEnsemble::GbtEnsemble(double base_prediction, double learning_rate,
                         std::vector<RegressionTree> trees)
    : base_(base_prediction), learning_rate_(learning_rate), trees_(std::move(trees)) {
  if (!(learning_rate_ > 0.0 && learning_rate_ <= 1.0)) {
    throw DataError("learning_rate must lie in (0, 1]");
  }
}

double GbtEnsemble::predict(std::span<const double> row) const {
  double boost = 0.0;
  for (const auto& t : trees_) boost += t.predict(row);
  return base_ + learning_rate_ * boost;
}

std::vector<double> GbtEnsemble::predict(const data::Dataset& dataset) const {
  std::vector<double> out(dataset.row_count());
  std::vector<double> row(dataset.feature_count());
  for (std::size_t r = 0; r < dataset.row_count(); ++r) {
    dataset.row(r, row);
    out[r] = predict(row);
  }
  return out;
}

std::size_t GbtEnsemble::split_count() const {
  std::size_t splits = 0;
  for (const auto& t : trees_) splits += t.nodes().size() - t.leaf_count();
  return splits;
}

std::vector<double> GbtEnsemble::total_gain(std::size_t feature_count) const {
  std::vector<double> gain(feature_count, 0.0);
  for (const auto& t : trees_) {
    for (const auto& n : t.nodes()) {
      if (!n.is_leaf()) gain.at(static_cast<std::size_t>(n.feature)) += n.gain;
    }
  }
  return gain;
}

std::vector<double> GbtEnsemble::gain_importance(std::size_t feature_count) const {
  auto gain = total_gain(feature_count);
  const double total = std::accumulate(gain.begin(), gain.end(), 0.0);
  if (total > 0.0) {
    for (auto& g : gain) g /= total;
  }
  return gain;
}

nlohmann::json GbtEnsemble::to_json() const {
  nlohmann::json trees = nlohmann::json::array();
  for (const auto& t : trees_) trees.push_back(t.to_json());
  return {{"base_prediction", base_}, {"learning_rate", learning_rate_}, {"trees", std::move(trees)}};
}

GbtEnsemble GbtEnsemble::from_json(const nlohmann::json& j) {
  try {
    std::vector<RegressionTree> trees;
    for (const auto& t : j.at("trees")) trees.push_back(RegressionTree::from_json(t));
    return GbtEnsemble(j.at("base_prediction").get<double>(), j.at("learning_rate").get<double>(),
                       std::move(trees));
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed ensemble JSON: ") + e.what());
  }
}

GbtEnsemble fit_gbt(const data::Dataset& dataset, const GbtConfig& cfg, std::vector<double>* train_sse) {
  if (cfg.n_trees < 1) throw std::invalid_argument("fit_gbt: n_trees must be >= 1");
  if (!(cfg.learning_rate > 0.0 && cfg.learning_rate <= 1.0)) {
    throw std::invalid_argument("fit_gbt: learning_rate must lie in (0, 1]");
  }
  const std::size_t n = dataset.row_count();
  if (n == 0) throw DataError("fit_gbt: empty dataset");
  const auto y = dataset.target();
  const double base = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);

  FeatureColumns columns(dataset);
  SortedIndex index(columns);
  const TreeConfig tree_cfg{cfg.max_depth, cfg.min_leaf};

  std::vector<double> prediction(n, base);
  std::vector<double> residual(n);
  auto refresh = [&] {
    double sse = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      residual[i] = y[i] - prediction[i];
      sse += residual[i] * residual[i];
    }
    if (train_sse) train_sse->push_back(sse);
  };
  if (train_sse) train_sse->clear();
  refresh();

  std::vector<RegressionTree> trees;
  std::vector<double> row(dataset.feature_count());
  for (int round = 0; round < cfg.n_trees; ++round) {
    RegressionTree tree = fit_tree(columns, residual, index, tree_cfg);
    for (std::size_t i = 0; i < n; ++i) {
      dataset.row(i, row);
      prediction[i] += cfg.learning_rate * tree.predict(row);
    }
    trees.push_back(std::move(tree));
    refresh();
  }
  return GbtEnsemble(base, cfg.learning_rate, std::move(trees));
}

}  // namespace sparcs::tree
