#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include <json.hpp>

#include "sparcs/data/dataset.hpp"
#include "sparcs/tree/gbt.hpp"

namespace sparcs::rank {

struct RankConfig {
  std::size_t top_k = 5;
  std::size_t target_bins = 10;
  std::size_t numeric_bins = 10;
  tree::GbtConfig gbt;
};

// Chi-square statistic of each feature against the decile-binned target.
std::vector<double> chi_square_scores(const data::Dataset& dataset, const RankConfig& cfg);
// Mutual information (nats) of each feature against the binned target.
std::vector<double> mutual_information_scores(const data::Dataset& dataset, const RankConfig& cfg);
// Normalized total split gain per feature from a boosted ensemble fit on
// the dataset; all zeros when the ensemble never splits.
std::vector<double> gbt_importance(const data::Dataset& dataset, const tree::GbtConfig& cfg);

// Indices of the k largest scores, ties broken by lower index.
std::vector<std::size_t> top_k_indices(const std::vector<double>& scores, std::size_t k);

// Union of each measure's top-k, ordered by feature index. Throws
// ConfigError when k is 0 or exceeds the feature count.
std::vector<std::size_t> select_union(const std::vector<std::vector<double>>& scores, std::size_t k);

struct RankingReport {
  static constexpr std::array<const char*, 3> kMeasures = {"chi_square", "mutual_information",
                                                           "gbt_gain"};
  std::vector<std::string> features;
  // One score vector per entry of kMeasures, aligned with `features`.
  std::vector<std::vector<double>> scores;
  std::vector<std::vector<std::size_t>> top;
  std::vector<std::size_t> selected;
  RankConfig config;

  std::vector<std::string> selected_names() const;
  nlohmann::json to_json() const;
  static RankingReport from_json(const nlohmann::json& j);
};

RankingReport rank_features(const data::Dataset& dataset, const RankConfig& cfg);

}  // namespace sparcs::rank
