#include "sparcs/rank/ranking.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "sparcs/common/errors.hpp"
#include "sparcs/rank/binning.hpp"
#include "sparcs/rank/contingency.hpp"

namespace sparcs::rank {

namespace {

template <typename Measure>
std::vector<double> contingency_scores(const data::Dataset& dataset, const RankConfig& cfg,
                                       Measure measure) {
  const auto target_bins = quantile_bins(dataset.target(), cfg.target_bins);
  std::vector<double> scores(dataset.feature_count(), 0.0);
  for (std::size_t f = 0; f < dataset.feature_count(); ++f) {
    const auto levels = discretize_feature(dataset, f, cfg.numeric_bins);
    scores[f] = measure(ContingencyTable::from_codes(levels, target_bins));
  }
  return scores;
}

}  // namespace

std::vector<double> chi_square_scores(const data::Dataset& dataset, const RankConfig& cfg) {
  return contingency_scores(dataset, cfg, [](const ContingencyTable& t) { return chi_square(t); });
}

std::vector<double> mutual_information_scores(const data::Dataset& dataset, const RankConfig& cfg) {
  return contingency_scores(dataset, cfg,
                            [](const ContingencyTable& t) { return mutual_information(t); });
}

std::vector<double> gbt_importance(const data::Dataset& dataset, const tree::GbtConfig& cfg) {
  return tree::fit_gbt(dataset, cfg).gain_importance(dataset.feature_count());
}

std::vector<std::size_t> top_k_indices(const std::vector<double>& scores, std::size_t k) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  order.resize(std::min(k, order.size()));
  return order;
}

std::vector<std::size_t> select_union(const std::vector<std::vector<double>>& scores, std::size_t k) {
  std::set<std::size_t> chosen;
  for (const auto& s : scores) {
    if (k == 0 || k > s.size()) {
      throw ConfigError("top_k must lie in [1, " + std::to_string(s.size()) + "]");
    }
    for (auto idx : top_k_indices(s, k)) chosen.insert(idx);
  }
  return {chosen.begin(), chosen.end()};
}

std::vector<std::string> RankingReport::selected_names() const {
  std::vector<std::string> out;
  for (auto i : selected) out.push_back(features[i]);
  return out;
}

nlohmann::json RankingReport::to_json() const {
  nlohmann::json measures = nlohmann::json::object();
  for (std::size_t m = 0; m < kMeasures.size(); ++m) {
    std::vector<std::string> names;
    for (auto i : top[m]) names.push_back(features[i]);
    measures[kMeasures[m]] = {{"scores", scores[m]}, {"top_k", names}};
  }
  return {
      {"features", features},
      {"measures", std::move(measures)},
      {"selected", selected_names()},
      {"config",
       {{"top_k", config.top_k},
        {"target_bins", config.target_bins},
        {"numeric_bins", config.numeric_bins},
        {"gbt",
         {{"n_trees", config.gbt.n_trees},
          {"learning_rate", config.gbt.learning_rate},
          {"max_depth", config.gbt.max_depth},
          {"min_leaf", config.gbt.min_leaf}}}}},
  };
}

RankingReport RankingReport::from_json(const nlohmann::json& j) {
  try {
    RankingReport r;
    r.features = j.at("features").get<std::vector<std::string>>();
    auto index = [&](const std::string& name) {
      auto it = std::find(r.features.begin(), r.features.end(), name);
      if (it == r.features.end()) throw DataError("ranking names unknown feature " + name);
      return static_cast<std::size_t>(it - r.features.begin());
    };
    for (const char* m : kMeasures) {
      const auto& entry = j.at("measures").at(m);
      r.scores.push_back(entry.at("scores").get<std::vector<double>>());
      std::vector<std::size_t> top;
      for (const auto& name : entry.at("top_k")) top.push_back(index(name.get<std::string>()));
      r.top.push_back(std::move(top));
    }
    for (const auto& name : j.at("selected")) r.selected.push_back(index(name.get<std::string>()));
    const auto& c = j.at("config");
    r.config.top_k = c.at("top_k").get<std::size_t>();
    r.config.target_bins = c.at("target_bins").get<std::size_t>();
    r.config.numeric_bins = c.at("numeric_bins").get<std::size_t>();
    const auto& g = c.at("gbt");
    r.config.gbt = {g.at("n_trees").get<int>(), g.at("learning_rate").get<double>(),
                    g.at("max_depth").get<int>(), g.at("min_leaf").get<std::size_t>()};
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed ranking JSON: ") + e.what());
  }
}

RankingReport rank_features(const data::Dataset& dataset, const RankConfig& cfg) {
  if (cfg.top_k == 0 || cfg.top_k > dataset.feature_count()) {
    throw ConfigError("top_k must lie in [1, " + std::to_string(dataset.feature_count()) + "]");
  }
  if (cfg.target_bins == 0 || cfg.numeric_bins == 0) throw ConfigError("bin counts must be positive");
  RankingReport report;
  report.config = cfg;
  for (const auto& f : dataset.schema().features()) report.features.push_back(f.name);
  report.scores = {chi_square_scores(dataset, cfg), mutual_information_scores(dataset, cfg),
                   gbt_importance(dataset, cfg.gbt)};
  for (const auto& s : report.scores) report.top.push_back(top_k_indices(s, cfg.top_k));
  report.selected = select_union(report.scores, cfg.top_k);
  return report;
}

}  // namespace sparcs::rank
