#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "sparcs/data/dataset.hpp"
#include "sparcs/data/one_hot.hpp"
#include "sparcs/linear/lars.hpp"
#include "sparcs/linear/linear_model.hpp"
#include "sparcs/linear/problem.hpp"
#include "sparcs/linear/solvers.hpp"
#include "sparcs/tree/gbt.hpp"
#include "sparcs/tree/regression_tree.hpp"

namespace sparcs::model {

enum class ModelFamily { kOls, kRidge, kLasso, kElasticNet, kLarsAic, kLarsBic, kTree, kGbt };

std::string_view to_string(ModelFamily family);
// Accepts the canonical names plus "linear" (ols) and "lars" (lars_aic).
// Throws ConfigError for anything else.
ModelFamily model_family_from_string(std::string_view text);
bool is_linear(ModelFamily family);

struct HyperParams {
  int max_depth = 10;
  std::size_t min_leaf = 20;
  double lambda = 1.0;
  double l1_ratio = 0.5;
  linear::CoordinateDescentConfig cd;
  tree::GbtConfig gbt;

  // Only the fields that matter for `family`.
  nlohmann::json to_json(ModelFamily family) const;
  static HyperParams from_json(const nlohmann::json& j);
};

using Estimator = std::variant<linear::LinearModel, tree::RegressionTree, tree::GbtEnsemble>;

// A trained estimator bound to the feature schema it was trained against.
// Immutable; predictions are lock-free and safe from many threads.
class FittedModel {
 public:
  FittedModel(ModelFamily family, data::FeatureSchema schema, Estimator estimator,
              HyperParams params = {});

  ModelFamily family() const { return family_; }
  const data::FeatureSchema& schema() const { return schema_; }
  const std::string& schema_fingerprint() const { return fingerprint_; }
  const Estimator& estimator() const { return estimator_; }
  const HyperParams& params() const { return params_; }

  // One encoded row in schema order (category codes, raw numerics). Throws
  // DataError on width mismatch.
  double predict_encoded(std::span<const double> row) const;
  // Throws DataError when the dataset schema fingerprint differs.
  std::vector<double> predict(const data::Dataset& dataset) const;
  // Rows of `dataset` selected by `rows`; no schema check (internal use by CV).
  std::vector<double> predict_rows(const data::Dataset& dataset, std::span<const std::size_t> rows) const;

  // {"format": "sparcs-model/1", "family", "schema", "schema_fingerprint",
  //  "hyperparameters", "estimator", and for linear models
  //  "coefficient_labels"}.
  nlohmann::json to_json() const;
  static FittedModel from_json(const nlohmann::json& j);
  void save(const std::filesystem::path& path) const;
  static FittedModel load(const std::filesystem::path& path);

 private:
  double predict_unchecked(const double* row) const;

  ModelFamily family_;
  data::FeatureSchema schema_;
  std::string fingerprint_;
  Estimator estimator_;
  HyperParams params_;
  // Linear models: raw-scale coefficients over the one-hot layout.
  std::optional<data::OneHotLayout> layout_;
  std::vector<double> raw_coefficients_;
  double raw_intercept_ = 0.0;
};

// Sufficient statistics of the one-hot design over `rows` (all rows when
// empty) without materializing the dense matrix.
linear::MomentAccumulator accumulate_one_hot(const data::Dataset& dataset,
                                             const data::OneHotLayout& layout,
                                             std::span<const std::size_t> rows = {});

struct FitDiagnostics {
  std::optional<linear::LarsPath> lars_path;
  std::vector<std::string> coefficient_labels;
};

// Trains one model family on `train`. Linear families use the one-hot
// design; OLS solves on the dense design when it holds at most
// kDenseDesignBudget entries and on the Gram matrix otherwise.
inline constexpr std::size_t kDenseDesignBudget = std::size_t{1} << 25;
FittedModel fit_model(const data::Dataset& train, ModelFamily family, const HyperParams& params,
                      FitDiagnostics* diagnostics = nullptr);

}  // namespace sparcs::model
