#include "sparcs/model/fitted_model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

#include "sparcs/common/errors.hpp"
#include "sparcs/common/io.hpp"
#include "sparcs/tree/tree_builder.hpp"

namespace sparcs::model {

namespace {

constexpr std::string_view kModelFormat = "sparcs-model/1";

struct FamilyName {
  ModelFamily family;
  std::string_view name;
};

constexpr FamilyName kFamilyNames[] = {
    {ModelFamily::kOls, "ols"},           {ModelFamily::kRidge, "ridge"},
    {ModelFamily::kLasso, "lasso"},       {ModelFamily::kElasticNet, "elasticnet"},
    {ModelFamily::kLarsAic, "lars_aic"},  {ModelFamily::kLarsBic, "lars_bic"},
    {ModelFamily::kTree, "tree"},         {ModelFamily::kGbt, "gbt"},
};

void check_params(ModelFamily family, const HyperParams& p) {
  switch (family) {
    case ModelFamily::kRidge:
      if (!(p.lambda >= 0.0) || !std::isfinite(p.lambda)) {
        throw std::invalid_argument("ridge lambda must be finite and >= 0");
      }
      break;
    case ModelFamily::kLasso:
    case ModelFamily::kElasticNet:
      if (!(p.lambda >= 0.0) || !std::isfinite(p.lambda)) {
        throw std::invalid_argument("lambda must be finite and >= 0");
      }
      if (family == ModelFamily::kElasticNet && !(p.l1_ratio >= 0.0 && p.l1_ratio <= 1.0)) {
        throw std::invalid_argument("l1_ratio must lie in [0, 1]");
      }
      break;
    case ModelFamily::kTree:
      if (p.max_depth < 1) throw std::invalid_argument("max_depth must be >= 1");
      if (p.min_leaf < 1) throw std::invalid_argument("min_leaf must be >= 1");
      break;
    default:
      break;
  }
}

}  // namespace

std::string_view to_string(ModelFamily family) {
  for (const auto& f : kFamilyNames) {
    if (f.family == family) return f.name;
  }
  return "unknown";
}

ModelFamily model_family_from_string(std::string_view text) {
  for (const auto& f : kFamilyNames) {
    if (f.name == text) return f.family;
  }
  if (text == "linear") return ModelFamily::kOls;
  if (text == "lars") return ModelFamily::kLarsAic;
  throw ConfigError("unknown model family: " + std::string(text));
}

bool is_linear(ModelFamily family) {
  return family != ModelFamily::kTree && family != ModelFamily::kGbt;
}

nlohmann::json HyperParams::to_json(ModelFamily family) const {
  switch (family) {
    case ModelFamily::kRidge:
      return {{"lambda", lambda}};
    case ModelFamily::kLasso:
      return {{"lambda", lambda}, {"tolerance", cd.tolerance}, {"max_sweeps", cd.max_sweeps}};
    case ModelFamily::kElasticNet:
      return {{"lambda", lambda},
              {"l1_ratio", l1_ratio},
              {"tolerance", cd.tolerance},
              {"max_sweeps", cd.max_sweeps}};
    case ModelFamily::kTree:
      return {{"max_depth", max_depth}, {"min_leaf", min_leaf}};
    case ModelFamily::kGbt:
      return {{"n_trees", gbt.n_trees},
              {"learning_rate", gbt.learning_rate},
              {"max_depth", gbt.max_depth},
              {"min_leaf", gbt.min_leaf}};
    default:
      return nlohmann::json::object();
  }
}

HyperParams HyperParams::from_json(const nlohmann::json& j) {
  HyperParams p;
  if (!j.is_object()) return p;
  // Tree and gbt share key names; n_trees marks a gbt block.
  p.lambda = j.value("lambda", p.lambda);
  p.l1_ratio = j.value("l1_ratio", p.l1_ratio);
  p.cd.tolerance = j.value("tolerance", p.cd.tolerance);
  p.cd.max_sweeps = j.value("max_sweeps", p.cd.max_sweeps);
  if (j.contains("n_trees")) {
    p.gbt.n_trees = j.value("n_trees", p.gbt.n_trees);
    p.gbt.learning_rate = j.value("learning_rate", p.gbt.learning_rate);
    p.gbt.max_depth = j.value("max_depth", p.gbt.max_depth);
    p.gbt.min_leaf = j.value("min_leaf", p.gbt.min_leaf);
  } else {
    p.max_depth = j.value("max_depth", p.max_depth);
    p.min_leaf = j.value("min_leaf", p.min_leaf);
  }
  return p;
}

FittedModel::FittedModel(ModelFamily family, data::FeatureSchema schema, Estimator estimator,
                         HyperParams params)
    : family_(family),
      schema_(std::move(schema)),
      fingerprint_(schema_.fingerprint()),
      estimator_(std::move(estimator)),
      params_(params) {
  const bool linear = std::holds_alternative<linear::LinearModel>(estimator_);
  if (linear != is_linear(family_) ||
      (family_ == ModelFamily::kTree && !std::holds_alternative<tree::RegressionTree>(estimator_)) ||
      (family_ == ModelFamily::kGbt && !std::holds_alternative<tree::GbtEnsemble>(estimator_))) {
    throw DataError("estimator type does not match model family " + std::string(to_string(family_)));
  }
  if (linear) {
    const auto& m = std::get<linear::LinearModel>(estimator_);
    layout_.emplace(schema_);
    if (static_cast<std::size_t>(m.width()) != layout_->width()) {
      throw DataError("linear model width " + std::to_string(m.width()) +
                      " does not match the one-hot layout width " + std::to_string(layout_->width()));
    }
    const Eigen::VectorXd raw = m.raw_coefficients();
    raw_coefficients_.assign(raw.data(), raw.data() + raw.size());
    raw_intercept_ = m.raw_intercept();
  } else if (const auto* t = std::get_if<tree::RegressionTree>(&estimator_)) {
    if (t->feature_count() != schema_.size()) throw DataError("tree width does not match schema");
  } else {
    for (const auto& t : std::get<tree::GbtEnsemble>(estimator_).trees()) {
      if (t.feature_count() != schema_.size()) throw DataError("ensemble width does not match schema");
    }
  }
}

double FittedModel::predict_unchecked(const double* row) const {
  if (layout_) {
    double y = raw_intercept_;
    layout_->for_each_entry(row, [&](std::size_t col, double v) { y += raw_coefficients_[col] * v; });
    return y;
  }
  const std::span<const double> s(row, schema_.size());
  if (const auto* t = std::get_if<tree::RegressionTree>(&estimator_)) return t->predict(s);
  return std::get<tree::GbtEnsemble>(estimator_).predict(s);
}

double FittedModel::predict_encoded(std::span<const double> row) const {
  if (row.size() != schema_.size()) {
    throw DataError("row has " + std::to_string(row.size()) + " values, model expects " +
                    std::to_string(schema_.size()));
  }
  for (std::size_t f = 0; f < row.size(); ++f) {
    const double v = row[f];
    if (!std::isfinite(v)) throw DataError("non-finite value for feature " + schema_.feature(f).name);
    const auto& d = schema_.feature(f);
    if (d.is_categorical() &&
        (v < 0.0 || v > static_cast<double>(d.vocabulary.size()) || v != std::floor(v))) {
      throw DataError("invalid category code for feature " + d.name);
    }
  }
  return predict_unchecked(row.data());
}

std::vector<double> FittedModel::predict_rows(const data::Dataset& dataset,
                                              std::span<const std::size_t> rows) const {
  std::vector<double> out;
  out.reserve(rows.size());
  std::vector<double> buf(dataset.feature_count());
  for (std::size_t r : rows) {
    dataset.row(r, buf);
    out.push_back(predict_unchecked(buf.data()));
  }
  return out;
}

std::vector<double> FittedModel::predict(const data::Dataset& dataset) const {
  if (dataset.schema().fingerprint() != fingerprint_) {
    throw DataError("dataset schema fingerprint " + dataset.schema().fingerprint() +
                    " does not match model schema " + fingerprint_);
  }
  std::vector<double> out(dataset.row_count());
  std::vector<double> buf(dataset.feature_count());
  for (std::size_t r = 0; r < out.size(); ++r) {
    dataset.row(r, buf);
    out[r] = predict_unchecked(buf.data());
  }
  return out;
}

nlohmann::json FittedModel::to_json() const {
  nlohmann::json j = {
      {"format", kModelFormat},
      {"family", to_string(family_)},
      {"schema", schema_.to_json()},
      {"schema_fingerprint", fingerprint_},
      {"hyperparameters", params_.to_json(family_)},
  };
  std::visit([&](const auto& e) { j["estimator"] = e.to_json(); }, estimator_);
  if (layout_) j["coefficient_labels"] = layout_->labels();
  return j;
}

FittedModel FittedModel::from_json(const nlohmann::json& j) {
  try {
    if (j.at("format").get<std::string>() != kModelFormat) {
      throw DataError("unsupported model format " + j.at("format").dump());
    }
    const ModelFamily family = model_family_from_string(j.at("family").get<std::string>());
    auto schema = data::FeatureSchema::from_json(j.at("schema"));
    const auto params = HyperParams::from_json(j.value("hyperparameters", nlohmann::json::object()));
    const auto& e = j.at("estimator");
    Estimator est;
    if (is_linear(family)) {
      est = linear::LinearModel::from_json(e);
    } else if (family == ModelFamily::kTree) {
      est = tree::RegressionTree::from_json(e);
    } else {
      est = tree::GbtEnsemble::from_json(e);
    }
    FittedModel m(family, std::move(schema), std::move(est), params);
    if (m.fingerprint_ != j.at("schema_fingerprint").get<std::string>()) {
      throw DataError("model schema fingerprint does not match its embedded schema");
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed model JSON: ") + e.what());
  } catch (const ConfigError& e) {
    throw DataError(std::string("malformed model JSON: ") + e.what());
  }
}

void FittedModel::save(const std::filesystem::path& path) const {
  write_file_atomic(path, to_json().dump(1) + "\n");
}

FittedModel FittedModel::load(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw DataError("model file " + path.string() + " is not valid JSON: " + e.what());
  }
  return from_json(j);
}

linear::MomentAccumulator accumulate_one_hot(const data::Dataset& dataset,
                                             const data::OneHotLayout& layout,
                                             std::span<const std::size_t> rows) {
  linear::MomentAccumulator acc(static_cast<Eigen::Index>(layout.width()));
  const std::size_t f = dataset.feature_count();
  std::vector<Eigen::Index> cols(f);
  std::vector<double> vals(f);
  const auto target = dataset.target();
  auto add = [&](std::size_t r) {
    std::size_t k = 0;
    layout.for_each_entry(dataset, r, [&](std::size_t c, double v) {
      cols[k] = static_cast<Eigen::Index>(c);
      vals[k] = v;
      ++k;
    });
    acc.add_row(std::span(cols.data(), k), std::span(vals.data(), k), target[r]);
  };
  if (rows.empty()) {
    for (std::size_t r = 0; r < dataset.row_count(); ++r) add(r);
  } else {
    for (std::size_t r : rows) add(r);
  }
  return acc;
}

FittedModel fit_model(const data::Dataset& train, ModelFamily family, const HyperParams& params,
                      FitDiagnostics* diagnostics) {
  check_params(family, params);
  if (train.row_count() == 0) throw DataError("training set is empty");
  const auto& schema = train.schema();

  if (family == ModelFamily::kTree) {
    auto t = tree::fit_tree(train, tree::TreeConfig{params.max_depth, params.min_leaf});
    return FittedModel(family, schema, std::move(t), params);
  }
  if (family == ModelFamily::kGbt) {
    auto g = tree::fit_gbt(train, params.gbt);
    return FittedModel(family, schema, std::move(g), params);
  }

  const data::OneHotLayout layout(schema);
  if (diagnostics) diagnostics->coefficient_labels = layout.labels();
  linear::LinearModel m;
  if (family == ModelFamily::kOls && train.row_count() * layout.width() <= kDenseDesignBudget) {
    const auto design = data::one_hot(train);
    m = linear::fit_ols(design.values, train.target());
  } else {
    const auto problem = accumulate_one_hot(train, layout).finish();
    switch (family) {
      case ModelFamily::kOls:
        m = linear::fit_ols(problem);
        break;
      case ModelFamily::kRidge:
        m = linear::fit_ridge(problem, params.lambda);
        break;
      case ModelFamily::kLasso:
        m = linear::fit_coordinate_descent(problem, params.lambda, 1.0, params.cd);
        break;
      case ModelFamily::kElasticNet:
        m = linear::fit_coordinate_descent(problem, params.lambda, params.l1_ratio, params.cd);
        break;
      default: {
        const auto c = family == ModelFamily::kLarsAic ? linear::InformationCriterion::kAic
                                                       : linear::InformationCriterion::kBic;
        auto fit = linear::fit_lars_ic(problem, c);
        m = std::move(fit.model);
        if (diagnostics) diagnostics->lars_path = std::move(fit.path);
      }
    }
  }
  return FittedModel(family, schema, std::move(m), params);
}

}  // namespace sparcs::model
