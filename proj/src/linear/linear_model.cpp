#include "sparcs/linear/linear_model.hpp"

#include "sparcs/common/errors.hpp"

namespace sparcs::linear {

std::string_view to_string(LinearFamily family) {
  switch (family) {
    case LinearFamily::kOls: return "ols";
    case LinearFamily::kRidge: return "ridge";
    case LinearFamily::kLasso: return "lasso";
    case LinearFamily::kElasticNet: return "elasticnet";
    case LinearFamily::kLarsIc: return "lars_ic";
  }
  return "unknown";
}

LinearFamily linear_family_from_string(std::string_view text) {
  for (auto f : {LinearFamily::kOls, LinearFamily::kRidge, LinearFamily::kLasso,
                 LinearFamily::kElasticNet, LinearFamily::kLarsIc}) {
    if (to_string(f) == text) return f;
  }
  throw DataError("unknown linear family '" + std::string(text) + "'");
}

Eigen::VectorXd LinearModel::raw_coefficients() const {
  Eigen::VectorXd raw = Eigen::VectorXd::Zero(width());
  for (Eigen::Index j = 0; j < width(); ++j) {
    if (!standardization.constant[static_cast<std::size_t>(j)]) {
      raw(j) = coefficients(j) / standardization.scale(j);
    }
  }
  return raw;
}

double LinearModel::raw_intercept() const {
  return intercept - raw_coefficients().dot(standardization.mean);
}

double LinearModel::predict_row(std::span<const double> x) const {
  if (static_cast<Eigen::Index>(x.size()) != width()) {
    throw DataError("row has " + std::to_string(x.size()) + " columns, model expects " +
                    std::to_string(width()));
  }
  double y = intercept;
  for (Eigen::Index j = 0; j < width(); ++j) {
    if (standardization.constant[static_cast<std::size_t>(j)]) continue;
    y += coefficients(j) * (x[static_cast<std::size_t>(j)] - standardization.mean(j)) /
         standardization.scale(j);
  }
  return y;
}

Eigen::VectorXd predict_linear(const LinearModel& model, const Eigen::MatrixXd& x) {
  if (x.cols() != model.width()) {
    throw DataError("design has " + std::to_string(x.cols()) + " columns, model expects " +
                    std::to_string(model.width()));
  }
  Eigen::VectorXd out(x.rows());
  std::vector<double> row(static_cast<std::size_t>(x.cols()));
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) row[static_cast<std::size_t>(j)] = x(r, j);
    out(r) = model.predict_row(row);
  }
  return out;
}

namespace {

std::vector<double> to_vector(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

Eigen::VectorXd from_vector(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

nlohmann::json LinearModel::to_json() const {
  std::vector<int> constant(standardization.constant.begin(), standardization.constant.end());
  nlohmann::json j = {
      {"family", to_string(family)},
      {"coefficients", to_vector(coefficients)},
      {"intercept", intercept},
      {"standardization",
       {{"mean", to_vector(standardization.mean)},
        {"scale", to_vector(standardization.scale)},
        {"constant", constant}}},
      {"lambda", lambda},
      {"l1_ratio", l1_ratio},
      {"converged", converged},
      {"iterations", iterations},
  };
  if (!criterion.empty()) j["criterion"] = criterion;
  return j;
}

LinearModel LinearModel::from_json(const nlohmann::json& j) {
  try {
    LinearModel m;
    m.family = linear_family_from_string(j.at("family").get<std::string>());
    m.coefficients = from_vector(j.at("coefficients").get<std::vector<double>>());
    m.intercept = j.at("intercept").get<double>();
    const auto& s = j.at("standardization");
    m.standardization.mean = from_vector(s.at("mean").get<std::vector<double>>());
    m.standardization.scale = from_vector(s.at("scale").get<std::vector<double>>());
    for (int c : s.at("constant").get<std::vector<int>>()) m.standardization.constant.push_back(c != 0);
    m.lambda = j.at("lambda").get<double>();
    m.l1_ratio = j.at("l1_ratio").get<double>();
    m.converged = j.at("converged").get<bool>();
    m.iterations = j.at("iterations").get<int>();
    m.criterion = j.value("criterion", "");
    const auto w = m.coefficients.size();
    if (m.standardization.mean.size() != w || m.standardization.scale.size() != w ||
        static_cast<Eigen::Index>(m.standardization.constant.size()) != w) {
      throw DataError("linear model standardization does not match coefficient length");
    }
    for (Eigen::Index k = 0; k < w; ++k) {
      if (!(m.standardization.scale(k) > 0.0)) throw DataError("linear model scale must be > 0");
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed linear model JSON: ") + e.what());
  }
}

}  // namespace sparcs::linear
