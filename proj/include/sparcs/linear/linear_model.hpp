#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "sparcs/linear/problem.hpp"

namespace sparcs::linear {

enum class LinearFamily { kOls, kRidge, kLasso, kElasticNet, kLarsIc };

std::string_view to_string(LinearFamily family);
LinearFamily linear_family_from_string(std::string_view text);

// Coefficients live in standardized units: prediction for a raw row x is
//   intercept + sum_j coefficients[j] * (x_j - mean_j) / scale_j
// where intercept is the training target mean (never penalized).
struct LinearModel {
  LinearFamily family = LinearFamily::kOls;
  Eigen::VectorXd coefficients;
  double intercept = 0.0;
  Standardization standardization;
  double lambda = 0.0;
  double l1_ratio = 0.0;
  // Coordinate descent bookkeeping; always true for closed-form fits.
  bool converged = true;
  int iterations = 0;
  // "aic" / "bic" for LARS models.
  std::string criterion;

  Eigen::Index width() const { return coefficients.size(); }
  // Coefficients and intercept on the original (unstandardized) scale.
  Eigen::VectorXd raw_coefficients() const;
  double raw_intercept() const;

  // Throws DataError when the row width differs from the model width.
  double predict_row(std::span<const double> x) const;

  nlohmann::json to_json() const;
  static LinearModel from_json(const nlohmann::json& j);
};

// Predictions for every row of X. Throws DataError on width mismatch.
Eigen::VectorXd predict_linear(const LinearModel& model, const Eigen::MatrixXd& x);

}  // namespace sparcs::linear
