#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "sparcs/linear/linear_model.hpp"
#include "sparcs/linear/problem.hpp"

namespace sparcs::linear {

enum class InformationCriterion { kAic, kBic };

std::string_view to_string(InformationCriterion c);
InformationCriterion criterion_from_string(std::string_view text);

// IC = n ln(RSS / n) + penalty * df, penalty 2 (AIC) or ln n (BIC).
double information_criterion(std::size_t n, double rss, int df, InformationCriterion c);

struct LarsStep {
  std::vector<Eigen::Index> active;  // in order of entry
  Eigen::VectorXd coefficients;      // standardized units
  double lambda = 0.0;               // max |residual correlation| / n
  double rss = 0.0;
  int df = 0;                        // nonzero coefficients
  double aic = 0.0;
  double bic = 0.0;
};

// Lasso-modified least-angle path. Step 0 is the empty model; every later
// step adds or removes exactly one column and lambda strictly decreases.
struct LarsPath {
  std::vector<LarsStep> steps;
  std::size_t aic_index = 0;
  std::size_t bic_index = 0;

  std::size_t chosen(InformationCriterion c) const {
    return c == InformationCriterion::kAic ? aic_index : bic_index;
  }
  // Per-step lambdas, RSS, IC values, and nonzero coefficients by label.
  nlohmann::json to_json(const std::vector<std::string>& labels) const;
};

// Traces the path on the standardized problem. A column enters when its
// absolute residual correlation ties the active set's and leaves when its
// coefficient crosses zero. Columns linearly dependent on the active set are
// skipped. Throws DataError for an all-constant design.
LarsPath lars_path(const LinearProblem& problem, std::size_t max_steps = 0);

struct LarsFit {
  LarsPath path;
  LinearModel model;
};

// Path plus the IC-minimizing model (earliest step on ties).
LarsFit fit_lars_ic(const LinearProblem& problem, InformationCriterion criterion);
LarsFit fit_lars_ic(const Eigen::MatrixXd& x, std::span<const double> y, InformationCriterion criterion);

}  // namespace sparcs::linear
