#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "sparcs/linear/linear_model.hpp"
#include "sparcs/linear/problem.hpp"

namespace sparcs::linear {

// Ordinary least squares via a complete orthogonal decomposition of the
// standardized design; rank-deficient designs get the minimum-norm solution.
LinearModel fit_ols(const Eigen::MatrixXd& x, std::span<const double> y);
// Same estimator from sufficient statistics (pseudo-inverse of the Gram
// matrix). Used when the design is too large to hold densely.
LinearModel fit_ols(const LinearProblem& problem);

// Minimizes ||y - Z b - c||^2 + lambda ||b||^2 on the standardized design.
// Throws std::invalid_argument for lambda < 0.
LinearModel fit_ridge(const LinearProblem& problem, double lambda);
LinearModel fit_ridge(const Eigen::MatrixXd& x, std::span<const double> y, double lambda);

struct CoordinateDescentConfig {
  // On the largest coefficient change in a sweep, in units of the target's
  // standard deviation.
  double tolerance = 1e-6;
  int max_sweeps = 10000;
};

// Elastic net by cyclic coordinate descent:
//   (1/2n) ||y - Z b - c||^2 + lambda (l1_ratio ||b||_1 + (1 - l1_ratio)/2 ||b||^2)
// l1_ratio = 1 is the lasso. Non-convergence is reported through
// LinearModel::converged, never thrown. With l1_ratio = 0 the minimizer
// equals fit_ridge at n * lambda.
LinearModel fit_coordinate_descent(const LinearProblem& problem, double lambda, double l1_ratio,
                                   const CoordinateDescentConfig& cfg = {},
                                   const Eigen::VectorXd* warm_start = nullptr);
LinearModel fit_coordinate_descent(const Eigen::MatrixXd& x, std::span<const double> y,
                                   double lambda, double l1_ratio,
                                   const CoordinateDescentConfig& cfg = {});

// Smallest lambda at which every coordinate-descent coefficient is zero:
// max_j |Z_j^T y| / (n * l1_ratio). For l1_ratio = 0 the l1 value is returned.
double lambda_max(const LinearProblem& problem, double l1_ratio);

// `points` values log-spaced from hi down to hi * ratio (descending).
std::vector<double> log_grid(double hi, std::size_t points = 20, double ratio = 1e-4);

inline double soft_threshold(double value, double threshold) {
  if (value > threshold) return value - threshold;
  if (value < -threshold) return value + threshold;
  return 0.0;
}

}  // namespace sparcs::linear
