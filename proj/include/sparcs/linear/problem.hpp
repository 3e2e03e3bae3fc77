#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace sparcs::linear {

// z = (x - mean) / scale with the population standard deviation as scale.
// Constant columns keep scale 1, are flagged, and take coefficient 0 in
// every fit.
struct Standardization {
  Eigen::VectorXd mean;
  Eigen::VectorXd scale;
  std::vector<bool> constant;

  Eigen::Index width() const { return mean.size(); }
  bool all_constant() const;
};

// Standardized, centered least-squares problem in sufficient-statistic form.
// Every penalized solver works from this, so designs too large to hold
// densely can be streamed into a MomentAccumulator instead.
struct LinearProblem {
  Eigen::MatrixXd gram;  // Z^T Z; diagonal = n for non-constant columns
  Eigen::VectorXd xty;   // Z^T (y - y_mean)
  double yty = 0.0;      // sum (y - y_mean)^2
  double y_mean = 0.0;
  std::size_t n = 0;
  Standardization standardization;

  Eigen::Index width() const { return xty.size(); }
  // Indices of non-constant columns.
  std::vector<Eigen::Index> free_columns() const;
};

// Column statistics of a dense design.
Standardization standardize(const Eigen::MatrixXd& x);
// Z with constant columns zeroed.
Eigen::MatrixXd standardized_design(const Eigen::MatrixXd& x, const Standardization& s);

// Two-pass construction from a dense design. Throws DataError when X is
// empty or y's length differs from X's row count.
LinearProblem make_problem(const Eigen::MatrixXd& x, std::span<const double> y);

// Uncentered sums (X^T X, X^T y, sum x, sum y, sum y^2, n) accumulated row by
// row. Accumulators over disjoint row sets can be added and subtracted, which
// turns k-fold cross-validation into k cheap subtractions from one total.
class MomentAccumulator {
 public:
  explicit MomentAccumulator(Eigen::Index width);

  // One row given by its nonzero entries (column indices need not be sorted
  // but must be distinct).
  void add_row(std::span<const Eigen::Index> columns, std::span<const double> values, double y);
  void add_dense_row(std::span<const double> row, double y);

  MomentAccumulator& operator+=(const MomentAccumulator& other);
  MomentAccumulator& operator-=(const MomentAccumulator& other);

  std::size_t count() const { return n_; }
  Eigen::Index width() const { return sum_x_.size(); }

  // Centers and standardizes. A column is treated as constant when its
  // variance is <= 1e-12 * max(1, mean^2). Throws DataError when empty.
  LinearProblem finish() const;

 private:
  Eigen::MatrixXd xx_;  // upper triangle maintained by add_row
  Eigen::VectorXd sum_x_;
  Eigen::VectorXd xy_;
  double sum_y_ = 0.0;
  double yy_ = 0.0;
  std::size_t n_ = 0;
};

}  // namespace sparcs::linear
