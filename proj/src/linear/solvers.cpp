#include "sparcs/linear/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sparcs/common/errors.hpp"

namespace sparcs::linear {

namespace {

constexpr double kRankThreshold = 1e-10;

LinearModel blank_model(const LinearProblem& p, LinearFamily family) {
  LinearModel m;
  m.family = family;
  m.coefficients = Eigen::VectorXd::Zero(p.width());
  m.intercept = p.y_mean;
  m.standardization = p.standardization;
  return m;
}

Eigen::MatrixXd free_block(const Eigen::MatrixXd& g, const std::vector<Eigen::Index>& idx) {
  const auto k = static_cast<Eigen::Index>(idx.size());
  Eigen::MatrixXd out(k, k);
  for (Eigen::Index a = 0; a < k; ++a) {
    for (Eigen::Index b = 0; b < k; ++b) out(a, b) = g(idx[static_cast<std::size_t>(a)], idx[static_cast<std::size_t>(b)]);
  }
  return out;
}

Eigen::VectorXd free_part(const Eigen::VectorXd& v, const std::vector<Eigen::Index>& idx) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t a = 0; a < idx.size(); ++a) out(static_cast<Eigen::Index>(a)) = v(idx[a]);
  return out;
}

void scatter(const Eigen::VectorXd& values, const std::vector<Eigen::Index>& idx, Eigen::VectorXd& dst) {
  for (std::size_t a = 0; a < idx.size(); ++a) dst(idx[a]) = values(static_cast<Eigen::Index>(a));
}

}  // namespace

LinearModel fit_ols(const Eigen::MatrixXd& x, std::span<const double> y) {
  if (x.rows() == 0) throw DataError("fit_ols: empty data");
  if (static_cast<std::size_t>(x.rows()) != y.size()) throw DataError("fit_ols: row count mismatch");
  LinearModel m;
  m.family = LinearFamily::kOls;
  m.standardization = standardize(x);
  const Eigen::Map<const Eigen::VectorXd> yv(y.data(), x.rows());
  m.intercept = yv.mean();
  m.coefficients = Eigen::VectorXd::Zero(x.cols());

  std::vector<Eigen::Index> free;
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    if (!m.standardization.constant[static_cast<std::size_t>(j)]) free.push_back(j);
  }
  if (free.empty()) return m;
  Eigen::MatrixXd z(x.rows(), static_cast<Eigen::Index>(free.size()));
  for (std::size_t a = 0; a < free.size(); ++a) {
    const Eigen::Index j = free[a];
    z.col(static_cast<Eigen::Index>(a)) =
        (x.col(j).array() - m.standardization.mean(j)) / m.standardization.scale(j);
  }
  const Eigen::VectorXd yc = yv.array() - m.intercept;
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod;
  cod.setThreshold(kRankThreshold);
  cod.compute(z);
  scatter(cod.solve(yc), free, m.coefficients);
  return m;
}

LinearModel fit_ols(const LinearProblem& problem) {
  LinearModel m = blank_model(problem, LinearFamily::kOls);
  const auto free = problem.free_columns();
  if (free.empty()) return m;
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod;
  cod.setThreshold(kRankThreshold);
  cod.compute(free_block(problem.gram, free));
  scatter(cod.solve(free_part(problem.xty, free)), free, m.coefficients);
  return m;
}

LinearModel fit_ridge(const LinearProblem& problem, double lambda) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("ridge lambda must be finite and >= 0");
  }
  if (lambda == 0.0) {
    LinearModel m = fit_ols(problem);
    m.family = LinearFamily::kRidge;
    return m;
  }
  LinearModel m = blank_model(problem, LinearFamily::kRidge);
  m.lambda = lambda;
  const auto free = problem.free_columns();
  if (free.empty()) return m;
  Eigen::MatrixXd a = free_block(problem.gram, free);
  a.diagonal().array() += lambda;
  scatter(a.ldlt().solve(free_part(problem.xty, free)), free, m.coefficients);
  return m;
}

LinearModel fit_ridge(const Eigen::MatrixXd& x, std::span<const double> y, double lambda) {
  return fit_ridge(make_problem(x, y), lambda);
}

LinearModel fit_coordinate_descent(const LinearProblem& problem, double lambda, double l1_ratio,
                                   const CoordinateDescentConfig& cfg,
                                   const Eigen::VectorXd* warm_start) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("coordinate descent lambda must be finite and >= 0");
  }
  if (!(l1_ratio >= 0.0 && l1_ratio <= 1.0)) {
    throw std::invalid_argument("l1_ratio must lie in [0, 1]");
  }
  if (!(cfg.tolerance > 0.0) || cfg.max_sweeps < 1) {
    throw std::invalid_argument("coordinate descent needs tolerance > 0 and max_sweeps >= 1");
  }
  LinearModel m = blank_model(problem, l1_ratio == 1.0 ? LinearFamily::kLasso : LinearFamily::kElasticNet);
  m.lambda = lambda;
  m.l1_ratio = l1_ratio;
  m.converged = false;

  const auto free = problem.free_columns();
  const auto n = static_cast<double>(problem.n);
  const double l1 = lambda * l1_ratio;
  const double l2 = lambda * (1.0 - l1_ratio);
  Eigen::VectorXd& beta = m.coefficients;
  if (warm_start) {
    if (warm_start->size() != problem.width()) throw std::invalid_argument("warm start width mismatch");
    for (auto j : free) beta(j) = (*warm_start)(j);
  }
  // Coefficients are in target units, so the stopping rule is too.
  const double y_sd = std::sqrt(problem.yty / n);
  const double stop = cfg.tolerance * (y_sd > 0.0 ? y_sd : 1.0);
  // h = G beta, kept current as coordinates move.
  Eigen::VectorXd h = problem.gram * beta;

  for (int sweep = 1; sweep <= cfg.max_sweeps; ++sweep) {
    double max_change = 0.0;
    for (auto j : free) {
      const double gjj = problem.gram(j, j);
      const double rho = (problem.xty(j) - h(j) + gjj * beta(j)) / n;
      const double updated = soft_threshold(rho, l1) / (gjj / n + l2);
      const double delta = updated - beta(j);
      if (delta != 0.0) {
        h += delta * problem.gram.col(j);
        beta(j) = updated;
        max_change = std::max(max_change, std::abs(delta));
      }
    }
    m.iterations = sweep;
    if (max_change < stop) {
      m.converged = true;
      break;
    }
  }
  return m;
}

LinearModel fit_coordinate_descent(const Eigen::MatrixXd& x, std::span<const double> y, double lambda,
                                   double l1_ratio, const CoordinateDescentConfig& cfg) {
  return fit_coordinate_descent(make_problem(x, y), lambda, l1_ratio, cfg);
}

double lambda_max(const LinearProblem& problem, double l1_ratio) {
  if (problem.width() == 0 || problem.n == 0) return 0.0;
  const double peak = problem.xty.cwiseAbs().maxCoeff() / static_cast<double>(problem.n);
  return l1_ratio > 0.0 ? peak / l1_ratio : peak;
}

std::vector<double> log_grid(double hi, std::size_t points, double ratio) {
  if (!(hi > 0.0) || points == 0 || !(ratio > 0.0 && ratio <= 1.0)) {
    throw std::invalid_argument("log_grid needs hi > 0, points > 0, ratio in (0, 1]");
  }
  std::vector<double> grid;
  if (points == 1) return {hi};
  const double step = std::log(ratio) / static_cast<double>(points - 1);
  for (std::size_t i = 0; i < points; ++i) grid.push_back(hi * std::exp(step * static_cast<double>(i)));
  return grid;
}

}  // namespace sparcs::linear
