#include "sparcs/linear/problem.hpp"

#include <algorithm>
#include <cmath>

#include "sparcs/common/errors.hpp"

namespace sparcs::linear {

bool Standardization::all_constant() const {
  return std::all_of(constant.begin(), constant.end(), [](bool c) { return c; });
}

std::vector<Eigen::Index> LinearProblem::free_columns() const {
  std::vector<Eigen::Index> out;
  for (Eigen::Index j = 0; j < width(); ++j) {
    if (!standardization.constant[static_cast<std::size_t>(j)]) out.push_back(j);
  }
  return out;
}

Standardization standardize(const Eigen::MatrixXd& x) {
  const auto n = static_cast<double>(x.rows());
  Standardization s;
  s.mean = x.colwise().mean().transpose();
  s.scale = Eigen::VectorXd::Ones(x.cols());
  s.constant.assign(static_cast<std::size_t>(x.cols()), false);
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const auto col = x.col(j);
    if (col.maxCoeff() == col.minCoeff()) {
      s.constant[static_cast<std::size_t>(j)] = true;
      continue;
    }
    const double var = (col.array() - s.mean(j)).square().sum() / n;
    s.scale(j) = std::sqrt(var);
  }
  return s;
}

Eigen::MatrixXd standardized_design(const Eigen::MatrixXd& x, const Standardization& s) {
  Eigen::MatrixXd z(x.rows(), x.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    if (s.constant[static_cast<std::size_t>(j)]) {
      z.col(j).setZero();
    } else {
      z.col(j) = (x.col(j).array() - s.mean(j)) / s.scale(j);
    }
  }
  return z;
}

LinearProblem make_problem(const Eigen::MatrixXd& x, std::span<const double> y) {
  if (x.rows() == 0) throw DataError("linear fit: empty data");
  if (static_cast<std::size_t>(x.rows()) != y.size()) {
    throw DataError("linear fit: design has " + std::to_string(x.rows()) + " rows, target has " +
                    std::to_string(y.size()));
  }
  LinearProblem p;
  p.n = y.size();
  p.standardization = standardize(x);
  const Eigen::MatrixXd z = standardized_design(x, p.standardization);
  const Eigen::Map<const Eigen::VectorXd> yv(y.data(), static_cast<Eigen::Index>(y.size()));
  p.y_mean = yv.mean();
  const Eigen::VectorXd yc = yv.array() - p.y_mean;
  p.gram = z.transpose() * z;
  p.xty = z.transpose() * yc;
  p.yty = yc.squaredNorm();
  return p;
}

MomentAccumulator::MomentAccumulator(Eigen::Index width)
    : xx_(Eigen::MatrixXd::Zero(width, width)),
      sum_x_(Eigen::VectorXd::Zero(width)),
      xy_(Eigen::VectorXd::Zero(width)) {}

void MomentAccumulator::add_row(std::span<const Eigen::Index> columns, std::span<const double> values,
                                double y) {
  for (std::size_t a = 0; a < columns.size(); ++a) {
    const Eigen::Index i = columns[a];
    const double vi = values[a];
    sum_x_(i) += vi;
    xy_(i) += vi * y;
    for (std::size_t b = 0; b < columns.size(); ++b) {
      const Eigen::Index j = columns[b];
      if (j >= i) xx_(i, j) += vi * values[b];
    }
  }
  sum_y_ += y;
  yy_ += y * y;
  ++n_;
}

void MomentAccumulator::add_dense_row(std::span<const double> row, double y) {
  const auto w = static_cast<Eigen::Index>(row.size());
  const Eigen::Map<const Eigen::VectorXd> v(row.data(), w);
  xx_.selfadjointView<Eigen::Upper>().rankUpdate(v);
  sum_x_ += v;
  xy_ += v * y;
  sum_y_ += y;
  yy_ += y * y;
  ++n_;
}

MomentAccumulator& MomentAccumulator::operator+=(const MomentAccumulator& o) {
  xx_ += o.xx_;
  sum_x_ += o.sum_x_;
  xy_ += o.xy_;
  sum_y_ += o.sum_y_;
  yy_ += o.yy_;
  n_ += o.n_;
  return *this;
}

MomentAccumulator& MomentAccumulator::operator-=(const MomentAccumulator& o) {
  xx_ -= o.xx_;
  sum_x_ -= o.sum_x_;
  xy_ -= o.xy_;
  sum_y_ -= o.sum_y_;
  yy_ -= o.yy_;
  n_ -= o.n_;
  return *this;
}

LinearProblem MomentAccumulator::finish() const {
  if (n_ == 0) throw DataError("linear fit: empty data");
  const auto n = static_cast<double>(n_);
  const Eigen::Index w = width();
  LinearProblem p;
  p.n = n_;
  p.y_mean = sum_y_ / n;
  p.yty = std::max(0.0, yy_ - n * p.y_mean * p.y_mean);

  Standardization& s = p.standardization;
  s.mean = sum_x_ / n;
  s.scale = Eigen::VectorXd::Ones(w);
  s.constant.assign(static_cast<std::size_t>(w), false);
  for (Eigen::Index j = 0; j < w; ++j) {
    const double var = xx_(j, j) / n - s.mean(j) * s.mean(j);
    if (var <= 1e-12 * std::max(1.0, s.mean(j) * s.mean(j))) {
      s.constant[static_cast<std::size_t>(j)] = true;
    } else {
      s.scale(j) = std::sqrt(var);
    }
  }

  p.gram = Eigen::MatrixXd::Zero(w, w);
  p.xty = Eigen::VectorXd::Zero(w);
  for (Eigen::Index i = 0; i < w; ++i) {
    if (s.constant[static_cast<std::size_t>(i)]) continue;
    p.xty(i) = (xy_(i) - n * s.mean(i) * p.y_mean) / s.scale(i);
    for (Eigen::Index j = i; j < w; ++j) {
      if (s.constant[static_cast<std::size_t>(j)]) continue;
      const double g = (xx_(i, j) - n * s.mean(i) * s.mean(j)) / (s.scale(i) * s.scale(j));
      p.gram(i, j) = g;
      p.gram(j, i) = g;
    }
  }
  return p;
}

}  // namespace sparcs::linear
