#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "oracles/normal_equations.hpp"
#include "sparcs/common/errors.hpp"
#include "sparcs/common/rng.hpp"
#include "sparcs/linear/lars.hpp"
#include "sparcs/linear/solvers.hpp"
#include "support/helpers.hpp"

using namespace sparcs;
using namespace sparcs::linear;

namespace {

Eigen::MatrixXd to_matrix(const std::vector<std::vector<double>>& rows) {
  Eigen::MatrixXd x(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows[0].size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  }
  return x;
}

struct Draw {
  std::vector<std::vector<double>> rows;
  std::vector<double> y;
};

Draw random_draw(Rng& rng, std::size_t n, std::size_t p, double noise = 1.0) {
  Draw d{std::vector<std::vector<double>>(n, std::vector<double>(p)), std::vector<double>(n)};
  std::vector<double> beta(p);
  for (auto& b : beta) b = 4.0 * uniform01(rng) - 2.0;
  for (std::size_t i = 0; i < n; ++i) {
    double y = 3.0;
    for (std::size_t j = 0; j < p; ++j) {
      d.rows[i][j] = 10.0 * standard_normal(rng) + static_cast<double>(j);
      y += beta[j] * d.rows[i][j];
    }
    d.y[i] = y + noise * standard_normal(rng);
  }
  return d;
}

// (1/n) Z^T (y - y_mean - Z beta) for the model's own standardization.
Eigen::VectorXd residual_correlation(const LinearProblem& p, const Eigen::VectorXd& beta) {
  return (p.xty - p.gram * beta) / static_cast<double>(p.n);
}

}  // namespace

TEST_SUITE("ols") {
  TEST_CASE("two points: slope 2, intercept 1") {
    const auto m = fit_ols(to_matrix({{0}, {1}}), std::vector<double>{1, 3});
    CHECK(m.raw_coefficients()(0) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(m.raw_intercept() == doctest::Approx(1.0).epsilon(1e-12));
  }

  TEST_CASE("y = 2x: coefficient 2, intercept 0") {
    const auto m = fit_ols(to_matrix({{1}, {2}, {3}, {4}, {5}}), std::vector<double>{2, 4, 6, 8, 10});
    CHECK(m.raw_coefficients()(0) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(std::abs(m.raw_intercept()) < 1e-10);
  }

  TEST_CASE("random systems match the normal-equations oracle; Gram and dense paths agree") {
    Rng rng(101);
    for (int trial = 0; trial < 20; ++trial) {
      const auto d = random_draw(rng, 20, 3);
      const auto oracle_fit = oracle::ridge_normal_equations(d.rows, d.y, 0.0L);
      const auto x = to_matrix(d.rows);
      const auto dense = fit_ols(x, d.y);
      const auto gram = fit_ols(make_problem(x, d.y));
      for (Eigen::Index j = 0; j < 3; ++j) {
        const double expected = static_cast<double>(oracle_fit.raw[static_cast<std::size_t>(j)]);
        CHECK(dense.raw_coefficients()(j) == doctest::Approx(expected).epsilon(1e-8));
        CHECK(gram.raw_coefficients()(j) == doctest::Approx(expected).epsilon(1e-8));
      }
      CHECK(dense.raw_intercept() == doctest::Approx(static_cast<double>(oracle_fit.intercept)).epsilon(1e-8));
    }
  }

  TEST_CASE("residuals are orthogonal to every column") {
    Rng rng(7);
    const auto d = random_draw(rng, 40, 4, 5.0);
    const auto x = to_matrix(d.rows);
    const auto m = fit_ols(x, d.y);
    const Eigen::VectorXd r = Eigen::Map<const Eigen::VectorXd>(d.y.data(), 40) - predict_linear(m, x);
    CHECK(std::abs(r.sum()) < 1e-8);
    for (Eigen::Index j = 0; j < 4; ++j) CHECK(std::abs(x.col(j).dot(r)) < 1e-6);
  }

  TEST_CASE("constant and duplicated columns do not break the fit") {
    const auto x = to_matrix({{1, 5, 1}, {2, 5, 2}, {3, 5, 3}, {4, 5, 4}});
    const std::vector<double> y{3, 5, 7, 9};
    const auto m = fit_ols(x, y);
    CHECK(m.raw_coefficients()(1) == 0.0);
    const auto pred = predict_linear(m, x);
    for (Eigen::Index i = 0; i < 4; ++i) CHECK(pred(i) == doctest::Approx(y[static_cast<std::size_t>(i)]));
  }
}

TEST_SUITE("ridge") {
  TEST_CASE("lambda 0 equals OLS") {
    Rng rng(5);
    const auto d = random_draw(rng, 30, 3);
    const auto x = to_matrix(d.rows);
    CHECK((fit_ridge(x, d.y, 0.0).coefficients - fit_ols(x, d.y).coefficients).norm() < 1e-9);
  }

  TEST_CASE("x = [-1, 1], y = [-1, 1], lambda 1 gives 2/3") {
    const auto m = fit_ridge(to_matrix({{-1}, {1}}), std::vector<double>{-1, 1}, 1.0);
    CHECK(m.coefficients(0) == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  }

  TEST_CASE("matches the oracle with a penalty") {
    Rng rng(55);
    for (int trial = 0; trial < 10; ++trial) {
      const auto d = random_draw(rng, 25, 4);
      const double lambda = 0.5 + 20.0 * uniform01(rng);
      const auto o = oracle::ridge_normal_equations(d.rows, d.y, lambda);
      const auto m = fit_ridge(to_matrix(d.rows), d.y, lambda);
      for (Eigen::Index j = 0; j < 4; ++j) {
        CHECK(m.coefficients(j) == doctest::Approx(static_cast<double>(o.standardized[static_cast<std::size_t>(j)])).epsilon(1e-8));
      }
    }
  }

  TEST_CASE("huge lambda shrinks to zero; norm non-increasing in lambda") {
    Rng rng(9);
    const auto d = random_draw(rng, 50, 3);
    const auto p = make_problem(to_matrix(d.rows), d.y);
    CHECK(fit_ridge(p, 1e6).coefficients.norm() < 1e-3 * fit_ols(p).coefficients.norm());
    double prev = fit_ridge(p, 0.0).coefficients.norm();
    for (double lambda : {0.01, 0.1, 1.0, 10.0, 100.0, 1e4}) {
      const double now = fit_ridge(p, lambda).coefficients.norm();
      CHECK(now <= prev + 1e-12);
      prev = now;
    }
  }

  TEST_CASE("negative lambda is rejected") {
    CHECK_THROWS_AS(fit_ridge(to_matrix({{1}, {2}}), std::vector<double>{1, 2}, -1.0), std::invalid_argument);
  }
}

TEST_SUITE("coordinate descent") {
  TEST_CASE("orthonormal design: OLS 1.0 at lambda 0.3 becomes 0.7") {
    const auto rows = testutil::hadamard_columns(8, 3);
    std::vector<double> y(8);
    for (std::size_t i = 0; i < 8; ++i) y[i] = rows[i][0];
    const auto m = fit_coordinate_descent(to_matrix(rows), y, 0.3, 1.0);
    CHECK(m.coefficients(0) == doctest::Approx(0.7).epsilon(1e-9));
    CHECK(m.coefficients(1) == 0.0);
    CHECK(m.coefficients(2) == 0.0);
  }

  TEST_CASE("orthonormal design: soft threshold of random OLS coefficients") {
    Rng rng(17);
    const auto rows = testutil::hadamard_columns(16, 5);
    const auto x = to_matrix(rows);
    for (int trial = 0; trial < 20; ++trial) {
      Eigen::VectorXd beta(5);
      for (auto& b : beta) b = 6.0 * uniform01(rng) - 3.0;
      const double lambda = 2.0 * uniform01(rng);
      const Eigen::VectorXd yv = x * beta;
      const std::vector<double> y(yv.data(), yv.data() + yv.size());
      const auto m = fit_coordinate_descent(x, y, lambda, 1.0, {1e-12, 10000});
      for (Eigen::Index j = 0; j < 5; ++j) CHECK(m.coefficients(j) == doctest::Approx(soft_threshold(beta(j), lambda)).epsilon(1e-6));
    }
  }

  TEST_CASE("lambda at lambda_max zeroes every coefficient") {
    Rng rng(3);
    const auto d = random_draw(rng, 60, 4);
    const auto p = make_problem(to_matrix(d.rows), d.y);
    for (double ratio : {1.0, 0.5}) {
      const auto m = fit_coordinate_descent(p, lambda_max(p, ratio), ratio);
      CHECK(m.coefficients.isZero(0.0));
      CHECK_FALSE(fit_coordinate_descent(p, 0.99 * lambda_max(p, ratio), ratio).coefficients.isZero(0.0));
    }
  }

  TEST_CASE("l1_ratio 0 equals ridge with penalty n * lambda") {
    Rng rng(29);
    const auto d = random_draw(rng, 40, 3);
    const auto p = make_problem(to_matrix(d.rows), d.y);
    const double lambda = 0.37;
    const auto cd = fit_coordinate_descent(p, lambda, 0.0, {1e-12, 100000});
    const auto ridge = fit_ridge(p, 40.0 * lambda);
    CHECK((cd.coefficients - ridge.coefficients).cwiseAbs().maxCoeff() < 1e-6);
  }

  TEST_CASE("solutions satisfy the KKT conditions") {
    Rng rng(41);
    for (int trial = 0; trial < 10; ++trial) {
      const auto d = random_draw(rng, 80, 6, 20.0);
      const auto p = make_problem(to_matrix(d.rows), d.y);
      const double ratio = trial % 2 ? 1.0 : 0.5;
      const double lambda = lambda_max(p, ratio) * (0.05 + 0.5 * uniform01(rng));
      const auto m = fit_coordinate_descent(p, lambda, ratio, {1e-12, 100000});
      REQUIRE(m.converged);
      const auto c = residual_correlation(p, m.coefficients);
      const double l1 = ratio * lambda;
      const double tol = 1e-7 * std::max(1.0, lambda);
      for (Eigen::Index j = 0; j < 6; ++j) {
        if (m.coefficients(j) != 0.0) {
          CHECK(std::abs(c(j) - (1.0 - ratio) * lambda * m.coefficients(j)) == doctest::Approx(l1).epsilon(1e-7));
        } else {
          CHECK(std::abs(c(j)) <= l1 + tol);
        }
      }
    }
  }

  TEST_CASE("sweep budget exhaustion is flagged") {
    Rng rng(2);
    const auto d = random_draw(rng, 50, 5);
    const auto p = make_problem(to_matrix(d.rows), d.y);
    const auto m = fit_coordinate_descent(p, 1e-6, 1.0, {1e-14, 1});
    CHECK_FALSE(m.converged);
    CHECK(m.iterations == 1);
  }

  TEST_CASE("warm start reaches the same solution") {
    Rng rng(12);
    const auto d = random_draw(rng, 60, 4);
    const auto p = make_problem(to_matrix(d.rows), d.y);
    const double lambda = 0.1 * lambda_max(p, 1.0);
    const auto cold = fit_coordinate_descent(p, lambda, 1.0, {1e-12, 100000});
    const Eigen::VectorXd start = fit_ols(p).coefficients;
    const auto warm = fit_coordinate_descent(p, lambda, 1.0, {1e-12, 100000}, &start);
    CHECK((cold.coefficients - warm.coefficients).cwiseAbs().maxCoeff() < 1e-8);
  }

  TEST_CASE("log grid spans hi down to hi * ratio") {
    const auto g = log_grid(100.0, 5, 1e-4);
    REQUIRE(g.size() == 5);
    CHECK(g.front() == doctest::Approx(100.0));
    CHECK(g.back() == doctest::Approx(0.01));
    CHECK(g[1] == doctest::Approx(10.0));
    CHECK_THROWS_AS(log_grid(0.0), std::invalid_argument);
  }
}

TEST_SUITE("lars") {
  TEST_CASE("the feature with the larger correlation enters first") {
    Rng rng(77);
    const std::size_t n = 500;
    std::vector<std::vector<double>> rows(n, std::vector<double>(2));
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double signal = standard_normal(rng);
      y[i] = signal;
      rows[i][0] = 0.2 * signal + std::sqrt(1 - 0.04) * standard_normal(rng);
      rows[i][1] = 0.9 * signal + std::sqrt(1 - 0.81) * standard_normal(rng);
    }
    const auto path = lars_path(make_problem(to_matrix(rows), y));
    REQUIRE(path.steps.size() >= 2);
    CHECK(path.steps[0].active == std::vector<Eigen::Index>{1});
    CHECK(path.steps[0].df == 0);
    CHECK(path.steps[1].active.front() == 1);
  }

  TEST_CASE("single strong feature: AIC prefers it over the null model") {
    Rng rng(4);
    const std::size_t n = 50;
    std::vector<std::vector<double>> rows(n, std::vector<double>(1));
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      rows[i][0] = standard_normal(rng);
      y[i] = 5.0 * rows[i][0] + standard_normal(rng);
    }
    const auto fit = fit_lars_ic(to_matrix(rows), y, InformationCriterion::kAic);
    const auto& steps = fit.path.steps;
    REQUIRE(steps.size() == 2);
    const double null_aic = n * std::log(steps[0].rss / n);
    const double one_aic = n * std::log(steps[1].rss / n) + 2.0;
    CHECK(steps[0].aic == doctest::Approx(null_aic));
    CHECK(steps[1].aic == doctest::Approx(one_aic));
    CHECK(one_aic < null_aic);
    CHECK(fit.path.aic_index == 1);
    CHECK(fit.model.coefficients(0) != 0.0);
    const auto ols = fit_ols(to_matrix(rows), y);
    CHECK(fit.model.coefficients(0) == doctest::Approx(ols.coefficients(0)).epsilon(1e-9));
  }

  TEST_CASE("path invariants on random problems") {
    Rng rng(2024);
    for (int trial = 0; trial < 30; ++trial) {
      const std::size_t n = 8 + uniform_index(rng, 60);
      const std::size_t pcols = 2 + uniform_index(rng, 6);
      const auto d = random_draw(rng, n, pcols, 30.0);
      const auto p = make_problem(to_matrix(d.rows), d.y);
      const auto path = lars_path(p);
      REQUIRE_FALSE(path.steps.empty());
      for (std::size_t s = 0; s < path.steps.size(); ++s) {
        const auto& step = path.steps[s];
        const auto c = residual_correlation(p, step.coefficients);
        const double scale = std::max(1.0, path.steps[0].lambda);
        for (auto j : step.active) CHECK(std::abs(std::abs(c(j)) - step.lambda) <= 1e-8 * scale);
        for (Eigen::Index j = 0; j < p.width(); ++j) CHECK(std::abs(c(j)) <= step.lambda + 1e-8 * scale);
        if (s > 0) {
          CHECK(step.lambda < path.steps[s - 1].lambda);
          // The closing step (lambda 0) only finishes the move to least squares.
          const auto prev = path.steps[s - 1].active.size();
          const auto change = std::max(step.active.size(), prev) - std::min(step.active.size(), prev);
          CHECK(change == (step.lambda > 0.0 ? 1u : 0u));
        }
      }
      CHECK(path.steps[path.bic_index].df <= path.steps[path.aic_index].df);
    }
  }

  TEST_CASE("every step is the lasso solution at its lambda, drops included") {
    Rng rng(606);
    int drops = 0;
    for (int trial = 0; trial < 40; ++trial) {
      const std::size_t n = 30;
      const std::size_t p = 8;
      std::vector<std::vector<double>> rows(n, std::vector<double>(p));
      std::vector<double> y(n);
      for (std::size_t i = 0; i < n; ++i) {
        const double shared = standard_normal(rng);
        for (std::size_t j = 0; j < p; ++j) rows[i][j] = shared + 0.3 * standard_normal(rng);
        y[i] = 10.0 * rows[i][0] - 9.0 * rows[i][1] + 4.0 * rows[i][2] + standard_normal(rng);
      }
      const auto prob = make_problem(to_matrix(rows), y);
      const auto path = lars_path(prob);
      for (std::size_t s = 0; s < path.steps.size(); ++s) {
        const auto& step = path.steps[s];
        if (s > 0 && step.active.size() < path.steps[s - 1].active.size()) ++drops;
        if (step.lambda <= 0.0) continue;
        const auto cd = fit_coordinate_descent(prob, step.lambda, 1.0, {1e-13, 200000});
        REQUIRE(cd.converged);
        CHECK((cd.coefficients - step.coefficients).cwiseAbs().maxCoeff() <= 1e-6 * (1.0 + step.coefficients.cwiseAbs().maxCoeff()));
      }
    }
    CHECK(drops > 0);
  }

  TEST_CASE("final step reproduces OLS when n > p") {
    Rng rng(88);
    const auto d = random_draw(rng, 60, 4, 3.0);
    const auto p = make_problem(to_matrix(d.rows), d.y);
    const auto path = lars_path(p);
    CHECK((path.steps.back().coefficients - fit_ols(p).coefficients).cwiseAbs().maxCoeff() < 1e-7);
  }

  TEST_CASE("all-constant design is rejected; criterion parsing") {
    CHECK_THROWS_AS(lars_path(make_problem(to_matrix({{1, 2}, {1, 2}, {1, 2}}), std::vector<double>{1, 2, 3})),
                    DataError);
    CHECK(criterion_from_string("bic") == InformationCriterion::kBic);
    CHECK_THROWS_AS(criterion_from_string("cp"), std::invalid_argument);
  }

  TEST_CASE("path JSON lists nonzero coefficients by label") {
    const auto rows = testutil::hadamard_columns(8, 2);
    std::vector<double> y(8);
    for (std::size_t i = 0; i < 8; ++i) y[i] = 2.0 * rows[i][0] + 0.5 * rows[i][1];
    const auto j = lars_path(make_problem(to_matrix(rows), y)).to_json({"a", "b"});
    CHECK(j["steps"][0]["coefficients"].empty());
    CHECK(j["steps"].back()["coefficients"].contains("b"));
  }
}

TEST_SUITE("linear model") {
  TEST_CASE("zero coefficients predict the intercept") {
    LinearModel m;
    m.coefficients = Eigen::VectorXd::Zero(2);
    m.intercept = 42.0;
    m.standardization.mean = Eigen::VectorXd::Zero(2);
    m.standardization.scale = Eigen::VectorXd::Ones(2);
    m.standardization.constant = {false, false};
    CHECK(predict_linear(m, to_matrix({{1, 2}, {-3, 7}})) == Eigen::Vector2d(42.0, 42.0));
    CHECK_THROWS_AS(predict_linear(m, to_matrix({{1, 2, 3}})), DataError);
    const std::vector<double> short_row{1.0};
    CHECK_THROWS_AS(m.predict_row(short_row), DataError);
  }

  TEST_CASE("prediction is the raw dot product; JSON round trip") {
    Rng rng(61);
    const auto d = random_draw(rng, 30, 3);
    const auto x = to_matrix(d.rows);
    const auto m = fit_ridge(x, d.y, 2.5);
    const auto raw = m.raw_coefficients();
    const auto pred = predict_linear(m, x);
    for (Eigen::Index i = 0; i < 30; ++i) {
      CHECK(pred(i) == doctest::Approx(m.raw_intercept() + x.row(i).dot(raw)).epsilon(1e-10));
    }
    const auto back = LinearModel::from_json(nlohmann::json::parse(m.to_json().dump()));
    CHECK(back.family == LinearFamily::kRidge);
    CHECK(back.lambda == m.lambda);
    CHECK((predict_linear(back, x) - pred).cwiseAbs().maxCoeff() == 0.0);
  }

  TEST_CASE("moment accumulator matches the dense problem; subtraction undoes addition") {
    Rng rng(19);
    const auto d = random_draw(rng, 40, 3);
    const auto x = to_matrix(d.rows);
    MomentAccumulator all(3), part(3);
    for (std::size_t i = 0; i < 40; ++i) {
      all.add_dense_row(d.rows[i], d.y[i]);
      if (i >= 30) part.add_dense_row(d.rows[i], d.y[i]);
    }
    const auto dense = make_problem(x, d.y);
    const auto acc = all.finish();
    CHECK((acc.gram - dense.gram).cwiseAbs().maxCoeff() < 1e-8);
    CHECK((acc.xty - dense.xty).cwiseAbs().maxCoeff() < 1e-6);
    CHECK(acc.yty == doctest::Approx(dense.yty));

    MomentAccumulator head = all;
    head -= part;
    const std::vector<double> y_head(d.y.begin(), d.y.begin() + 30);
    const auto expected = make_problem(x.topRows(30), y_head);
    const auto got = head.finish();
    CHECK(got.n == 30);
    CHECK((got.xty - expected.xty).cwiseAbs().maxCoeff() < 1e-6);
  }

  TEST_CASE("family names round trip") {
    for (auto f : {LinearFamily::kOls, LinearFamily::kRidge, LinearFamily::kLasso, LinearFamily::kElasticNet,
                   LinearFamily::kLarsIc}) {
      CHECK(linear_family_from_string(to_string(f)) == f);
    }
  }
}
