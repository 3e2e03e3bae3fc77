#include "sparcs/eval/cross_validation.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <future>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>

#include "sparcs/common/errors.hpp"
#include "sparcs/common/rng.hpp"
#include "sparcs/data/one_hot.hpp"
#include "sparcs/eval/metrics.hpp"
#include "sparcs/linear/solvers.hpp"
#include "sparcs/tree/tree_builder.hpp"

namespace sparcs::eval {

using model::HyperParams;
using model::ModelFamily;

namespace {

bool is_penalized(ModelFamily f) {
  return f == ModelFamily::kRidge || f == ModelFamily::kLasso || f == ModelFamily::kElasticNet;
}

// R^2 of every setting on one fold.
using FoldScorer = std::function<std::vector<double>(std::size_t fold)>;

std::vector<std::vector<double>> run_folds(std::size_t k, unsigned threads, const FoldScorer& score) {
  std::vector<std::vector<double>> per_fold(k);
  if (threads <= 1) {
    for (std::size_t f = 0; f < k; ++f) per_fold[f] = score(f);
    return per_fold;
  }
  for (std::size_t start = 0; start < k; start += threads) {
    std::vector<std::future<std::vector<double>>> jobs;
    const std::size_t stop = std::min(k, start + threads);
    for (std::size_t f = start; f < stop; ++f) jobs.push_back(std::async(std::launch::async, score, f));
    for (std::size_t f = start; f < stop; ++f) per_fold[f] = jobs[f - start].get();
  }
  return per_fold;
}

std::vector<double> gather(std::span<const double> values, std::span<const std::size_t> rows) {
  std::vector<double> out;
  out.reserve(rows.size());
  for (std::size_t r : rows) out.push_back(values[r]);
  return out;
}

FoldScorer tree_scorer(const data::Dataset& train, const std::vector<std::vector<std::size_t>>& folds,
                       const std::vector<HyperParams>& grid, const tree::FeatureColumns& columns,
                       const tree::SortedIndex& full) {
  return [&train, &folds, &grid, &columns, &full](std::size_t f) {
    const auto& held = folds[f];
    std::vector<char> keep(train.row_count(), 1);
    for (std::size_t r : held) keep[r] = 0;
    const tree::SortedIndex rows = full.subset(keep);
    const auto actual = gather(train.target(), held);

    // One fit per min_leaf at the deepest requested depth; shallower
    // settings are exact truncations of it.
    std::map<std::size_t, int> deepest;
    for (const auto& p : grid) {
      if (rows.size() < 2 * p.min_leaf) {
        throw DataError("fold " + std::to_string(f) + " leaves " + std::to_string(rows.size()) +
                        " training rows, fewer than 2 * min_leaf");
      }
      auto [it, fresh] = deepest.emplace(p.min_leaf, p.max_depth);
      if (!fresh) it->second = std::max(it->second, p.max_depth);
    }
    std::map<std::size_t, tree::RegressionTree> fitted;
    for (const auto& [leaf, depth] : deepest) {
      fitted.emplace(leaf, tree::fit_tree(columns, train.target(), rows, tree::TreeConfig{depth, leaf}));
    }

    std::vector<double> scores;
    std::vector<double> buf(train.feature_count());
    for (const auto& p : grid) {
      const auto t = fitted.at(p.min_leaf).truncated(p.max_depth);
      std::vector<double> pred;
      pred.reserve(held.size());
      for (std::size_t r : held) {
        train.row(r, buf);
        pred.push_back(t.predict(buf));
      }
      scores.push_back(r2(actual, pred));
    }
    return scores;
  };
}

FoldScorer linear_scorer(const data::Dataset& train, const std::vector<std::vector<std::size_t>>& folds,
                         const std::vector<HyperParams>& grid, ModelFamily family,
                         const data::OneHotLayout& layout,
                         const std::vector<linear::MomentAccumulator>& fold_moments,
                         const linear::MomentAccumulator& total) {
  return [&, family](std::size_t f) {
    linear::MomentAccumulator rest = total;
    rest -= fold_moments[f];
    if (rest.count() < 2) throw DataError("fold " + std::to_string(f) + " leaves fewer than 2 training rows");
    const linear::LinearProblem problem = rest.finish();
    const auto& held = folds[f];
    const auto actual = gather(train.target(), held);

    std::vector<double> scores;
    Eigen::VectorXd warm;
    for (const auto& p : grid) {
      linear::LinearModel m;
      if (family == ModelFamily::kRidge) {
        m = linear::fit_ridge(problem, p.lambda);
      } else {
        const double ratio = family == ModelFamily::kLasso ? 1.0 : p.l1_ratio;
        m = linear::fit_coordinate_descent(problem, p.lambda, ratio, p.cd, warm.size() ? &warm : nullptr);
        warm = m.coefficients;
      }
      const Eigen::VectorXd raw = m.raw_coefficients();
      const double intercept = m.raw_intercept();
      std::vector<double> pred;
      pred.reserve(held.size());
      for (std::size_t r : held) {
        double y = intercept;
        layout.for_each_entry(train, r, [&](std::size_t c, double v) { y += raw(static_cast<Eigen::Index>(c)) * v; });
        pred.push_back(y);
      }
      scores.push_back(r2(actual, pred));
    }
    return scores;
  };
}

}  // namespace

std::vector<std::vector<std::size_t>> kfold_partition(std::size_t n, std::size_t k, std::uint64_t seed) {
  if (k < 2 || k > n) {
    throw std::invalid_argument("k-fold needs 2 <= k <= n (k = " + std::to_string(k) +
                                ", n = " + std::to_string(n) + ")");
  }
  const auto perm = shuffled_indices(n, seed);
  std::vector<std::vector<std::size_t>> folds(k);
  for (std::size_t f = 0; f < k; ++f) {
    const std::size_t lo = f * n / k;
    const std::size_t hi = (f + 1) * n / k;
    folds[f].assign(perm.begin() + static_cast<std::ptrdiff_t>(lo), perm.begin() + static_cast<std::ptrdiff_t>(hi));
    std::sort(folds[f].begin(), folds[f].end());
  }
  return folds;
}

nlohmann::json CvResult::to_json() const {
  nlohmann::json settings = nlohmann::json::array();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    settings.push_back({
        {"hyperparameters", grid[i].to_json(family)},
        {"mean_r2", mean_r2[i]},
        {"std_r2", std_r2[i]},
        {"fold_r2", fold_r2[i]},
    });
  }
  return {
      {"family", model::to_string(family)},
      {"folds", folds},
      {"seed", seed},
      {"settings", std::move(settings)},
      {"chosen", chosen},
      {"best", grid.empty() ? nlohmann::json(nullptr) : grid[chosen].to_json(family)},
  };
}

CvResult cross_validate(const data::Dataset& train, ModelFamily family, const std::vector<HyperParams>& grid,
                        const CvConfig& cfg) {
  if (family != ModelFamily::kTree && !is_penalized(family)) {
    throw std::invalid_argument("cross-validation is not defined for model family " +
                                std::string(model::to_string(family)));
  }
  if (grid.empty()) throw std::invalid_argument("cross-validation grid is empty");
  for (const auto& p : grid) {
    if (family == ModelFamily::kTree && (p.max_depth < 1 || p.min_leaf < 1)) {
      throw std::invalid_argument("tree grid needs max_depth >= 1 and min_leaf >= 1");
    }
    if (family != ModelFamily::kTree && !(p.lambda >= 0.0)) {
      throw std::invalid_argument("penalty grid values must be >= 0");
    }
  }
  const auto folds = kfold_partition(train.row_count(), cfg.folds, cfg.seed);

  std::vector<std::vector<double>> per_fold;
  if (family == ModelFamily::kTree) {
    const tree::FeatureColumns columns(train);
    const tree::SortedIndex full(columns);
    per_fold = run_folds(folds.size(), cfg.threads, tree_scorer(train, folds, grid, columns, full));
  } else {
    const data::OneHotLayout layout(train.schema());
    std::vector<linear::MomentAccumulator> moments;
    linear::MomentAccumulator total(static_cast<Eigen::Index>(layout.width()));
    for (const auto& fold : folds) {
      moments.push_back(model::accumulate_one_hot(train, layout, fold));
      total += moments.back();
    }
    per_fold = run_folds(folds.size(), cfg.threads,
                         linear_scorer(train, folds, grid, family, layout, moments, total));
  }

  CvResult out;
  out.family = family;
  out.folds = folds.size();
  out.seed = cfg.seed;
  out.grid = grid;
  const double k = static_cast<double>(folds.size());
  for (std::size_t s = 0; s < grid.size(); ++s) {
    std::vector<double> scores;
    for (const auto& fold : per_fold) scores.push_back(fold[s]);
    const double mean = std::accumulate(scores.begin(), scores.end(), 0.0) / k;
    double ss = 0.0;
    for (double v : scores) ss += (v - mean) * (v - mean);
    out.fold_r2.push_back(std::move(scores));
    out.mean_r2.push_back(mean);
    out.std_r2.push_back(std::sqrt(ss / (k - 1.0)));
    if (mean > out.mean_r2[out.chosen]) out.chosen = s;
  }
  return out;
}

std::vector<HyperParams> default_grid(const data::Dataset& train, ModelFamily family, const HyperParams& base) {
  std::vector<HyperParams> grid;
  if (family == ModelFamily::kTree) {
    for (int d = 2; d <= 16; ++d) {
      HyperParams p = base;
      p.max_depth = d;
      grid.push_back(p);
    }
    return grid;
  }
  if (!is_penalized(family)) {
    throw std::invalid_argument("no tuning grid for model family " + std::string(model::to_string(family)));
  }
  const data::OneHotLayout layout(train.schema());
  const auto problem = model::accumulate_one_hot(train, layout).finish();
  double hi = 0.0;
  double ratio = 1e-4;
  if (family == ModelFamily::kRidge) {
    // The ridge penalty is measured against the Gram diagonal (n).
    hi = 1e2 * static_cast<double>(problem.n);
    ratio = 1e-6;
  } else {
    hi = linear::lambda_max(problem, family == ModelFamily::kElasticNet ? base.l1_ratio : 1.0);
    if (!(hi > 0.0)) throw DataError("target has no correlation with any feature; penalty grid is empty");
  }
  for (double lambda : linear::log_grid(hi, 20, ratio)) {
    HyperParams p = base;
    p.lambda = lambda;
    grid.push_back(p);
  }
  return grid;
}

}  // namespace sparcs::eval
