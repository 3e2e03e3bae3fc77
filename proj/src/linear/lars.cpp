#include "sparcs/linear/lars.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sparcs/common/errors.hpp"

namespace sparcs::linear {

std::string_view to_string(InformationCriterion c) {
  return c == InformationCriterion::kAic ? "aic" : "bic";
}

InformationCriterion criterion_from_string(std::string_view text) {
  if (text == "aic") return InformationCriterion::kAic;
  if (text == "bic") return InformationCriterion::kBic;
  throw std::invalid_argument("criterion must be aic or bic, got '" + std::string(text) + "'");
}

double information_criterion(std::size_t n, double rss, int df, InformationCriterion c) {
  const auto nd = static_cast<double>(n);
  const double penalty = c == InformationCriterion::kAic ? 2.0 : std::log(nd);
  return nd * std::log(rss / nd) + penalty * df;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Cholesky factor of the active Gram block, grown one column at a time and
// downdated in place when a column leaves.
class ActiveCholesky {
 public:
  explicit ActiveCholesky(Eigen::Index capacity) : l_(capacity, capacity) {}

  // Returns false (leaving the factor unchanged) when the column is
  // numerically dependent on the current active columns.
  bool append(const Eigen::MatrixXd& gram, const std::vector<Eigen::Index>& active, Eigen::Index j) {
    const Eigen::Index k = size_;
    Eigen::VectorXd w(k);
    for (Eigen::Index a = 0; a < k; ++a) w(a) = gram(active[static_cast<std::size_t>(a)], j);
    if (k > 0) l_.topLeftCorner(k, k).triangularView<Eigen::Lower>().solveInPlace(w);
    const double d = gram(j, j) - w.squaredNorm();
    if (!(d > 1e-10 * gram(j, j))) return false;
    l_.block(k, 0, 1, k) = w.transpose();
    l_(k, k) = std::sqrt(d);
    ++size_;
    return true;
  }

  // Deletes row and column `slot`: the remaining rows form a lower
  // Hessenberg block that Givens rotations return to triangular form.
  void remove(Eigen::Index slot) {
    const Eigen::Index k = size_;
    for (Eigen::Index r = slot; r + 1 < k; ++r) l_.row(r).head(k) = l_.row(r + 1).head(k);
    for (Eigen::Index c = slot; c + 1 < k; ++c) {
      Eigen::JacobiRotation<double> g;
      g.makeGivens(l_(c, c), l_(c, c + 1));
      l_.block(c, 0, k - 1 - c, k).applyOnTheRight(c, c + 1, g);
      if (l_(c, c) < 0.0) l_.col(c).segment(c, k - 1 - c) *= -1.0;
    }
    --size_;
    l_.row(size_).head(k).setZero();
    l_.col(size_).head(k).setZero();
  }

  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const {
    const auto lk = l_.topLeftCorner(size_, size_);
    Eigen::VectorXd x = lk.triangularView<Eigen::Lower>().solve(rhs);
    lk.triangularView<Eigen::Lower>().transpose().solveInPlace(x);
    return x;
  }

 private:
  Eigen::MatrixXd l_;
  Eigen::Index size_ = 0;
};

}  // namespace

LarsPath lars_path(const LinearProblem& problem, std::size_t max_steps) {
  const Eigen::Index p = problem.width();
  if (p == 0 || problem.standardization.all_constant()) {
    throw DataError("LARS: design has no non-constant column");
  }
  if (max_steps == 0) max_steps = 8 * static_cast<std::size_t>(p) + 16;
  const auto n = static_cast<double>(problem.n);
  const Eigen::MatrixXd& gram = problem.gram;
  const Eigen::VectorXd& q = problem.xty;

  std::vector<char> eligible(static_cast<std::size_t>(p), 0);
  for (auto j : problem.free_columns()) eligible[static_cast<std::size_t>(j)] = 1;
  std::vector<char> is_active(static_cast<std::size_t>(p), 0);

  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
  Eigen::VectorXd corr = q;
  std::vector<Eigen::Index> active;
  std::vector<double> signs;
  ActiveCholesky chol(p);

  LarsPath path;
  auto record = [&](double c_max) {
    LarsStep step;
    step.active = active;
    step.coefficients = beta;
    step.lambda = c_max / n;
    step.rss = std::max(0.0, problem.yty - beta.dot(q + corr));
    step.df = static_cast<int>((beta.array() != 0.0).count());
    step.aic = information_criterion(problem.n, step.rss, step.df, InformationCriterion::kAic);
    step.bic = information_criterion(problem.n, step.rss, step.df, InformationCriterion::kBic);
    path.steps.push_back(std::move(step));
  };

  // Largest eligible inactive correlation; ties go to the lowest index.
  auto strongest_inactive = [&]() {
    Eigen::Index best = -1;
    for (Eigen::Index j = 0; j < p; ++j) {
      if (!eligible[static_cast<std::size_t>(j)] || is_active[static_cast<std::size_t>(j)]) continue;
      if (best < 0 || std::abs(corr(j)) > std::abs(corr(best))) best = j;
    }
    return best;
  };

  auto try_add = [&](Eigen::Index j) {
    if (!chol.append(gram, active, j)) {
      eligible[static_cast<std::size_t>(j)] = 0;
      return false;
    }
    active.push_back(j);
    signs.push_back(corr(j) >= 0.0 ? 1.0 : -1.0);
    is_active[static_cast<std::size_t>(j)] = 1;
    return true;
  };
  // Adds every eligible inactive column whose |correlation| ties c_max, so
  // exact ties enter together instead of producing zero-length steps.
  auto add_ties = [&](double c_max) {
    bool added = false;
    for (Eigen::Index j = 0; j < p; ++j) {
      if (!eligible[static_cast<std::size_t>(j)] || is_active[static_cast<std::size_t>(j)]) continue;
      if (std::abs(corr(j)) >= c_max * (1.0 - 1e-12)) added = try_add(j) || added;
    }
    return added;
  };

  const Eigen::Index first = strongest_inactive();
  double c_max = std::abs(corr(first));
  if (!(c_max > 0.0)) {
    record(0.0);
    path.aic_index = path.bic_index = 0;
    return path;
  }
  try_add(first);
  add_ties(c_max);
  record(c_max);
  const double c_floor = 1e-12 * c_max;

  for (std::size_t iter = 0; iter < max_steps; ++iter) {
    if (active.empty()) {
      const Eigen::Index next = strongest_inactive();
      if (next < 0) break;
      c_max = std::abs(corr(next));
      try_add(next);
      continue;
    }
    const auto k = static_cast<Eigen::Index>(active.size());
    Eigen::VectorXd s(k);
    for (Eigen::Index a = 0; a < k; ++a) s(a) = signs[static_cast<std::size_t>(a)];
    const Eigen::VectorXd g = chol.solve(s);
    const double norm = 1.0 / std::sqrt(s.dot(g));
    const Eigen::VectorXd w = norm * g;
    // along(j) = x_j^T u for the equiangular direction u = X_A w.
    Eigen::VectorXd along = Eigen::VectorXd::Zero(p);
    for (Eigen::Index a = 0; a < k; ++a) along += w(a) * gram.col(active[static_cast<std::size_t>(a)]);

    const double gamma_full = c_max / norm;
    const double gamma_eps = 1e-12 * gamma_full;

    double gamma_enter = kInf;
    Eigen::Index enter = -1;
    for (Eigen::Index j = 0; j < p; ++j) {
      if (!eligible[static_cast<std::size_t>(j)] || is_active[static_cast<std::size_t>(j)]) continue;
      for (double cand : {(c_max - corr(j)) / (norm - along(j)), (c_max + corr(j)) / (norm + along(j))}) {
        if (cand > gamma_eps && cand < gamma_enter) {
          gamma_enter = cand;
          enter = j;
        }
      }
    }
    double gamma_drop = kInf;
    Eigen::Index drop_slot = -1;
    for (Eigen::Index a = 0; a < k; ++a) {
      if (w(a) == 0.0) continue;
      const double cand = -beta(active[static_cast<std::size_t>(a)]) / w(a);
      if (cand > gamma_eps && cand < gamma_drop) {
        gamma_drop = cand;
        drop_slot = a;
      }
    }

    enum class Event { kEnter, kDrop, kEnd } event = Event::kEnd;
    double gamma = gamma_full;
    if (gamma_drop <= gamma_enter && gamma_drop < gamma_full) {
      event = Event::kDrop;
      gamma = gamma_drop;
    } else if (gamma_enter < gamma_full) {
      event = Event::kEnter;
      gamma = gamma_enter;
    }

    for (Eigen::Index a = 0; a < k; ++a) beta(active[static_cast<std::size_t>(a)]) += gamma * w(a);
    if (event == Event::kDrop) {
      const Eigen::Index j = active[static_cast<std::size_t>(drop_slot)];
      beta(j) = 0.0;
      active.erase(active.begin() + drop_slot);
      signs.erase(signs.begin() + drop_slot);
      is_active[static_cast<std::size_t>(j)] = 0;
      chol.remove(drop_slot);
      corr = q - gram * beta;
    } else {
      corr -= gamma * along;
    }
    c_max = event == Event::kEnd ? 0.0 : std::max(0.0, c_max - gamma * norm);

    if (event == Event::kEnter) {
      const bool entered = try_add(enter);
      const bool tied = add_ties(c_max);
      // A dependent column is skipped without a record: the path simply
      // continues along the same direction.
      if (!entered && !tied) continue;
    }
    record(c_max);
    if (event == Event::kEnd || c_max <= c_floor) break;
  }

  auto argmin = [&](auto field) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < path.steps.size(); ++i) {
      if (field(path.steps[i]) < field(path.steps[best])) best = i;
    }
    return best;
  };
  path.aic_index = argmin([](const LarsStep& s) { return s.aic; });
  path.bic_index = argmin([](const LarsStep& s) { return s.bic; });
  return path;
}

nlohmann::json LarsPath::to_json(const std::vector<std::string>& labels) const {
  nlohmann::json steps_json = nlohmann::json::array();
  for (const auto& s : steps) {
    nlohmann::json coef = nlohmann::json::object();
    for (Eigen::Index j = 0; j < s.coefficients.size(); ++j) {
      if (s.coefficients(j) == 0.0) continue;
      const auto idx = static_cast<std::size_t>(j);
      coef[idx < labels.size() ? labels[idx] : std::to_string(j)] = s.coefficients(j);
    }
    steps_json.push_back({{"lambda", s.lambda},
                          {"rss", s.rss},
                          {"df", s.df},
                          {"aic", s.aic},
                          {"bic", s.bic},
                          {"coefficients", std::move(coef)}});
  }
  return {{"aic_index", aic_index}, {"bic_index", bic_index}, {"steps", std::move(steps_json)}};
}

LarsFit fit_lars_ic(const LinearProblem& problem, InformationCriterion criterion) {
  LarsFit fit;
  fit.path = lars_path(problem);
  const auto& step = fit.path.steps[fit.path.chosen(criterion)];
  fit.model.family = LinearFamily::kLarsIc;
  fit.model.coefficients = step.coefficients;
  fit.model.intercept = problem.y_mean;
  fit.model.standardization = problem.standardization;
  fit.model.lambda = step.lambda;
  fit.model.criterion = std::string(to_string(criterion));
  return fit;
}

LarsFit fit_lars_ic(const Eigen::MatrixXd& x, std::span<const double> y, InformationCriterion criterion) {
  return fit_lars_ic(make_problem(x, y), criterion);
}

}  // namespace sparcs::linear
