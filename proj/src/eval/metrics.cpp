#include "sparcs/eval/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include "sparcs/common/errors.hpp"
#include "sparcs/common/io.hpp"

namespace sparcs::eval {

namespace {

void check_pair(std::span<const double> a, std::span<const double> b, const char* what) {
  if (a.size() != b.size()) {
    throw DataError(std::string(what) + ": length mismatch (" + std::to_string(a.size()) + " vs " +
                    std::to_string(b.size()) + ")");
  }
  if (a.empty()) throw DataError(std::string(what) + ": empty input");
}

double mean(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace

double r2(std::span<const double> actual, std::span<const double> predicted) {
  check_pair(actual, predicted, "r2");
  const double m = mean(actual);
  double rss = 0.0;
  double tss = 0.0;
  for (std::size_t i = 0; i < actual.size(); ++i) {
    const double e = actual[i] - predicted[i];
    const double d = actual[i] - m;
    rss += e * e;
    tss += d * d;
  }
  if (tss == 0.0) throw DataError("r2: actual values are constant, R^2 is undefined");
  return 1.0 - rss / tss;
}

double rmse(std::span<const double> actual, std::span<const double> predicted) {
  check_pair(actual, predicted, "rmse");
  double rss = 0.0;
  for (std::size_t i = 0; i < actual.size(); ++i) {
    const double e = actual[i] - predicted[i];
    rss += e * e;
  }
  return std::sqrt(rss / static_cast<double>(actual.size()));
}

double regularized_incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0 && b > 0.0)) throw std::invalid_argument("incomplete beta needs a, b > 0");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;

  // Modified Lentz evaluation of the continued fraction; converges fastest
  // for x < (a + 1) / (a + b + 2), otherwise use the symmetry relation.
  auto fraction = [](double a, double b, double x) {
    constexpr double kTiny = 1e-300;
    constexpr double kEps = 1e-16;
    double c = 1.0;
    double d = 1.0 - (a + b) * x / (a + 1.0);
    if (std::abs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= 10000; ++m) {
      const double m2 = 2.0 * m;
      double num = m * (b - m) * x / ((a + m2 - 1.0) * (a + m2));
      d = 1.0 + num * d;
      if (std::abs(d) < kTiny) d = kTiny;
      c = 1.0 + num / c;
      if (std::abs(c) < kTiny) c = kTiny;
      d = 1.0 / d;
      h *= d * c;
      num = -(a + m) * (a + b + m) * x / ((a + m2) * (a + m2 + 1.0));
      d = 1.0 + num * d;
      if (std::abs(d) < kTiny) d = kTiny;
      c = 1.0 + num / c;
      if (std::abs(c) < kTiny) c = kTiny;
      d = 1.0 / d;
      const double delta = d * c;
      h *= delta;
      if (std::abs(delta - 1.0) < kEps) break;
    }
    return h;
  };

  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) +
                           b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * fraction(a, b, x) / a;
  return 1.0 - front * fraction(b, a, 1.0 - x) / b;
}

double student_t_two_sided_p(double t, double dof) {
  if (!(dof > 0.0)) throw std::invalid_argument("student t needs dof > 0");
  if (std::isinf(t)) return 0.0;
  const double x = dof / (dof + t * t);
  return std::clamp(regularized_incomplete_beta(0.5 * dof, 0.5, x), 0.0, 1.0);
}

PearsonResult pearson(std::span<const double> x, std::span<const double> y) {
  check_pair(x, y, "pearson");
  if (x.size() < 3) throw DataError("pearson: need at least 3 points");
  const double mx = mean(x);
  const double my = mean(y);
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw DataError("pearson: constant input");
  PearsonResult out;
  out.r = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
  const double dof = static_cast<double>(x.size()) - 2.0;
  if (std::abs(out.r) == 1.0) {
    out.p_value = 0.0;
  } else {
    const double t = out.r * std::sqrt(dof / (1.0 - out.r * out.r));
    out.p_value = student_t_two_sided_p(t, dof);
  }
  return out;
}

nlohmann::json MetricsReport::to_json() const {
  const auto null_if_nan = [](double v) { return std::isnan(v) ? nlohmann::json() : nlohmann::json(v); };
  return {{"r2", r2},
          {"rmse", rmse},
          {"pearson_r", null_if_nan(pearson_r)},
          {"p_value", null_if_nan(p_value)},
          {"n_test", n_test}};
}

MetricsReport MetricsReport::from_json(const nlohmann::json& j) {
  MetricsReport m;
  m.r2 = j.at("r2").get<double>();
  m.rmse = j.at("rmse").get<double>();
  const auto nan_or = [](const nlohmann::json& v) {
    return v.is_null() ? std::numeric_limits<double>::quiet_NaN() : v.get<double>();
  };
  m.pearson_r = nan_or(j.at("pearson_r"));
  m.p_value = nan_or(j.at("p_value"));
  m.n_test = j.at("n_test").get<std::size_t>();
  return m;
}

MetricsReport compute_metrics(std::span<const double> actual, std::span<const double> predicted) {
  MetricsReport m;
  m.r2 = r2(actual, predicted);
  m.rmse = rmse(actual, predicted);
  const bool flat = std::adjacent_find(predicted.begin(), predicted.end(), std::not_equal_to<>()) ==
                    predicted.end();
  if (flat || actual.size() < 3) {
    m.pearson_r = std::numeric_limits<double>::quiet_NaN();
    m.p_value = std::numeric_limits<double>::quiet_NaN();
  } else {
    const auto p = pearson(actual, predicted);
    m.pearson_r = p.r;
    m.p_value = p.p_value;
  }
  m.n_test = actual.size();
  return m;
}

std::filesystem::path scatter_sidecar_path(const std::filesystem::path& csv_path) {
  auto sidecar = csv_path;
  sidecar.replace_extension(".json");
  return sidecar;
}

void export_scatter(std::span<const double> actual, std::span<const double> predicted,
                    const std::filesystem::path& csv_path) {
  check_pair(actual, predicted, "export_scatter");
  const MetricsReport metrics = compute_metrics(actual, predicted);
  std::string csv = "actual,predicted\n";
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t i = 0; i < actual.size(); ++i) {
    csv += format_double(actual[i]);
    csv += ',';
    csv += format_double(predicted[i]);
    csv += '\n';
    lo = std::min({lo, actual[i], predicted[i]});
    hi = std::max({hi, actual[i], predicted[i]});
  }
  nlohmann::json sidecar = {
      {"metrics", metrics.to_json()},
      {"identity_line", {{lo, lo}, {hi, hi}}},
      {"points", actual.size()},
  };
  write_file_atomic(csv_path, csv);
  write_file_atomic(scatter_sidecar_path(csv_path), sidecar.dump(2) + "\n");
}

}  // namespace sparcs::eval
