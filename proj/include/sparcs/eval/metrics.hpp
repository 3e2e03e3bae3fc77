#pragma once

#include <cstddef>
#include <filesystem>
#include <span>

#include <json.hpp>

namespace sparcs::eval {

// 1 - RSS/TSS. Throws DataError on length mismatch, empty input, or constant
// `actual` (R^2 undefined).
double r2(std::span<const double> actual, std::span<const double> predicted);

// sqrt(mean squared error). Throws DataError on length mismatch or empty input.
double rmse(std::span<const double> actual, std::span<const double> predicted);

struct PearsonResult {
  double r = 0.0;
  double p_value = 1.0;  // two-sided, Student t with n - 2 degrees of freedom
};

// Throws DataError when n < 3 or either vector is constant.
PearsonResult pearson(std::span<const double> x, std::span<const double> y);

// Regularized incomplete beta I_x(a, b), continued-fraction evaluation.
double regularized_incomplete_beta(double a, double b, double x);

// P(|T| >= |t|) for Student t with `dof` degrees of freedom.
double student_t_two_sided_p(double t, double dof);

// pearson_r and p_value are NaN (null in JSON) when the predictions are
// constant or there are fewer than three points.
struct MetricsReport {
  double r2 = 0.0;
  double rmse = 0.0;
  double pearson_r = 0.0;
  double p_value = 1.0;
  std::size_t n_test = 0;

  nlohmann::json to_json() const;
  static MetricsReport from_json(const nlohmann::json& j);
};

MetricsReport compute_metrics(std::span<const double> actual, std::span<const double> predicted);

// Writes `csv_path` ("actual,predicted" header, one row per point) and a
// sidecar JSON (csv_path with extension .json) holding the metrics and the
// identity-line endpoints spanning the data range.
void export_scatter(std::span<const double> actual, std::span<const double> predicted,
                    const std::filesystem::path& csv_path);

std::filesystem::path scatter_sidecar_path(const std::filesystem::path& csv_path);

}  // namespace sparcs::eval
