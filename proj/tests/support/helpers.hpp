#pragma once

#include <atomic>
#include <bit>
#include <filesystem>
#include <string>
#include <vector>

#include <unistd.h>

#include "sparcs/data/dataset.hpp"
#include "sparcs/data/schema.hpp"

namespace testutil {

// Numeric-only dataset from row-major values.
inline sparcs::data::Dataset numeric_dataset(const std::vector<std::vector<double>>& rows,
                                             const std::vector<double>& target) {
  const std::size_t p = rows.empty() ? 0 : rows[0].size();
  std::vector<sparcs::data::FeatureDescriptor> features;
  for (std::size_t f = 0; f < p; ++f) {
    features.push_back({"x" + std::to_string(f), sparcs::data::FeatureKind::kNumeric, {}});
  }
  std::vector<std::vector<double>> columns(p, std::vector<double>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t f = 0; f < p; ++f) columns[f][r] = rows[r][f];
  }
  return sparcs::data::Dataset(sparcs::data::FeatureSchema(std::move(features), "cost"), std::move(columns),
                               target);
}

// Columns 1..p of the n x n Sylvester-Hadamard matrix (n a power of two):
// zero-mean, unit population sd, mutually orthogonal.
inline std::vector<std::vector<double>> hadamard_columns(std::size_t n, std::size_t p) {
  std::vector<std::vector<double>> rows(n, std::vector<double>(p));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < p; ++j) rows[i][j] = std::popcount(i & (j + 1)) % 2 ? -1.0 : 1.0;
  }
  return rows;
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("sparcs_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace testutil
