#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "sparcs/data/schema.hpp"

namespace sparcs::data {

// Immutable columnar table: one double vector per schema feature (category
// codes for categoricals, raw values for numerics) plus the cost target in
// dollars. Safe to share across concurrent readers.
class Dataset {
 public:
  Dataset() = default;
  // Validates: column count matches the schema, all lengths equal, targets
  // finite and >= 0, categorical codes integral and within [0, |vocabulary|],
  // numeric values finite.
  Dataset(FeatureSchema schema, std::vector<std::vector<double>> columns,
          std::vector<double> target);

  const FeatureSchema& schema() const { return schema_; }
  std::size_t row_count() const { return target_.size(); }
  std::size_t feature_count() const { return columns_.size(); }

  std::span<const double> column(std::size_t feature) const { return columns_.at(feature); }
  std::span<const double> target() const { return target_; }
  double value(std::size_t row, std::size_t feature) const { return columns_[feature][row]; }

  // Copies one row's feature values (schema order) into `out`.
  void row(std::size_t index, std::span<double> out) const;
  std::vector<double> row(std::size_t index) const;

  // Rows in the given order (duplicates allowed).
  Dataset take(std::span<const std::size_t> rows) const;
  // Projection onto a subset of features, kept in schema order.
  Dataset select_features(const std::vector<std::string>& names) const;

 private:
  FeatureSchema schema_;
  std::vector<std::vector<double>> columns_;
  std::vector<double> target_;
};

}  // namespace sparcs::data
