#include "sparcs/data/dataset.hpp"

#include <cmath>

#include "sparcs/common/errors.hpp"

namespace sparcs::data {

Dataset::Dataset(FeatureSchema schema, std::vector<std::vector<double>> columns,
                 std::vector<double> target)
    : schema_(std::move(schema)), columns_(std::move(columns)), target_(std::move(target)) {
  if (columns_.size() != schema_.size()) {
    throw DataError("dataset has " + std::to_string(columns_.size()) + " columns, schema has " +
                    std::to_string(schema_.size()));
  }
  for (double t : target_) {
    if (!std::isfinite(t) || t < 0.0) throw DataError("target values must be finite and >= 0");
  }
  for (std::size_t f = 0; f < columns_.size(); ++f) {
    const auto& desc = schema_.feature(f);
    const auto& col = columns_[f];
    if (col.size() != target_.size()) {
      throw DataError("column " + desc.name + " length differs from target length");
    }
    if (desc.is_categorical()) {
      const auto limit = static_cast<double>(desc.vocabulary.size());
      for (double v : col) {
        if (!(v >= 0.0 && v <= limit) || v != std::floor(v)) {
          throw DataError("invalid category code in column " + desc.name);
        }
      }
    } else {
      for (double v : col) {
        if (!std::isfinite(v)) throw DataError("non-finite value in column " + desc.name);
      }
    }
  }
}

void Dataset::row(std::size_t index, std::span<double> out) const {
  for (std::size_t f = 0; f < columns_.size(); ++f) out[f] = columns_[f][index];
}

std::vector<double> Dataset::row(std::size_t index) const {
  std::vector<double> out(columns_.size());
  row(index, out);
  return out;
}

Dataset Dataset::take(std::span<const std::size_t> rows) const {
  std::vector<std::vector<double>> columns(columns_.size());
  for (std::size_t f = 0; f < columns_.size(); ++f) {
    columns[f].reserve(rows.size());
    for (std::size_t r : rows) columns[f].push_back(columns_[f].at(r));
  }
  std::vector<double> target;
  target.reserve(rows.size());
  for (std::size_t r : rows) target.push_back(target_.at(r));
  return Dataset(schema_, std::move(columns), std::move(target));
}

Dataset Dataset::select_features(const std::vector<std::string>& names) const {
  FeatureSchema selected = schema_.select(names);
  std::vector<std::vector<double>> columns;
  for (const auto& f : selected.features()) columns.push_back(columns_[*schema_.index_of(f.name)]);
  return Dataset(std::move(selected), std::move(columns), target_);
}

}  // namespace sparcs::data
