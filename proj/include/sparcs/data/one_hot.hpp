#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sparcs/data/dataset.hpp"

namespace sparcs::data {

// Column layout of the one-hot design: each categorical feature contributes
// a block of |vocabulary| + 1 indicator columns (slot 0 = UNKNOWN), each
// numeric feature one pass-through column, in schema order.
class OneHotLayout {
 public:
  explicit OneHotLayout(const FeatureSchema& schema);

  std::size_t width() const { return width_; }
  std::size_t offset(std::size_t feature) const { return offsets_[feature]; }
  const std::vector<std::string>& labels() const { return labels_; }

  // Calls fn(column, value) for each nonzero-capable entry of one row: the
  // active indicator of every categorical block and every numeric value.
  template <typename Fn>
  void for_each_entry(const Dataset& ds, std::size_t row, Fn&& fn) const {
    for (std::size_t f = 0; f < categorical_.size(); ++f) {
      const double v = ds.value(row, f);
      if (categorical_[f]) {
        fn(offsets_[f] + static_cast<std::size_t>(v), 1.0);
      } else {
        fn(offsets_[f], v);
      }
    }
  }

  // Same as for_each_entry for an encoded row in schema order.
  template <typename Fn>
  void for_each_entry(const double* encoded_row, Fn&& fn) const {
    for (std::size_t f = 0; f < categorical_.size(); ++f) {
      const double v = encoded_row[f];
      if (categorical_[f]) {
        fn(offsets_[f] + static_cast<std::size_t>(v), 1.0);
      } else {
        fn(offsets_[f], v);
      }
    }
  }

 private:
  std::vector<std::size_t> offsets_;
  std::vector<bool> categorical_;
  std::vector<std::string> labels_;
  std::size_t width_ = 0;
};

struct DesignMatrix {
  Eigen::MatrixXd values;
  std::vector<std::string> labels;
};

// Dense one-hot design for desk-scale data.
DesignMatrix one_hot(const Dataset& dataset);

}  // namespace sparcs::data
