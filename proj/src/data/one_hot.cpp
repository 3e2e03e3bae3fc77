#include "sparcs/data/one_hot.hpp"

namespace sparcs::data {

OneHotLayout::OneHotLayout(const FeatureSchema& schema) {
  for (const auto& f : schema.features()) {
    offsets_.push_back(width_);
    categorical_.push_back(f.is_categorical());
    if (f.is_categorical()) {
      labels_.push_back(f.name + "=" + std::string(kUnknownLabel));
      for (const auto& v : f.vocabulary) labels_.push_back(f.name + "=" + v);
      width_ += f.vocabulary.size() + 1;
    } else {
      labels_.push_back(f.name);
      width_ += 1;
    }
  }
}

DesignMatrix one_hot(const Dataset& dataset) {
  OneHotLayout layout(dataset.schema());
  DesignMatrix design;
  design.values = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dataset.row_count()),
                                        static_cast<Eigen::Index>(layout.width()));
  for (std::size_t r = 0; r < dataset.row_count(); ++r) {
    layout.for_each_entry(dataset, r, [&](std::size_t col, double v) {
      design.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(col)) = v;
    });
  }
  design.labels = layout.labels();
  return design;
}

}  // namespace sparcs::data
