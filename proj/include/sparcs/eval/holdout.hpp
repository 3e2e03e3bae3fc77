#pragma once

#include <vector>

#include "sparcs/data/dataset.hpp"
#include "sparcs/eval/metrics.hpp"
#include "sparcs/model/fitted_model.hpp"

namespace sparcs::eval {

struct HoldoutResult {
  MetricsReport metrics;
  std::vector<double> predicted;
};

// Predicts every row of `test` and scores against its target. Throws
// DataError when the schema fingerprints differ.
HoldoutResult evaluate_holdout(const model::FittedModel& model, const data::Dataset& test);

}  // namespace sparcs::eval
