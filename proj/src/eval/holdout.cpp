#include "sparcs/eval/holdout.hpp"

namespace sparcs::eval {

HoldoutResult evaluate_holdout(const model::FittedModel& model, const data::Dataset& test) {
  HoldoutResult out;
  out.predicted = model.predict(test);
  out.metrics = compute_metrics(test.target(), out.predicted);
  return out;
}

}  // namespace sparcs::eval
