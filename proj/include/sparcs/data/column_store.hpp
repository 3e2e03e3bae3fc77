#pragma once

#include <filesystem>

#include "sparcs/data/dataset.hpp"

namespace sparcs::data {

// On-disk layout of a Dataset directory:
//
//   schema.json      {"format": "sparcs-columns/1", "row_count": N,
//                     "schema": {...FeatureSchema...},
//                     "columns": [{"name": ..., "file": "fNN.f64"}, ...],
//                     "target": {"name": ..., "file": "target.f64"}}
//   fNN.f64          N little-endian IEEE-754 binary64 values, feature NN
//   target.f64       N little-endian binary64 cost values
//
// Output is a pure function of the Dataset, so identical datasets produce
// byte-identical directories.
void save_dataset(const Dataset& dataset, const std::filesystem::path& dir);
Dataset load_dataset(const std::filesystem::path& dir);

}  // namespace sparcs::data
