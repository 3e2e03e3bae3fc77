#pragma once

#include <cstddef>
#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "sparcs/data/dataset.hpp"
#include "sparcs/data/ingest.hpp"

namespace sparcs::data {

// Desk-scale stand-in for SPARCS: independent uniformly drawn features and a
// cost given by a planted regression tree plus Gaussian noise.

struct SyntheticFeature {
  std::string name;
  FeatureKind kind = FeatureKind::kCategorical;
  // Categorical: number of levels (codes 1..levels). Labels default to
  // zero-padded integers so lexicographic order equals numeric order.
  int levels = 2;
  std::vector<std::string> labels;
  // Numeric: integer values drawn uniformly from [low, high].
  int low = 0;
  int high = 0;
};

// Internal node when feature >= 0 (value <= threshold goes left), leaf otherwise.
struct PlantedNode {
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;
};

struct SyntheticSpec {
  std::vector<SyntheticFeature> features;
  std::vector<PlantedNode> planted;  // node 0 is the root
  int max_depth = 2;                 // bound the planted tree must respect
  double noise_sigma = 0.0;
  std::string target_name = std::string(kSparcsTargetName);

  // Throws DataError on dangling or shared child links, unknown features,
  // depth above max_depth, negative or non-finite leaf values or sigma.
  void validate() const;
  FeatureSchema schema() const;
  // Planted cost for an encoded row in schema order.
  double evaluate(std::span<const double> row) const;
  int depth() const;
  // Features used by at least one planted split, in schema order.
  std::vector<std::string> informative_features() const;
};

// target = max(0, planted(row) + noise_sigma * N(0, 1)). Throws on n == 0.
Dataset generate_synthetic(const SyntheticSpec& spec, std::size_t n, std::uint64_t seed);

// Noiseless depth-2 tree over severity, length of stay, and CCS code, plus
// two uninformative features.
SyntheticSpec planted_depth2_spec();
// Two informative features (CCS code, severity) and six noise features.
SyntheticSpec ranking_recovery_spec();
// All eleven SPARCS features with SPARCS-like cardinalities; the cost
// depends on severity, length of stay, APR DRG, CCS code, and surgical flag.
SyntheticSpec sparcs_like_spec();

// Writes a dataset as a SPARCS-style CSV using the mapping's column headers.
// Categorical codes are decoded to their labels, counts >= 120 are written in
// the "120 +" top-coded form, and costs with two decimals.
void write_csv(const Dataset& dataset, const ColumnMapping& mapping, std::ostream& out);

}  // namespace sparcs::data
