#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace sparcs::data {

enum class FeatureKind { kCategorical, kNumeric };

std::string_view to_string(FeatureKind kind);
FeatureKind feature_kind_from_string(std::string_view text);

// Categorical codes are 1-based positions in the sorted vocabulary.
inline constexpr std::uint32_t kUnknownCode = 0;
inline constexpr std::string_view kUnknownLabel = "<UNKNOWN>";

struct FeatureDescriptor {
  std::string name;
  FeatureKind kind = FeatureKind::kCategorical;
  // Sorted, unique. Empty for numeric features.
  std::vector<std::string> vocabulary;

  bool is_categorical() const { return kind == FeatureKind::kCategorical; }

  // Code for a category string; kUnknownCode for non-members.
  std::uint32_t encode(std::string_view value) const;
  // Inverse of encode; kUnknownLabel for code 0. Throws on out-of-range codes.
  const std::string& decode(std::uint32_t code) const;
};

// Ordered feature descriptors plus the target column name. Immutable once
// constructed; the constructor enforces name uniqueness and sorted, unique
// vocabularies.
class FeatureSchema {
 public:
  FeatureSchema() = default;
  FeatureSchema(std::vector<FeatureDescriptor> features, std::string target_name);

  const std::vector<FeatureDescriptor>& features() const { return features_; }
  const FeatureDescriptor& feature(std::size_t index) const { return features_.at(index); }
  std::size_t size() const { return features_.size(); }
  const std::string& target_name() const { return target_name_; }
  std::optional<std::size_t> index_of(std::string_view name) const;

  // Stable hash of the canonical JSON form (names, kinds, vocabularies, target).
  std::string fingerprint() const;

  nlohmann::json to_json() const;
  static FeatureSchema from_json(const nlohmann::json& j);

  // Same features restricted to `names`, in schema order.
  FeatureSchema select(const std::vector<std::string>& names) const;

  friend bool operator==(const FeatureSchema& a, const FeatureSchema& b);

 private:
  std::vector<FeatureDescriptor> features_;
  std::string target_name_;
};

// The eleven SPARCS inpatient features used by the cost models, in their
// canonical order, and the default CSV header each one is read from.
struct SparcsColumn {
  std::string_view feature;
  std::string_view csv_header;
  FeatureKind kind;
};
const std::vector<SparcsColumn>& sparcs_default_columns();
inline constexpr std::string_view kSparcsTargetName = "total_costs";
inline constexpr std::string_view kSparcsTargetHeader = "Total Costs";

}  // namespace sparcs::data
