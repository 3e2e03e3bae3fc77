#include "sparcs/data/schema.hpp"

#include <algorithm>
#include <set>

#include "sparcs/common/errors.hpp"
#include "sparcs/common/io.hpp"

namespace sparcs::data {

std::string_view to_string(FeatureKind kind) {
  return kind == FeatureKind::kNumeric ? "numeric" : "categorical";
}

FeatureKind feature_kind_from_string(std::string_view text) {
  if (text == "numeric") return FeatureKind::kNumeric;
  if (text == "categorical") return FeatureKind::kCategorical;
  throw DataError("unknown feature kind '" + std::string(text) + "'");
}

std::uint32_t FeatureDescriptor::encode(std::string_view value) const {
  auto it = std::lower_bound(vocabulary.begin(), vocabulary.end(), value);
  if (it == vocabulary.end() || *it != value) return kUnknownCode;
  return static_cast<std::uint32_t>(it - vocabulary.begin()) + 1;
}

const std::string& FeatureDescriptor::decode(std::uint32_t code) const {
  static const std::string unknown(kUnknownLabel);
  if (code == kUnknownCode) return unknown;
  if (code > vocabulary.size()) {
    throw DataError("code " + std::to_string(code) + " out of range for feature " + name);
  }
  return vocabulary[code - 1];
}

FeatureSchema::FeatureSchema(std::vector<FeatureDescriptor> features, std::string target_name)
    : features_(std::move(features)), target_name_(std::move(target_name)) {
  std::set<std::string_view> names;
  for (const auto& f : features_) {
    if (f.name.empty()) throw DataError("feature name must not be empty");
    if (!names.insert(f.name).second) throw DataError("duplicate feature name " + f.name);
    if (f.kind == FeatureKind::kNumeric && !f.vocabulary.empty()) {
      throw DataError("numeric feature " + f.name + " must not carry a vocabulary");
    }
    for (std::size_t i = 1; i < f.vocabulary.size(); ++i) {
      if (!(f.vocabulary[i - 1] < f.vocabulary[i])) {
        throw DataError("vocabulary of " + f.name + " is not sorted and unique");
      }
    }
  }
  if (names.count(target_name_) != 0) {
    throw DataError("target name " + target_name_ + " collides with a feature");
  }
}

std::optional<std::size_t> FeatureSchema::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < features_.size(); ++i) {
    if (features_[i].name == name) return i;
  }
  return std::nullopt;
}

nlohmann::json FeatureSchema::to_json() const {
  nlohmann::json features = nlohmann::json::array();
  for (const auto& f : features_) {
    nlohmann::json entry = {{"name", f.name}, {"kind", to_string(f.kind)}};
    if (f.is_categorical()) entry["vocabulary"] = f.vocabulary;
    features.push_back(std::move(entry));
  }
  return {{"features", std::move(features)}, {"target_name", target_name_}};
}

FeatureSchema FeatureSchema::from_json(const nlohmann::json& j) {
  try {
    std::vector<FeatureDescriptor> features;
    for (const auto& entry : j.at("features")) {
      FeatureDescriptor f;
      f.name = entry.at("name").get<std::string>();
      f.kind = feature_kind_from_string(entry.at("kind").get<std::string>());
      if (entry.contains("vocabulary")) {
        f.vocabulary = entry.at("vocabulary").get<std::vector<std::string>>();
      }
      features.push_back(std::move(f));
    }
    return FeatureSchema(std::move(features), j.at("target_name").get<std::string>());
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed schema JSON: ") + e.what());
  }
}

std::string FeatureSchema::fingerprint() const {
  return hex64(fnv1a64(to_json().dump()));
}

FeatureSchema FeatureSchema::select(const std::vector<std::string>& names) const {
  for (const auto& n : names) {
    if (!index_of(n)) throw DataError("unknown feature " + n);
  }
  std::vector<FeatureDescriptor> kept;
  for (const auto& f : features_) {
    if (std::find(names.begin(), names.end(), f.name) != names.end()) kept.push_back(f);
  }
  return FeatureSchema(std::move(kept), target_name_);
}

bool operator==(const FeatureSchema& a, const FeatureSchema& b) {
  if (a.target_name_ != b.target_name_ || a.features_.size() != b.features_.size()) return false;
  for (std::size_t i = 0; i < a.features_.size(); ++i) {
    const auto& x = a.features_[i];
    const auto& y = b.features_[i];
    if (x.name != y.name || x.kind != y.kind || x.vocabulary != y.vocabulary) return false;
  }
  return true;
}

const std::vector<SparcsColumn>& sparcs_default_columns() {
  static const std::vector<SparcsColumn> columns = {
      {"operating_certificate_number", "Operating Certificate Number", FeatureKind::kCategorical},
      {"length_of_stay", "Length of Stay", FeatureKind::kNumeric},
      {"ccs_diagnosis_code", "CCS Diagnosis Code", FeatureKind::kCategorical},
      {"apr_drg_code", "APR DRG Code", FeatureKind::kCategorical},
      {"payment_typology", "Payment Typology 1", FeatureKind::kCategorical},
      {"ethnicity", "Ethnicity", FeatureKind::kCategorical},
      {"apr_medical_surgical_description", "APR Medical Surgical Description",
       FeatureKind::kCategorical},
      {"apr_risk_of_mortality", "APR Risk of Mortality", FeatureKind::kCategorical},
      {"gender", "Gender", FeatureKind::kCategorical},
      {"emergency_department_indicator", "Emergency Department Indicator",
       FeatureKind::kCategorical},
      {"apr_severity_of_illness_code", "APR Severity of Illness Code", FeatureKind::kCategorical},
  };
  return columns;
}

}  // namespace sparcs::data
