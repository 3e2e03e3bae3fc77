#include "sparcs/data/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>

#include "sparcs/common/errors.hpp"
#include "sparcs/common/rng.hpp"
#include "sparcs/data/csv.hpp"

namespace sparcs::data {

namespace {

std::vector<std::string> default_labels(int levels) {
  const int width = static_cast<int>(std::to_string(levels).size());
  std::vector<std::string> labels;
  for (int i = 1; i <= levels; ++i) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%0*d", width, i);
    labels.emplace_back(buf);
  }
  return labels;
}

std::vector<std::string> labels_of(const SyntheticFeature& f) {
  return f.labels.empty() ? default_labels(f.levels) : f.labels;
}

}  // namespace

void SyntheticSpec::validate() const {
  if (features.empty()) throw DataError("synthetic spec has no features");
  for (const auto& f : features) {
    if (f.kind == FeatureKind::kCategorical) {
      if (f.levels < 1) throw DataError("feature " + f.name + " needs at least one level");
      if (!f.labels.empty() && f.labels.size() != static_cast<std::size_t>(f.levels)) {
        throw DataError("feature " + f.name + " label count differs from levels");
      }
    } else if (f.high < f.low || f.low < 0) {
      throw DataError("feature " + f.name + " has an invalid numeric range");
    }
  }
  if (planted.empty()) throw DataError("synthetic spec has no planted function");
  if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) {
    throw DataError("noise sigma must be finite and >= 0");
  }
  std::vector<int> references(planted.size(), 0);
  for (const auto& node : planted) {
    if (node.feature < 0) {
      if (!std::isfinite(node.value) || node.value < 0.0) {
        throw DataError("planted leaf values must be finite and >= 0");
      }
      continue;
    }
    if (static_cast<std::size_t>(node.feature) >= features.size()) {
      throw DataError("planted split references an unknown feature");
    }
    for (int child : {node.left, node.right}) {
      if (child <= 0 || static_cast<std::size_t>(child) >= planted.size()) {
        throw DataError("planted split has an invalid child index");
      }
      if (++references[static_cast<std::size_t>(child)] > 1) {
        throw DataError("planted node referenced twice");
      }
    }
  }
  for (std::size_t i = 1; i < planted.size(); ++i) {
    if (references[i] == 0) throw DataError("planted node " + std::to_string(i) + " is unreachable");
  }
  if (depth() > max_depth) throw DataError("planted function deeper than max_depth");
}

int SyntheticSpec::depth() const {
  std::function<int(int)> rec = [&](int node) -> int {
    const auto& n = planted.at(static_cast<std::size_t>(node));
    if (n.feature < 0) return 0;
    return 1 + std::max(rec(n.left), rec(n.right));
  };
  return rec(0);
}

FeatureSchema SyntheticSpec::schema() const {
  std::vector<FeatureDescriptor> descriptors;
  for (const auto& f : features) {
    FeatureDescriptor d{f.name, f.kind, {}};
    if (f.kind == FeatureKind::kCategorical) d.vocabulary = labels_of(f);
    descriptors.push_back(std::move(d));
  }
  return FeatureSchema(std::move(descriptors), target_name);
}

double SyntheticSpec::evaluate(std::span<const double> row) const {
  std::size_t node = 0;
  while (planted[node].feature >= 0) {
    const auto& n = planted[node];
    node = static_cast<std::size_t>(row[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left
                                                                                             : n.right);
  }
  return planted[node].value;
}

std::vector<std::string> SyntheticSpec::informative_features() const {
  std::vector<bool> used(features.size(), false);
  for (const auto& n : planted) {
    if (n.feature >= 0) used[static_cast<std::size_t>(n.feature)] = true;
  }
  std::vector<std::string> out;
  for (std::size_t i = 0; i < features.size(); ++i) {
    if (used[i]) out.push_back(features[i].name);
  }
  return out;
}

Dataset generate_synthetic(const SyntheticSpec& spec, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw DataError("generate_synthetic: n must be positive");
  spec.validate();
  Rng rng(seed);
  const std::size_t width = spec.features.size();
  std::vector<std::vector<double>> columns(width, std::vector<double>(n));
  std::vector<double> target(n);
  std::vector<double> row(width);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t f = 0; f < width; ++f) {
      const auto& feat = spec.features[f];
      if (feat.kind == FeatureKind::kCategorical) {
        row[f] = 1.0 + static_cast<double>(uniform_index(rng, static_cast<std::uint64_t>(feat.levels)));
      } else {
        const auto span = static_cast<std::uint64_t>(feat.high - feat.low + 1);
        row[f] = static_cast<double>(feat.low) + static_cast<double>(uniform_index(rng, span));
      }
      columns[f][r] = row[f];
    }
    double cost = spec.evaluate(row);
    if (spec.noise_sigma > 0.0) cost += spec.noise_sigma * standard_normal(rng);
    target[r] = std::max(0.0, cost);
  }
  return Dataset(spec.schema(), std::move(columns), std::move(target));
}

SyntheticSpec planted_depth2_spec() {
  SyntheticSpec spec;
  spec.features = {
      {"apr_severity_of_illness_code", FeatureKind::kCategorical, 4, {}, 0, 0},
      {"length_of_stay", FeatureKind::kNumeric, 0, {}, 1, 10},
      {"ccs_diagnosis_code", FeatureKind::kCategorical, 20, {}, 0, 0},
      {"gender", FeatureKind::kCategorical, 3, {"F", "M", "U"}, 0, 0},
      {"ethnicity", FeatureKind::kCategorical, 4, {}, 0, 0},
  };
  spec.planted = {
      {0, 2.5, 1, 2, 0.0},     // severity <= 2
      {1, 5.5, 3, 4, 0.0},     // length of stay <= 5
      {2, 10.5, 5, 6, 0.0},    // CCS code <= 10
      {-1, 0, -1, -1, 1000.0},
      {-1, 0, -1, -1, 3000.0},
      {-1, 0, -1, -1, 8000.0},
      {-1, 0, -1, -1, 15000.0},
  };
  spec.max_depth = 2;
  spec.noise_sigma = 0.0;
  return spec;
}

SyntheticSpec ranking_recovery_spec() {
  SyntheticSpec spec;
  spec.features = {
      {"ccs_diagnosis_code", FeatureKind::kCategorical, 12, {}, 0, 0},
      {"noise_a", FeatureKind::kCategorical, 3, {}, 0, 0},
      {"apr_severity_of_illness_code", FeatureKind::kCategorical, 4, {}, 0, 0},
      {"noise_b", FeatureKind::kCategorical, 5, {}, 0, 0},
      {"noise_c", FeatureKind::kCategorical, 8, {}, 0, 0},
      {"noise_d", FeatureKind::kCategorical, 10, {}, 0, 0},
      {"noise_e", FeatureKind::kCategorical, 15, {}, 0, 0},
      {"noise_f", FeatureKind::kNumeric, 0, {}, 1, 30},
  };
  spec.planted = {
      {2, 2.5, 1, 2, 0.0},  // severity <= 2
      {0, 6.5, 3, 4, 0.0},  // CCS <= 6
      {0, 6.5, 5, 6, 0.0},  // CCS <= 6
      {-1, 0, -1, -1, 3000.0},
      {-1, 0, -1, -1, 9000.0},
      {-1, 0, -1, -1, 12000.0},
      {-1, 0, -1, -1, 25000.0},
  };
  spec.max_depth = 2;
  spec.noise_sigma = 3000.0;
  return spec;
}

SyntheticSpec sparcs_like_spec() {
  SyntheticSpec spec;
  spec.features = {
      {"operating_certificate_number", FeatureKind::kCategorical, 0, {}, 0, 0},
      {"length_of_stay", FeatureKind::kNumeric, 0, {}, 1, 120},
      {"ccs_diagnosis_code", FeatureKind::kCategorical, 0, {}, 0, 0},
      {"apr_drg_code", FeatureKind::kCategorical, 0, {}, 0, 0},
      {"payment_typology", FeatureKind::kCategorical, 0,
       {"Blue Cross/Blue Shield", "Department of Corrections", "Federal/State/Local/VA",
        "Managed Care, Unspecified", "Medicaid", "Medicare", "Miscellaneous/Other",
        "Private Health Insurance", "Self-Pay"},
       0, 0},
      {"ethnicity", FeatureKind::kCategorical, 0,
       {"Multi-ethnic", "Not Span/Hispanic", "Spanish/Hispanic", "Unknown"}, 0, 0},
      {"apr_medical_surgical_description", FeatureKind::kCategorical, 0,
       {"Medical", "Not Applicable", "Surgical"}, 0, 0},
      {"apr_risk_of_mortality", FeatureKind::kCategorical, 0,
       {"Extreme", "Major", "Minor", "Moderate"}, 0, 0},
      {"gender", FeatureKind::kCategorical, 0, {"F", "M", "U"}, 0, 0},
      {"emergency_department_indicator", FeatureKind::kCategorical, 0, {"N", "Y"}, 0, 0},
      {"apr_severity_of_illness_code", FeatureKind::kCategorical, 0, {"1", "2", "3", "4"}, 0, 0},
  };
  auto set_levels = [&](std::size_t i, int levels) { spec.features[i].levels = levels; };
  set_levels(0, 150);
  set_levels(2, 260);
  set_levels(3, 300);
  for (std::size_t i = 4; i < spec.features.size(); ++i) {
    spec.features[i].levels = static_cast<int>(spec.features[i].labels.size());
  }
  // Feature indices: 1 = length of stay, 2 = CCS, 3 = APR DRG,
  // 6 = medical/surgical (3 = Surgical), 10 = severity.
  spec.planted = {
      {1, 8.5, 1, 2, 0.0},        // 0: length of stay <= 8
      {10, 2.5, 3, 4, 0.0},       // 1: severity <= 2
      {1, 30.5, 5, 6, 0.0},       // 2: length of stay <= 30
      {6, 2.5, 7, 8, 0.0},        // 3: not surgical
      {3, 150.5, 9, 10, 0.0},     // 4: APR DRG <= 150
      {2, 130.5, 11, 12, 0.0},    // 5: CCS <= 130
      {-1, 0, -1, -1, 160000.0},  // 6
      {-1, 0, -1, -1, 6000.0},    // 7
      {-1, 0, -1, -1, 21000.0},   // 8
      {-1, 0, -1, -1, 11000.0},   // 9
      {-1, 0, -1, -1, 17000.0},   // 10
      {-1, 0, -1, -1, 42000.0},   // 11
      {-1, 0, -1, -1, 68000.0},   // 12
  };
  spec.max_depth = 3;
  spec.noise_sigma = 4000.0;
  return spec;
}

void write_csv(const Dataset& dataset, const ColumnMapping& mapping, std::ostream& out) {
  const auto& schema = dataset.schema();
  std::vector<std::size_t> source;
  for (const auto& e : mapping.features) {
    auto idx = schema.index_of(e.feature);
    if (!idx) throw DataError("mapping feature " + e.feature + " not in dataset schema");
    source.push_back(*idx);
  }
  for (std::size_t i = 0; i < mapping.features.size(); ++i) {
    out << csv_escape(mapping.features[i].csv_column) << ',';
  }
  out << csv_escape(mapping.target_column) << '\n';
  char buf[64];
  for (std::size_t r = 0; r < dataset.row_count(); ++r) {
    for (std::size_t i = 0; i < source.size(); ++i) {
      const auto& desc = schema.feature(source[i]);
      const double v = dataset.value(r, source[i]);
      if (desc.is_categorical()) {
        out << csv_escape(desc.decode(static_cast<std::uint32_t>(v)));
      } else if (v >= 120.0) {
        out << "120 +";
      } else {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        out << buf;
      }
      out << ',';
    }
    std::snprintf(buf, sizeof(buf), "%.2f", dataset.target()[r]);
    out << buf << '\n';
  }
}

}  // namespace sparcs::data
