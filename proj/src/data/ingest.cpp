#include "sparcs/data/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "sparcs/common/errors.hpp"
#include "sparcs/common/io.hpp"
#include "sparcs/data/csv.hpp"

namespace sparcs::data {

std::string_view trim(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = text.find_last_not_of(" \t\r\n");
  return text.substr(first, last - first + 1);
}

namespace {

std::optional<double> parse_plain_number(std::string_view text) {
  if (text.empty()) return std::nullopt;
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) return std::nullopt;
  if (!std::isfinite(value) || value < 0.0) return std::nullopt;
  return value;
}

std::vector<std::string> split_list(std::string_view text) {
  std::vector<std::string> out;
  while (!text.empty()) {
    const auto comma = text.find(',');
    auto item = trim(text.substr(0, comma));
    if (!item.empty()) out.emplace_back(item);
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return out;
}

}  // namespace

std::optional<double> parse_cost(std::string_view cell) {
  std::string cleaned;
  for (char c : trim(cell)) {
    if (c == '$' || c == ',') continue;
    cleaned.push_back(c);
  }
  return parse_plain_number(trim(cleaned));
}

std::optional<double> parse_count(std::string_view cell) {
  auto text = trim(cell);
  if (!text.empty() && text.back() == '+') text = trim(text.substr(0, text.size() - 1));
  return parse_plain_number(text);
}

ColumnMapping ColumnMapping::parse(std::string_view text) {
  ColumnMapping mapping;
  std::vector<std::string> numeric;
  std::set<std::string> seen;
  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = line;
    if (const auto hash = view.find('#'); hash != std::string_view::npos) {
      view = view.substr(0, hash);
    }
    view = trim(view);
    if (view.empty()) continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("mapping line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key(trim(view.substr(0, eq)));
    const std::string value(trim(view.substr(eq + 1)));
    if (key.empty() || value.empty()) {
      throw ConfigError("mapping line " + std::to_string(line_no) + ": empty key or value");
    }
    if (key == "target") {
      mapping.target_column = value;
    } else if (key == "target_name") {
      mapping.target_name = value;
    } else if (key == "numeric") {
      for (auto& name : split_list(value)) numeric.push_back(std::move(name));
    } else {
      if (!seen.insert(key).second) throw ConfigError("feature " + key + " mapped twice");
      mapping.features.push_back({key, value, FeatureKind::kCategorical});
    }
  }
  if (mapping.target_column.empty()) throw ConfigError("mapping does not name a target column");
  if (mapping.features.empty()) throw ConfigError("mapping names no features");
  for (const auto& name : numeric) {
    auto it = std::find_if(mapping.features.begin(), mapping.features.end(),
                           [&](const Entry& e) { return e.feature == name; });
    if (it == mapping.features.end()) {
      throw ConfigError("numeric feature " + name + " is not mapped to a column");
    }
    it->kind = FeatureKind::kNumeric;
  }
  return mapping;
}

ColumnMapping ColumnMapping::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read mapping file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str());
}

ColumnMapping ColumnMapping::sparcs_default() {
  ColumnMapping mapping;
  for (const auto& c : sparcs_default_columns()) {
    mapping.features.push_back({std::string(c.feature), std::string(c.csv_header), c.kind});
  }
  mapping.target_column = std::string(kSparcsTargetHeader);
  return mapping;
}

std::string ColumnMapping::to_text() const {
  std::string out = "target = " + target_column + "\n";
  if (target_name != kSparcsTargetName) out += "target_name = " + target_name + "\n";
  std::string numeric;
  for (const auto& e : features) {
    if (e.kind != FeatureKind::kNumeric) continue;
    if (!numeric.empty()) numeric += ", ";
    numeric += e.feature;
  }
  if (!numeric.empty()) out += "numeric = " + numeric + "\n";
  for (const auto& e : features) out += e.feature + " = " + e.csv_column + "\n";
  return out;
}

nlohmann::json IngestReport::to_json() const {
  nlohmann::json columns = nlohmann::json::object();
  for (const auto& [name, tally] : per_column) {
    columns[name] = {{"missing", tally.missing}, {"unparseable", tally.unparseable}};
  }
  return {
      {"rows_read", rows_read},
      {"rows_kept", rows_kept},
      {"rows_dropped_missing", rows_dropped_missing},
      {"rows_dropped_unparseable", rows_dropped_unparseable},
      {"rows_malformed", rows_malformed},
      {"per_column", std::move(columns)},
  };
}

std::uint32_t VocabularyBuilder::observe(std::string_view value) {
  auto [it, inserted] =
      ids_.try_emplace(std::string(value), static_cast<std::uint32_t>(values_.size()));
  if (inserted) values_.emplace_back(value);
  return it->second;
}

std::vector<std::string> VocabularyBuilder::finish(std::vector<std::uint32_t>& remap) const {
  std::vector<std::uint32_t> order(values_.size());
  for (std::uint32_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::uint32_t a, std::uint32_t b) { return values_[a] < values_[b]; });
  std::vector<std::string> vocabulary;
  vocabulary.reserve(order.size());
  remap.assign(values_.size(), 0);
  for (std::uint32_t rank = 0; rank < order.size(); ++rank) {
    vocabulary.push_back(values_[order[rank]]);
    remap[order[rank]] = rank + 1;
  }
  return vocabulary;
}

FeatureSchema build_vocabularies(std::span<const std::vector<std::string>> rows,
                                 const std::vector<FeatureSpec>& features,
                                 const std::string& target_name) {
  if (rows.empty()) throw DataError("build_vocabularies: no rows");
  std::vector<FeatureDescriptor> descriptors;
  for (std::size_t f = 0; f < features.size(); ++f) {
    FeatureDescriptor desc{features[f].name, features[f].kind, {}};
    if (desc.is_categorical()) {
      VocabularyBuilder builder;
      for (const auto& row : rows) builder.observe(row.at(f));
      std::vector<std::uint32_t> remap;
      desc.vocabulary = builder.finish(remap);
    }
    descriptors.push_back(std::move(desc));
  }
  return FeatureSchema(std::move(descriptors), target_name);
}

Dataset encode_rows(const FeatureSchema& schema, std::span<const std::vector<std::string>> rows,
                    std::span<const std::string> targets) {
  if (rows.size() != targets.size()) throw DataError("encode_rows: row/target count mismatch");
  std::vector<std::vector<double>> columns(schema.size());
  for (std::size_t f = 0; f < schema.size(); ++f) {
    const auto& desc = schema.feature(f);
    columns[f].reserve(rows.size());
    for (const auto& row : rows) {
      if (desc.is_categorical()) {
        columns[f].push_back(desc.encode(row.at(f)));
      } else {
        auto v = parse_count(row.at(f));
        if (!v) throw DataError("unparseable value '" + row.at(f) + "' for " + desc.name);
        columns[f].push_back(*v);
      }
    }
  }
  std::vector<double> target;
  target.reserve(targets.size());
  for (const auto& t : targets) {
    auto v = parse_cost(t);
    if (!v) throw DataError("unparseable cost '" + t + "'");
    target.push_back(*v);
  }
  return Dataset(schema, std::move(columns), std::move(target));
}

std::pair<Dataset, IngestReport> ingest_csv(const std::filesystem::path& path,
                                            const ColumnMapping& mapping) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("input file not found or unreadable: " + path.string());
  return ingest_csv(in, mapping);
}

std::pair<Dataset, IngestReport> ingest_csv(std::istream& in, const ColumnMapping& mapping) {
  CsvReader reader(in);
  std::vector<std::string> fields;
  if (reader.next(fields) != CsvReader::Status::kRecord) {
    throw DataError("CSV header row missing or malformed");
  }
  std::vector<std::string> header;
  for (const auto& h : fields) header.emplace_back(trim(h));

  auto locate = [&](const std::string& column) {
    auto it = std::find(header.begin(), header.end(), column);
    if (it == header.end()) throw DataError("mapped column '" + column + "' not found in CSV header");
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t n_features = mapping.features.size();
  std::vector<std::size_t> source(n_features);
  for (std::size_t f = 0; f < n_features; ++f) source[f] = locate(mapping.features[f].csv_column);
  const std::size_t target_source = locate(mapping.target_column);

  IngestReport report;
  for (const auto& e : mapping.features) report.per_column[e.feature];
  report.per_column[mapping.target_name];

  std::vector<VocabularyBuilder> vocab(n_features);
  std::vector<std::vector<std::uint32_t>> provisional(n_features);
  std::vector<std::vector<double>> numeric(n_features);
  std::vector<double> target;

  std::vector<std::uint32_t> row_ids(n_features);
  std::vector<double> row_values(n_features);
  std::vector<char> missing(n_features + 1);
  std::vector<char> bad(n_features + 1);

  while (true) {
    const auto status = reader.next(fields);
    if (status == CsvReader::Status::kEnd) break;
    // A trailing blank line is not a record.
    if (status == CsvReader::Status::kRecord && fields.size() == 1 && fields[0].empty() &&
        in.rdbuf()->sgetc() == std::char_traits<char>::eof()) {
      break;
    }
    ++report.rows_read;
    if (status == CsvReader::Status::kMalformed || fields.size() != header.size()) {
      ++report.rows_malformed;
      ++report.rows_dropped_unparseable;
      continue;
    }

    std::fill(missing.begin(), missing.end(), 0);
    std::fill(bad.begin(), bad.end(), 0);
    bool any_missing = false;
    bool any_bad = false;
    for (std::size_t f = 0; f < n_features; ++f) {
      const auto cell = trim(fields[source[f]]);
      if (cell.empty()) {
        missing[f] = 1;
        any_missing = true;
        continue;
      }
      if (mapping.features[f].kind == FeatureKind::kNumeric) {
        auto v = parse_count(cell);
        if (!v) {
          bad[f] = 1;
          any_bad = true;
        } else {
          row_values[f] = *v;
        }
      }
    }
    double cost = 0.0;
    const auto cost_cell = trim(fields[target_source]);
    if (cost_cell.empty()) {
      missing[n_features] = 1;
      any_missing = true;
    } else if (auto v = parse_cost(cost_cell)) {
      cost = *v;
    } else {
      bad[n_features] = 1;
      any_bad = true;
    }

    if (any_missing || any_bad) {
      for (std::size_t f = 0; f <= n_features; ++f) {
        const std::string& name =
            f < n_features ? mapping.features[f].feature : mapping.target_name;
        if (missing[f]) ++report.per_column[name].missing;
        if (bad[f]) ++report.per_column[name].unparseable;
      }
      if (any_missing) {
        ++report.rows_dropped_missing;
      } else {
        ++report.rows_dropped_unparseable;
      }
      continue;
    }

    for (std::size_t f = 0; f < n_features; ++f) {
      if (mapping.features[f].kind == FeatureKind::kNumeric) {
        numeric[f].push_back(row_values[f]);
      } else {
        provisional[f].push_back(vocab[f].observe(trim(fields[source[f]])));
      }
    }
    target.push_back(cost);
    ++report.rows_kept;
  }

  std::vector<FeatureDescriptor> descriptors;
  std::vector<std::vector<double>> columns(n_features);
  for (std::size_t f = 0; f < n_features; ++f) {
    FeatureDescriptor desc{mapping.features[f].feature, mapping.features[f].kind, {}};
    if (desc.is_categorical()) {
      std::vector<std::uint32_t> remap;
      desc.vocabulary = vocab[f].finish(remap);
      columns[f].reserve(provisional[f].size());
      for (auto id : provisional[f]) columns[f].push_back(remap[id]);
      provisional[f].clear();
      provisional[f].shrink_to_fit();
    } else {
      columns[f] = std::move(numeric[f]);
    }
    descriptors.push_back(std::move(desc));
  }
  FeatureSchema schema(std::move(descriptors), mapping.target_name);
  return {Dataset(std::move(schema), std::move(columns), std::move(target)), std::move(report)};
}

}  // namespace sparcs::data
