#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <json.hpp>

#include "sparcs/data/dataset.hpp"

namespace sparcs::data {

// Which CSV column feeds each schema feature and the target.
//
// Text form (plain key=value, '#' comments, blank lines ignored):
//
//   target  = Total Costs
//   numeric = length_of_stay              # comma-separated feature names
//   length_of_stay = Length of Stay       # every other key is a feature
//
// Features keep the order in which they appear in the file.
struct ColumnMapping {
  struct Entry {
    std::string feature;
    std::string csv_column;
    FeatureKind kind = FeatureKind::kCategorical;
  };
  std::vector<Entry> features;
  std::string target_column;
  std::string target_name = std::string(kSparcsTargetName);

  static ColumnMapping parse(std::string_view text);
  static ColumnMapping load(const std::filesystem::path& path);
  // The eleven SPARCS features mapped to their public-file headers.
  static ColumnMapping sparcs_default();

  std::string to_text() const;
};

struct ColumnTally {
  std::size_t missing = 0;
  std::size_t unparseable = 0;
};

// Invariant: rows_read = rows_kept + rows_dropped_missing + rows_dropped_unparseable.
struct IngestReport {
  std::size_t rows_read = 0;
  std::size_t rows_kept = 0;
  std::size_t rows_dropped_missing = 0;
  std::size_t rows_dropped_unparseable = 0;
  // Rows with the wrong number of fields or broken quoting; counted in
  // rows_dropped_unparseable.
  std::size_t rows_malformed = 0;
  std::map<std::string, ColumnTally> per_column;

  nlohmann::json to_json() const;
};

// "$12,652.00" -> 12652.00. Empty or non-numeric text, negatives, and
// non-finite values yield nullopt.
std::optional<double> parse_cost(std::string_view cell);
// Non-negative number; the SPARCS top-code "120 +" maps to 120.
std::optional<double> parse_count(std::string_view cell);
std::string_view trim(std::string_view text);

// Assigns provisional ids to category strings in first-seen order, then
// produces the sorted vocabulary and the id -> code remapping.
class VocabularyBuilder {
 public:
  std::uint32_t observe(std::string_view value);
  // remap[provisional id] = 1-based code in the sorted vocabulary.
  std::vector<std::string> finish(std::vector<std::uint32_t>& remap) const;
  std::size_t distinct() const { return values_.size(); }

 private:
  std::unordered_map<std::string, std::uint32_t> ids_;
  std::vector<std::string> values_;
};

struct FeatureSpec {
  std::string name;
  FeatureKind kind = FeatureKind::kCategorical;
};

// Vocabulary per categorical feature = sorted distinct observed strings.
// rows[i][f] is the raw cell for feature f. Throws on empty input.
FeatureSchema build_vocabularies(std::span<const std::vector<std::string>> rows,
                                 const std::vector<FeatureSpec>& features,
                                 const std::string& target_name);

// Encodes raw rows against a schema (unseen categories become kUnknownCode).
// Numeric cells are parsed with parse_count and the target with parse_cost;
// rows failing either throw DataError.
Dataset encode_rows(const FeatureSchema& schema, std::span<const std::vector<std::string>> rows,
                    std::span<const std::string> targets);

// Reads, cleans, and encodes a SPARCS-style CSV. Rows missing any mapped
// feature or the target are dropped and tallied as missing; rows with
// malformed CSV or unparseable numbers are dropped and tallied as
// unparseable. Throws DataError for a missing file, an absent header, or a
// mapped column not present in the header.
std::pair<Dataset, IngestReport> ingest_csv(const std::filesystem::path& path,
                                            const ColumnMapping& mapping);
std::pair<Dataset, IngestReport> ingest_csv(std::istream& in, const ColumnMapping& mapping);

}  // namespace sparcs::data
