#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace sparcs::pipeline {

struct StageRecord {
  std::string completed_at;  // UTC, ISO 8601
  std::string config_hash;
  nlohmann::json options;
  std::vector<std::string> artifacts;  // relative to the run directory
};

// manifest.json in a run directory:
//   {"format": "sparcs-run/1", "input": ..., "seed": ...,
//    "stages": {"ingest": {...StageRecord...}, ...}}
// "seed" is the --seed of the most recent stage; every stage keeps its own
// in its options (raw command-line strings).
// A stage is recorded only after checking that all its artifacts exist.
class RunManifest {
 public:
  // Starts empty when no manifest exists; throws DataError on a corrupt one.
  static RunManifest load_or_create(const std::filesystem::path& run_dir);

  void set_input(const std::string& input) { doc_["input"] = input; }
  void set_seed(std::uint64_t seed) { doc_["seed"] = seed; }
  // Throws DataError naming the first artifact that does not exist.
  void record(const std::string& stage, const StageRecord& record);
  void save() const;

  const nlohmann::json& document() const { return doc_; }

 private:
  std::filesystem::path dir_;
  nlohmann::json doc_;
};

std::string utc_timestamp();
// Hex FNV-1a of the canonical dump of `options`.
std::string config_hash(const nlohmann::json& options);

}  // namespace sparcs::pipeline
