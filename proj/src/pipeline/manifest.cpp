#include "sparcs/pipeline/manifest.hpp"

#include <chrono>
#include <ctime>

#include "sparcs/common/errors.hpp"
#include "sparcs/common/io.hpp"

namespace sparcs::pipeline {

namespace fs = std::filesystem;

RunManifest RunManifest::load_or_create(const fs::path& run_dir) {
  RunManifest m;
  m.dir_ = run_dir;
  const fs::path path = run_dir / "manifest.json";
  if (!fs::exists(path)) {
    m.doc_ = {{"format", "sparcs-run/1"}, {"stages", nlohmann::json::object()}};
    return m;
  }
  m.doc_ = nlohmann::json::parse(read_file(path), nullptr, false);
  if (m.doc_.is_discarded() || !m.doc_.is_object() || !m.doc_.contains("stages")) {
    throw DataError("corrupt run manifest " + path.string());
  }
  return m;
}

void RunManifest::record(const std::string& stage, const StageRecord& record) {
  for (const auto& a : record.artifacts) {
    if (!fs::exists(dir_ / a)) throw DataError("stage " + stage + " artifact missing: " + a);
  }
  doc_["stages"][stage] = {
      {"completed_at", record.completed_at},
      {"config_hash", record.config_hash},
      {"options", record.options},
      {"artifacts", record.artifacts},
  };
}

void RunManifest::save() const { write_file_atomic(dir_ / "manifest.json", doc_.dump(2) + "\n"); }

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm utc{};
  gmtime_r(&now, &utc);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &utc);
  return buf;
}

std::string config_hash(const nlohmann::json& options) { return hex64(fnv1a64(options.dump())); }

}  // namespace sparcs::pipeline
