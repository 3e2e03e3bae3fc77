#include "sparcs/data/column_store.hpp"

#include <bit>
#include <cstdio>
#include <fstream>
#include <string>

#include "sparcs/common/errors.hpp"
#include "sparcs/common/io.hpp"

namespace sparcs::data {

static_assert(std::endian::native == std::endian::little,
              "column store assumes a little-endian host");

namespace {

constexpr const char* kFormat = "sparcs-columns/1";

std::string column_file(std::size_t index) {
  char name[32];
  std::snprintf(name, sizeof(name), "f%02zu.f64", index);
  return name;
}

void write_vector(const std::filesystem::path& path, std::span<const double> values) {
  write_file_atomic(path, std::string_view(reinterpret_cast<const char*>(values.data()),
                                           values.size() * sizeof(double)));
}

std::vector<double> read_vector(const std::filesystem::path& path, std::size_t count) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("missing column file " + path.string());
  in.seekg(0, std::ios::end);
  const auto size = static_cast<std::size_t>(in.tellg());
  if (size != count * sizeof(double)) {
    throw DataError("column file " + path.string() + " has unexpected size");
  }
  in.seekg(0);
  std::vector<double> values(count);
  in.read(reinterpret_cast<char*>(values.data()), static_cast<std::streamsize>(size));
  return values;
}

}  // namespace

void save_dataset(const Dataset& dataset, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  nlohmann::json columns = nlohmann::json::array();
  for (std::size_t f = 0; f < dataset.feature_count(); ++f) {
    const std::string file = column_file(f);
    write_vector(dir / file, dataset.column(f));
    columns.push_back({{"name", dataset.schema().feature(f).name}, {"file", file}});
  }
  write_vector(dir / "target.f64", dataset.target());
  nlohmann::json meta = {
      {"format", kFormat},
      {"row_count", dataset.row_count()},
      {"schema", dataset.schema().to_json()},
      {"columns", std::move(columns)},
      {"target", {{"name", dataset.schema().target_name()}, {"file", "target.f64"}}},
  };
  write_file_atomic(dir / "schema.json", meta.dump(2) + "\n");
}

Dataset load_dataset(const std::filesystem::path& dir) {
  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(read_file(dir / "schema.json"));
  } catch (const nlohmann::json::exception& e) {
    throw DataError("malformed " + (dir / "schema.json").string() + ": " + e.what());
  }
  if (meta.value("format", "") != kFormat) {
    throw DataError("unsupported dataset format in " + dir.string());
  }
  FeatureSchema schema = FeatureSchema::from_json(meta.at("schema"));
  const auto rows = meta.at("row_count").get<std::size_t>();
  const auto& cols = meta.at("columns");
  if (cols.size() != schema.size()) throw DataError("column list does not match schema");
  std::vector<std::vector<double>> columns;
  for (const auto& c : cols) {
    columns.push_back(read_vector(dir / c.at("file").get<std::string>(), rows));
  }
  auto target = read_vector(dir / meta.at("target").at("file").get<std::string>(), rows);
  return Dataset(std::move(schema), std::move(columns), std::move(target));
}

}  // namespace sparcs::data
