#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "oracles/information.hpp"
#include "sparcs/common/errors.hpp"
#include "sparcs/common/io.hpp"
#include "sparcs/data/column_store.hpp"
#include "sparcs/data/csv.hpp"
#include "sparcs/data/dataset.hpp"
#include "sparcs/data/ingest.hpp"
#include "sparcs/data/one_hot.hpp"
#include "sparcs/data/split.hpp"
#include "sparcs/data/synthetic.hpp"
#include "sparcs/tree/tree_builder.hpp"
#include "support/helpers.hpp"

using namespace sparcs;
using namespace sparcs::data;

namespace {

const std::filesystem::path kFixtures = SPARCS_FIXTURE_DIR;

std::vector<std::vector<std::string>> read_all(const std::string& text, std::vector<CsvReader::Status>* statuses = nullptr) {
  std::istringstream in(text);
  CsvReader reader(in);
  std::vector<std::vector<std::string>> out;
  std::vector<std::string> fields;
  for (;;) {
    const auto s = reader.next(fields);
    if (s == CsvReader::Status::kEnd) break;
    if (statuses) statuses->push_back(s);
    out.push_back(fields);
  }
  return out;
}

std::size_t count_lines(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
}

FeatureSchema small_schema() {
  return FeatureSchema({{"a", FeatureKind::kCategorical, {"p", "q", "r"}},
                        {"b", FeatureKind::kCategorical, {"x", "y"}},
                        {"los", FeatureKind::kNumeric, {}}},
                       "cost");
}

}  // namespace

TEST_SUITE("csv") {
  TEST_CASE("plain, quoted, escaped and multi-line fields") {
    const auto rows = read_all("a,b,c\n1,\"x, y\",\"say \"\"hi\"\"\"\n2,\"two\nlines\",3\n");
    REQUIRE(rows.size() == 3);
    CHECK(rows[1] == std::vector<std::string>{"1", "x, y", "say \"hi\""});
    CHECK(rows[2] == std::vector<std::string>{"2", "two\nlines", "3"});
  }

  TEST_CASE("CRLF line endings and a UTF-8 byte order mark") {
    const auto rows = read_all("\xEF\xBB\xBFh1,h2\r\nv1,v2\r\n");
    REQUIRE(rows.size() == 2);
    CHECK(rows[0][0] == "h1");
    CHECK(rows[1] == std::vector<std::string>{"v1", "v2"});
  }

  TEST_CASE("empty fields and a missing final newline") {
    const auto rows = read_all("a,,c\n,\n1,2");
    REQUIRE(rows.size() == 3);
    CHECK(rows[0] == std::vector<std::string>{"a", "", "c"});
    CHECK(rows[1] == std::vector<std::string>{"", ""});
    CHECK(rows[2] == std::vector<std::string>{"1", "2"});
  }

  TEST_CASE("stray quote is malformed but reading continues") {
    std::vector<CsvReader::Status> st;
    const auto rows = read_all("a,b\nx\"y,z\nok,1\n", &st);
    REQUIRE(st.size() == 3);
    CHECK(st[1] == CsvReader::Status::kMalformed);
    CHECK(st[2] == CsvReader::Status::kRecord);
    CHECK(rows[2] == std::vector<std::string>{"ok", "1"});
  }

  TEST_CASE("record_line tracks the starting line of multi-line records") {
    std::istringstream in("h\n\"a\nb\"\nc\n");
    CsvReader reader(in);
    std::vector<std::string> f;
    reader.next(f);
    CHECK(reader.record_line() == 1);
    reader.next(f);
    CHECK(reader.record_line() == 2);
    reader.next(f);
    CHECK(reader.record_line() == 4);
  }

  TEST_CASE("escape and split are inverses") {
    for (const std::string s : {"plain", "with,comma", "with \"quote\"", ""}) {
      const auto back = split_csv_line(csv_escape(s) + "," + csv_escape("z"));
      REQUIRE(back.size() == 2);
      CHECK(back[0] == s);
    }
    CHECK(csv_escape("plain") == "plain");
    CHECK(csv_escape("a,b") == "\"a,b\"");
  }
}

TEST_SUITE("schema") {
  TEST_CASE("encode and decode round trip; non-members map to UNKNOWN") {
    const auto schema = small_schema();
    const auto& a = schema.feature(0);
    for (const auto& v : a.vocabulary) CHECK(a.decode(a.encode(v)) == v);
    CHECK(a.encode("p") == 1);
    CHECK(a.encode("r") == 3);
    CHECK(a.encode("zzz") == kUnknownCode);
    CHECK(a.decode(0) == kUnknownLabel);
    CHECK_THROWS_AS(a.decode(4), DataError);
  }

  TEST_CASE("construction rejects unsorted vocabularies and duplicate names") {
    CHECK_THROWS_AS(FeatureSchema({{"a", FeatureKind::kCategorical, {"b", "a"}}}, "cost"), DataError);
    CHECK_THROWS_AS(FeatureSchema({{"a", FeatureKind::kCategorical, {"a", "a"}}}, "cost"), DataError);
    CHECK_THROWS_AS(FeatureSchema({{"a", FeatureKind::kNumeric, {}}, {"a", FeatureKind::kNumeric, {}}}, "cost"),
                    DataError);
    CHECK_THROWS_AS(FeatureSchema({{"cost", FeatureKind::kNumeric, {}}}, "cost"), DataError);
  }

  TEST_CASE("JSON round trip preserves the schema and its fingerprint") {
    const auto schema = small_schema();
    const auto back = FeatureSchema::from_json(nlohmann::json::parse(schema.to_json().dump()));
    CHECK(back == schema);
    CHECK(back.fingerprint() == schema.fingerprint());
    CHECK(schema.fingerprint().size() == 16);
  }

  TEST_CASE("fingerprint changes with any vocabulary change") {
    const auto a = small_schema();
    const FeatureSchema b({{"a", FeatureKind::kCategorical, {"p", "q", "s"}},
                           {"b", FeatureKind::kCategorical, {"x", "y"}},
                           {"los", FeatureKind::kNumeric, {}}},
                          "cost");
    CHECK(a.fingerprint() != b.fingerprint());
  }

  TEST_CASE("default SPARCS feature list") {
    const auto& cols = sparcs_default_columns();
    REQUIRE(cols.size() == 11);
    int numeric = 0;
    for (const auto& c : cols) numeric += c.kind == FeatureKind::kNumeric;
    CHECK(numeric == 1);
    CHECK(cols[1].feature == "length_of_stay");
    CHECK(cols[1].kind == FeatureKind::kNumeric);
  }

  TEST_CASE("select keeps schema order") {
    const auto s = small_schema().select({"los", "a"});
    REQUIRE(s.size() == 2);
    CHECK(s.feature(0).name == "a");
    CHECK(s.feature(1).name == "los");
    CHECK_THROWS_AS(small_schema().select({"nope"}), DataError);
  }
}

TEST_SUITE("dataset") {
  TEST_CASE("constructor enforces invariants") {
    const auto schema = small_schema();
    CHECK_NOTHROW(Dataset(schema, {{1, 0}, {2, 1}, {3.5, 0}}, {1.0, 2.0}));
    CHECK_THROWS_AS(Dataset(schema, {{1, 0}, {2, 1}}, {1.0, 2.0}), DataError);           // column count
    CHECK_THROWS_AS(Dataset(schema, {{1}, {2, 1}, {3, 0}}, {1.0, 2.0}), DataError);      // length
    CHECK_THROWS_AS(Dataset(schema, {{4, 0}, {2, 1}, {3, 0}}, {1.0, 2.0}), DataError);   // code range
    CHECK_THROWS_AS(Dataset(schema, {{1.5, 0}, {2, 1}, {3, 0}}, {1.0, 2.0}), DataError); // non-integral
    CHECK_THROWS_AS(Dataset(schema, {{1, 0}, {2, 1}, {3, 0}}, {-1.0, 2.0}), DataError);  // negative cost
    CHECK_THROWS_AS(Dataset(schema, {{1, 0}, {2, 1}, {NAN, 0}}, {1.0, 2.0}), DataError);
  }

  TEST_CASE("take and select_features") {
    const Dataset ds(small_schema(), {{1, 2, 3}, {0, 1, 2}, {5, 6, 7}}, {10, 20, 30});
    const std::vector<std::size_t> rows = {2, 0, 2};
    const auto t = ds.take(rows);
    CHECK(t.row_count() == 3);
    CHECK(t.value(0, 0) == 3);
    CHECK(t.target()[1] == 10);
    const auto s = ds.select_features({"los"});
    CHECK(s.feature_count() == 1);
    CHECK(s.value(1, 0) == 6);
    CHECK(ds.row(1) == std::vector<double>{2, 1, 6});
  }
}

TEST_SUITE("column store") {
  TEST_CASE("save and load round trip; re-saving is byte-identical") {
    testutil::TempDir dir;
    const Dataset ds(small_schema(), {{1, 2, 3}, {0, 1, 2}, {5.25, 6, 7}}, {10.5, 20, 30});
    save_dataset(ds, dir / "a");
    const auto back = load_dataset(dir / "a");
    CHECK(back.schema() == ds.schema());
    CHECK(back.row_count() == 3);
    for (std::size_t f = 0; f < 3; ++f) {
      CHECK(std::equal(back.column(f).begin(), back.column(f).end(), ds.column(f).begin()));
    }
    save_dataset(back, dir / "b");
    for (const auto& entry : std::filesystem::directory_iterator(dir / "a")) {
      CHECK(read_file(entry.path()) == read_file(dir / "b" / entry.path().filename().string()));
    }
  }

  TEST_CASE("loading a missing directory is a data error") {
    testutil::TempDir dir;
    CHECK_THROWS_AS(load_dataset(dir / "absent"), DataError);
  }
}

TEST_SUITE("ingest") {
  TEST_CASE("cost and count cell parsing") {
    CHECK(parse_cost("$12,652.00").value() == doctest::Approx(12652.00).epsilon(1e-15));
    CHECK(parse_cost("1234.5").value() == 1234.5);
    CHECK(parse_cost(" $0.00 ").value() == 0.0);
    CHECK_FALSE(parse_cost(""));
    CHECK_FALSE(parse_cost("n/a"));
    CHECK_FALSE(parse_cost("-5"));
    CHECK_FALSE(parse_cost("$"));
    CHECK(parse_count("120 +").value() == 120.0);
    CHECK(parse_count(" 9 ").value() == 9.0);
    CHECK_FALSE(parse_count("abc"));
    CHECK_FALSE(parse_count("-1"));
  }

  TEST_CASE("vocabularies are sorted distinct values with 1-based codes") {
    const std::vector<std::vector<std::string>> rows = {{"M", "Y"}, {"F", "Y"}, {"M", "Y"}};
    const auto schema = build_vocabularies(rows, {{"gender", FeatureKind::kCategorical}, {"flag", FeatureKind::kCategorical}},
                                           "cost");
    CHECK(schema.feature(0).vocabulary == std::vector<std::string>{"F", "M"});
    CHECK(schema.feature(0).encode("F") == 1);
    CHECK(schema.feature(0).encode("M") == 2);
    CHECK(schema.feature(1).vocabulary == std::vector<std::string>{"Y"});
    const std::vector<std::string> targets = {"1", "2", "3"};
    const auto ds = encode_rows(schema, rows, targets);
    for (std::size_t r = 0; r < 3; ++r) CHECK(ds.value(r, 1) == 1);
    const std::vector<std::vector<std::string>> unseen = {{"U", "Y"}};
    const std::vector<std::string> t1 = {"5"};
    CHECK(encode_rows(schema, unseen, t1).value(0, 0) == kUnknownCode);
    CHECK_THROWS_AS(build_vocabularies(std::vector<std::vector<std::string>>{}, {}, "cost"), DataError);
  }

  TEST_CASE("fixture file: every row accounted for") {
    const auto path = kFixtures / "sparcs_sample.csv";
    const auto [ds, report] = ingest_csv(path, ColumnMapping::sparcs_default());
    // Line-count oracle: the fixture has no multi-line fields.
    CHECK(report.rows_read == count_lines(path) - 1);
    CHECK(report.rows_read == report.rows_kept + report.rows_dropped_missing + report.rows_dropped_unparseable);
    CHECK(report.rows_kept == 7);
    CHECK(report.rows_dropped_missing == 2);
    CHECK(report.rows_dropped_unparseable == 3);
    CHECK(report.rows_malformed == 1);
    CHECK(report.per_column.at("ccs_diagnosis_code").missing == 1);
    CHECK(report.per_column.at("total_costs").missing == 1);
    CHECK(report.per_column.at("total_costs").unparseable == 1);
    CHECK(report.per_column.at("length_of_stay").unparseable == 1);

    REQUIRE(ds.row_count() == 7);
    CHECK(ds.feature_count() == 11);
    CHECK(ds.target()[0] == 12652.00);
    CHECK(ds.target()[1] == 98765.43);
    const auto los = *ds.schema().index_of("length_of_stay");
    CHECK(ds.value(0, los) == 4);
    CHECK(ds.value(1, los) == 120);
    CHECK(ds.value(5, los) == 9);  // " 9 " trimmed
    const auto gender = *ds.schema().index_of("gender");
    CHECK(ds.schema().feature(gender).vocabulary == std::vector<std::string>{"F", "M", "U"});
    const auto cert = *ds.schema().index_of("operating_certificate_number");
    CHECK(ds.schema().feature(cert).vocabulary == std::vector<std::string>{"0101000", "0102000", "0103001"});
  }

  TEST_CASE("ingest is deterministic down to the serialized bytes") {
    testutil::TempDir dir;
    const auto path = kFixtures / "sparcs_sample.csv";
    save_dataset(ingest_csv(path, ColumnMapping::sparcs_default()).first, dir / "a");
    save_dataset(ingest_csv(path, ColumnMapping::sparcs_default()).first, dir / "b");
    for (const auto& entry : std::filesystem::directory_iterator(dir / "a")) {
      CHECK(read_file(entry.path()) == read_file(dir / "b" / entry.path().filename().string()));
    }
  }

  TEST_CASE("missing file and missing mapped column are hard errors") {
    CHECK_THROWS_AS(ingest_csv(kFixtures / "no_such_file.csv", ColumnMapping::sparcs_default()), DataError);
    auto mapping = ColumnMapping::sparcs_default();
    mapping.features[0].csv_column = "Facility Id";
    try {
      ingest_csv(kFixtures / "sparcs_sample.csv", mapping);
      FAIL("expected DataError");
    } catch (const DataError& e) {
      CHECK(std::string(e.what()).find("Facility Id") != std::string::npos);
    }
    std::istringstream empty("");
    CHECK_THROWS_AS(ingest_csv(empty, ColumnMapping::sparcs_default()), DataError);
  }

  TEST_CASE("mapping file format") {
    const auto loaded = ColumnMapping::load(kFixtures / "sparcs_columns.conf");
    const auto def = ColumnMapping::sparcs_default();
    REQUIRE(loaded.features.size() == def.features.size());
    for (std::size_t i = 0; i < def.features.size(); ++i) {
      CHECK(loaded.features[i].feature == def.features[i].feature);
      CHECK(loaded.features[i].csv_column == def.features[i].csv_column);
      CHECK(loaded.features[i].kind == def.features[i].kind);
    }
    CHECK(loaded.target_column == "Total Costs");
    const auto again = ColumnMapping::parse(def.to_text());
    CHECK(again.to_text() == def.to_text());
    CHECK_THROWS_AS(ColumnMapping::load(kFixtures / "missing.conf"), ConfigError);
    CHECK_THROWS_AS(ColumnMapping::parse("target = Total Costs\nno equals sign\n"), ConfigError);
    CHECK_THROWS_AS(ColumnMapping::parse("a = A\n"), ConfigError);  // no target
  }
}

TEST_SUITE("split") {
  TEST_CASE("50/50 on 100 rows") {
    const auto s = split_indices(100, SplitConfig{});
    CHECK(s.train.size() == 50);
    CHECK(s.test.size() == 50);
  }

  TEST_CASE("partition property and rounding") {
    for (std::size_t n : {2u, 3u, 7u, 101u, 1000u}) {
      for (double f : {0.3, 0.5, 0.77}) {
        if (std::llround(f * n) == 0 || static_cast<std::size_t>(std::llround(f * n)) == n) continue;
        const auto s = split_indices(n, SplitConfig{f, 9});
        CHECK(s.test.size() == static_cast<std::size_t>(std::llround(f * static_cast<double>(n))));
        std::vector<std::size_t> all = s.train;
        all.insert(all.end(), s.test.begin(), s.test.end());
        std::sort(all.begin(), all.end());
        for (std::size_t i = 0; i < n; ++i) REQUIRE(all[i] == i);
        CHECK(std::is_sorted(s.train.begin(), s.train.end()));
        CHECK(std::is_sorted(s.test.begin(), s.test.end()));
      }
    }
  }

  TEST_CASE("deterministic per seed, different across seeds") {
    const auto a = split_indices(1000, SplitConfig{0.5, 1});
    const auto b = split_indices(1000, SplitConfig{0.5, 1});
    const auto c = split_indices(1000, SplitConfig{0.5, 2});
    CHECK(a.test == b.test);
    CHECK(a.test != c.test);
  }

  TEST_CASE("degenerate inputs") {
    CHECK_THROWS_AS(split_indices(1, SplitConfig{}), DataError);
    CHECK_THROWS_AS(split_indices(10, SplitConfig{0.0, 1}), std::invalid_argument);
    CHECK_THROWS_AS(split_indices(10, SplitConfig{1.0, 1}), std::invalid_argument);
    CHECK_THROWS_AS(split_indices(2, SplitConfig{0.1, 1}), DataError);
  }

  TEST_CASE("split datasets carry the rows they claim") {
    const Dataset ds(small_schema(), {{1, 2, 3, 1}, {0, 1, 2, 2}, {5, 6, 7, 8}}, {10, 20, 30, 40});
    const auto idx = split_indices(4, SplitConfig{0.5, 3});
    const auto parts = split(ds, SplitConfig{0.5, 3});
    for (std::size_t i = 0; i < idx.test.size(); ++i) CHECK(parts.test.target()[i] == ds.target()[idx.test[i]]);
    CHECK(parts.train.schema() == ds.schema());
  }
}

TEST_SUITE("one_hot") {
  TEST_CASE("width arithmetic: vocab sizes 3 and 2 plus one numeric") {
    const OneHotLayout layout(small_schema());
    CHECK(layout.width() == (3 + 1) + (2 + 1) + 1);
    CHECK(layout.labels()[0] == "a=<UNKNOWN>");
    CHECK(layout.labels()[1] == "a=p");
    CHECK(layout.labels()[7] == "los");
  }

  TEST_CASE("one active indicator per block; UNKNOWN slot; numeric pass-through") {
    const Dataset ds(small_schema(), {{0, 2}, {0, 1}, {3.5, 12}}, {1, 2});
    const auto m = one_hot(ds);
    REQUIRE(m.values.rows() == 2);
    REQUIRE(m.values.cols() == 8);
    // Row 0 is all-UNKNOWN.
    CHECK(m.values(0, 0) == 1);
    CHECK(m.values(0, 4) == 1);
    CHECK(m.values.row(0).segment(0, 4).sum() == 1);
    CHECK(m.values.row(0).segment(4, 3).sum() == 1);
    CHECK(m.values(0, 7) == 3.5);
    CHECK(m.values(1, 2) == 1);  // a=q
    CHECK(m.values(1, 5) == 1);  // b=x
    CHECK(m.values(1, 7) == 12);
  }
}

TEST_SUITE("synthetic") {
  TEST_CASE("n = 0 and invalid specs are errors") {
    CHECK_THROWS_AS(generate_synthetic(planted_depth2_spec(), 0, 1), DataError);
    auto bad = planted_depth2_spec();
    bad.planted[0].feature = 99;
    CHECK_THROWS_AS(bad.validate(), DataError);
    auto deep = planted_depth2_spec();
    deep.max_depth = 1;
    CHECK_THROWS_AS(deep.validate(), DataError);
  }

  TEST_CASE("sigma = 0: target equals the planted function exactly") {
    const auto spec = planted_depth2_spec();
    const auto ds = generate_synthetic(spec, 500, 4);
    for (std::size_t r = 0; r < ds.row_count(); ++r) REQUIRE(ds.target()[r] == spec.evaluate(ds.row(r)));
  }

  TEST_CASE("sigma = 0 depth-2 data is realizable by a depth-2 tree") {
    const auto ds = generate_synthetic(planted_depth2_spec(), 1000, 8);
    const auto tree = tree::fit_tree(ds, tree::TreeConfig{2, 1});
    double sse = 0.0;
    const auto pred = tree.predict(ds);
    for (std::size_t r = 0; r < ds.row_count(); ++r) sse += std::pow(pred[r] - ds.target()[r], 2);
    CHECK(sse == 0.0);
  }

  TEST_CASE("same seed, same data; different seed, different data") {
    const auto a = generate_synthetic(sparcs_like_spec(), 300, 1);
    const auto b = generate_synthetic(sparcs_like_spec(), 300, 1);
    const auto c = generate_synthetic(sparcs_like_spec(), 300, 2);
    CHECK(std::equal(a.target().begin(), a.target().end(), b.target().begin()));
    CHECK_FALSE(std::equal(a.target().begin(), a.target().end(), c.target().begin()));
    CHECK(a.schema().size() == 11);
    for (double t : a.target()) REQUIRE(t >= 0.0);
  }

  TEST_CASE("planted informative features carry strictly more exact MI than noise") {
    auto spec = ranking_recovery_spec();
    spec.noise_sigma = 0.0;  // discrete target, so the empirical MI is exact
    const auto informative = spec.informative_features();
    REQUIRE(informative.size() == 2);
    const auto ds = generate_synthetic(spec, 5000, 12);
    std::vector<int> y;
    for (double t : ds.target()) y.push_back(static_cast<int>(t));
    long double weakest_signal = 1e9L, strongest_noise = 0.0L;
    for (std::size_t f = 0; f < ds.feature_count(); ++f) {
      std::vector<int> x;
      for (double v : ds.column(f)) x.push_back(static_cast<int>(v));
      const auto mi = oracle::mutual_information(x, y);
      const bool signal = std::find(informative.begin(), informative.end(), ds.schema().feature(f).name) !=
                          informative.end();
      if (signal) weakest_signal = std::min(weakest_signal, mi);
      else strongest_noise = std::max(strongest_noise, mi);
    }
    CHECK(weakest_signal > strongest_noise);
  }

  TEST_CASE("CSV export ingests back to the same dataset") {
    const auto spec = planted_depth2_spec();
    const auto ds = generate_synthetic(spec, 200, 3);
    ColumnMapping mapping;
    for (const auto& f : spec.features) mapping.features.push_back({f.name, f.name, f.kind});
    mapping.target_column = "cost";
    mapping.target_name = spec.target_name;
    std::stringstream csv;
    write_csv(ds, mapping, csv);
    const auto [back, report] = ingest_csv(csv, mapping);
    CHECK(report.rows_kept == 200);
    REQUIRE(back.row_count() == 200);
    for (std::size_t r = 0; r < 200; ++r) {
      REQUIRE(back.target()[r] == ds.target()[r]);
      for (std::size_t f = 0; f < ds.feature_count(); ++f) {
        const auto& d = ds.schema().feature(f);
        if (d.is_categorical()) {
          REQUIRE(back.schema().feature(f).decode(static_cast<std::uint32_t>(back.value(r, f))) ==
                  d.decode(static_cast<std::uint32_t>(ds.value(r, f))));
        } else {
          REQUIRE(back.value(r, f) == ds.value(r, f));
        }
      }
    }
  }
}
