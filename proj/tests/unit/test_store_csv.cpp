#include <doctest.h>

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <vector>

#include "truncmeta/config.hpp"
#include "truncmeta/csv.hpp"
#include "truncmeta/inference.hpp"
#include "truncmeta/rng.hpp"
#include "truncmeta/store.hpp"

using namespace truncmeta;

namespace {

std::filesystem::path temp_dir() {
  const auto dir = std::filesystem::temp_directory_path() / "truncmeta_tests";
  std::filesystem::create_directories(dir);
  return dir;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  out << text;
}

TruncatedStore sample_store(std::size_t records, std::uint64_t seed) {
  PanelSchema schema;
  schema.thresholds = {std::nullopt, 0.001, std::nullopt, 0.05, 0.01, std::nullopt, 0.05};
  TruncatedStore store;
  store.schema = schema;
  Rng rng(seed);
  std::vector<double> obs(3);
  std::vector<std::uint8_t> ind(4);
  for (std::size_t r = 0; r < records; ++r) {
    for (auto& p : obs) p = rng.uniform();
    for (auto& b : ind) b = rng.uniform() < 0.3 ? 1 : 0;
    store.append_record(r * 7 + 1, obs, ind);
  }
  return store;
}

bool stores_identical(const TruncatedStore& a, const TruncatedStore& b) {
  if (a.schema.thresholds != b.schema.thresholds) return false;
  if (a.feature_ids != b.feature_ids) return false;
  if (a.indicator_bits != b.indicator_bits) return false;
  if (a.observed.size() != b.observed.size()) return false;
  // bit-identical doubles
  return std::memcmp(a.observed.data(), b.observed.data(),
                     a.observed.size() * sizeof(double)) == 0;
}

}  // namespace

TEST_CASE("store round trip is bit-identical") {
  const auto path = temp_dir() / "roundtrip.tpv";
  const auto store = sample_store(1000, 17);
  write_store(store, path);
  const auto loaded = read_store(path);
  CHECK(stores_identical(store, loaded));
}

TEST_CASE("empty store round trips") {
  const auto path = temp_dir() / "empty.tpv";
  TruncatedStore store;
  store.schema.thresholds = {std::nullopt, 0.01};
  write_store(store, path);
  const auto loaded = read_store(path);
  CHECK(loaded.records() == 0);
  CHECK(loaded.schema.thresholds == store.schema.thresholds);
}

TEST_CASE("corruption and malformed files are rejected") {
  const auto dir = temp_dir();
  const auto path = dir / "corrupt.tpv";
  write_store(sample_store(50, 3), path);

  SUBCASE("single flipped byte fails the checksum") {
    std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(37);
    char byte;
    f.seekg(37);
    f.read(&byte, 1);
    byte = static_cast<char>(byte ^ 0x40);
    f.seekp(37);
    f.write(&byte, 1);
    f.close();
    CHECK_THROWS_WITH_AS(read_store(path), doctest::Contains("checksum"),
                         std::runtime_error);
  }
  SUBCASE("bad magic") {
    const auto bad = dir / "bad_magic.tpv";
    write_text(bad, "NOPE this is not a store, padded to minimum length....");
    CHECK_THROWS_AS(read_store(bad), std::runtime_error);
  }
  SUBCASE("truncated file") {
    std::error_code ec;
    std::filesystem::resize_file(path, 20, ec);
    CHECK(!ec);
    CHECK_THROWS_AS(read_store(path), std::runtime_error);
  }
}

TEST_CASE("truncate_matrix compression accounting") {
  SUBCASE("2.32% below threshold in a fully truncated matrix gives 95.36%") {
    PvalueTable table;
    table.studies = 1;
    const int n = 10000;
    for (int i = 0; i < n; ++i) {
      table.feature_ids.push_back(i);
      // exactly 232 values below 0.001
      table.values.push_back(i < 232 ? 0.0005 : 0.5);
    }
    const auto [store, summary] = truncate_matrix(table, {0.001});
    CHECK(summary.below_fraction == doctest::Approx(0.0232).epsilon(1e-12));
    CHECK(summary.ratio == doctest::Approx(0.9536).epsilon(1e-12));
    CHECK(summary.compressed);
    CHECK(store.records() == n);
  }
  SUBCASE("threshold above every p-value stores more than it saves") {
    PvalueTable table;
    table.studies = 1;
    for (int i = 0; i < 100; ++i) {
      table.feature_ids.push_back(i);
      table.values.push_back(0.2);
    }
    const auto [store, summary] = truncate_matrix(table, {0.9});
    CHECK(summary.below_fraction == 1.0);
    CHECK(summary.ratio < 0.0);
    CHECK(!summary.compressed);
    for (std::size_t r = 0; r < store.records(); ++r) CHECK(store.indicator(r, 0));
  }
  SUBCASE("no truncated studies: ratio 0") {
    PvalueTable table;
    table.studies = 2;
    table.feature_ids = {1, 2};
    table.values = {0.1, 0.2, 0.3, 0.4};
    const auto [store, summary] = truncate_matrix(table, {std::nullopt, std::nullopt});
    CHECK(summary.ratio == 0.0);
    CHECK(summary.compressed);
  }
  SUBCASE("threshold outside (0,1) rejected") {
    PvalueTable table;
    table.studies = 1;
    table.feature_ids = {1};
    table.values = {0.5};
    CHECK_THROWS_AS(truncate_matrix(table, {1.5}), std::invalid_argument);
  }
}

TEST_CASE("csv ingestion") {
  const auto dir = temp_dir();
  const auto csv = dir / "panel.csv";
  const auto schema_path = dir / "panel.schema";
  write_text(csv,
             "feature,s1,s2,s3\n"
             "g1,0.5,1,0.2\n"
             "g2,0.01,0,0.9\n");
  write_text(schema_path,
             "study.s1 = observed\n"
             "study.s2 = censored 0.05\n"
             "study.s3 = observed\n");
  const auto schema = parse_ingest_schema(schema_path);
  const auto matrix = ingest_csv(csv, schema);
  REQUIRE(matrix.rows() == 2);
  CHECK(matrix.schema().k1() == 2);
  CHECK(matrix.schema().k2() == 1);
  CHECK(matrix.feature_ids()[0] == "g1");
  const auto p0 = matrix.panel(0);
  CHECK(p0.studies[0].pvalue() == 0.5);
  CHECK(p0.studies[1].significant());
  CHECK(p0.studies[2].pvalue() == 0.2);

  SUBCASE("bad indicator names row and column") {
    write_text(csv, "feature,s1,s2,s3\ng1,0.5,2,0.2\n");
    CHECK_THROWS_WITH_AS(ingest_csv(csv, schema), doctest::Contains("s2"),
                         std::runtime_error);
  }
  SUBCASE("out-of-range p-value rejected with coordinates") {
    write_text(csv, "feature,s1,s2,s3\ng1,0.5,1,1.5\n");
    CHECK_THROWS_WITH_AS(ingest_csv(csv, schema), doctest::Contains("row 2"),
                         std::runtime_error);
  }
  SUBCASE("non-numeric cell rejected") {
    write_text(csv, "feature,s1,s2,s3\ng1,oops,1,0.5\n");
    CHECK_THROWS_WITH_AS(ingest_csv(csv, schema), doctest::Contains("non-numeric"),
                         std::runtime_error);
  }
  SUBCASE("missing column rejected") {
    write_text(csv, "feature,s1,s3\ng1,0.5,0.5\n");
    CHECK_THROWS_WITH_AS(ingest_csv(csv, schema), doctest::Contains("s2"),
                         std::runtime_error);
  }
}

TEST_CASE("DE-list ingestion") {
  const auto dir = temp_dir();
  write_text(dir / "universe.txt", "g1\ng2\ng3\ng4\n# comment\n");
  write_text(dir / "hits_a.txt", "g2\ng4\n");
  write_text(dir / "hits_b.txt", "g1\n");
  write_text(dir / "lists.schema",
             "universe = universe.txt\n"
             "study.a = delist hits_a.txt 0.001\n"
             "study.b = delist hits_b.txt 0.05\n");
  const auto schema = parse_ingest_schema(dir / "lists.schema");
  const auto matrix = ingest_de_lists(schema);
  REQUIRE(matrix.rows() == 4);
  CHECK(matrix.schema().k1() == 0);
  CHECK(matrix.schema().k2() == 2);
  const auto p0 = matrix.panel(0);  // g1: not in a, in b
  CHECK(!p0.studies[0].significant());
  CHECK(p0.studies[1].significant());
  const auto p3 = matrix.panel(3);  // g4: in a, not in b
  CHECK(p3.studies[0].significant());
  CHECK(!p3.studies[1].significant());
}

TEST_CASE("store -> combine equals csv -> combine") {
  const auto dir = temp_dir();
  Rng rng(4242);
  const int rows = 200;
  PvalueTable table;
  table.studies = 4;
  for (int i = 0; i < rows; ++i) {
    table.feature_ids.push_back(i);
    for (int k = 0; k < 4; ++k) table.values.push_back(rng.uniform());
  }
  const std::vector<std::optional<double>> thresholds{std::nullopt, 0.05, std::nullopt,
                                                      0.01};
  const auto [store, summary] = truncate_matrix(table, thresholds);
  const auto store_path = dir / "full.tpv";
  write_store(store, store_path);
  const auto matrix_store = to_panel_matrix(read_store(store_path));

  // The same content as an evidence CSV: exact p-values for the observed
  // studies, indicators for the truncated ones.
  std::string text = "feature,s1,s2,s3,s4\n";
  for (int i = 0; i < rows; ++i) {
    char buf[128];
    std::snprintf(buf, sizeof(buf), "%d,%.17g,%d,%.17g,%d\n", i, table.at(i, 0),
                  table.at(i, 1) < 0.05 ? 1 : 0, table.at(i, 2),
                  table.at(i, 3) < 0.01 ? 1 : 0);
    text += buf;
  }
  const auto csv = dir / "evidence.csv";
  write_text(csv, text);
  write_text(dir / "full.schema",
             "study.s1 = observed\n"
             "study.s2 = censored 0.05\n"
             "study.s3 = observed\n"
             "study.s4 = censored 0.01\n");
  const auto matrix_csv =
      ingest_csv(csv, parse_ingest_schema(dir / "full.schema"));

  AnalysisOptions options;
  options.method = Method::multiple_impute;
  options.seed = 99;
  const auto res_store = meta_analyze_matrix(matrix_store, options);
  const auto res_csv = meta_analyze_matrix(matrix_csv, options);
  REQUIRE(res_store.size() == res_csv.size());
  for (std::size_t i = 0; i < res_store.size(); ++i) {
    CHECK(res_store[i].statistic == res_csv[i].statistic);
    CHECK(res_store[i].p_meta == res_csv[i].p_meta);
    CHECK(res_store[i].q_bh == res_csv[i].q_bh);
  }
}

TEST_CASE("config parsing") {
  const auto dir = temp_dir();
  SUBCASE("sim config") {
    write_text(dir / "study.cfg",
               "# a comment\n"
               "genes = 500\n"
               "studies = 6\n"
               "clusters = 10\n"
               "cluster_size = 5\n"
               "de_genes = 50\n"
               "censor = -,-,-,0.001,0.01,0.05\n"
               "replicates = 3\n"
               "seed = 77\n"
               "d_values = 10,20\n"
               "d_reference = 200\n");
    const auto cfg = parse_sim_config(dir / "study.cfg");
    CHECK(cfg.sim.genes == 500);
    CHECK(cfg.sim.studies == 6);
    CHECK(cfg.sim.replicates == 3);
    CHECK(cfg.sim.seed == 77);
    REQUIRE(cfg.sim.censor_pattern.size() == 6);
    CHECK(!cfg.sim.censor_pattern[0].has_value());
    CHECK(cfg.sim.censor_pattern[3] == 0.001);
    CHECK(cfg.d_values == std::vector<int>{10, 20});
    CHECK(cfg.d_reference == 200);
  }
  SUBCASE("censor list") {
    const auto pattern = parse_censor_list("-,0.01, 0.05 ,-");
    REQUIRE(pattern.size() == 4);
    CHECK(!pattern[0].has_value());
    CHECK(pattern[1] == 0.01);
    CHECK(pattern[2] == 0.05);
    CHECK(!pattern[3].has_value());
  }
  SUBCASE("schema errors") {
    write_text(dir / "bad1.schema", "study.a = censored\n");
    CHECK_THROWS_AS(parse_ingest_schema(dir / "bad1.schema"), std::runtime_error);
    write_text(dir / "bad2.schema", "study.a = wat 0.1\n");
    CHECK_THROWS_AS(parse_ingest_schema(dir / "bad2.schema"), std::runtime_error);
    write_text(dir / "bad3.schema", "mystery = 1\n");
    CHECK_THROWS_AS(parse_ingest_schema(dir / "bad3.schema"), std::runtime_error);
    write_text(dir / "bad4.schema", "study.a = censored 1.5\n");
    CHECK_THROWS_AS(parse_ingest_schema(dir / "bad4.schema"), std::runtime_error);
  }
  SUBCASE("sim config validation") {
    write_text(dir / "bad_sim.cfg", "genes = 10\nclusters = 100\ncluster_size = 20\n");
    CHECK_THROWS_AS(parse_sim_config(dir / "bad_sim.cfg"), std::invalid_argument);
  }
}
