/*
 Copyright 2026 The cpis Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
 */
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "cpis/bench.hpp"
#include "cpis/errors.hpp"

using namespace cpis;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig cfg;
  cfg.scheme = "all";
  cfg.num_images = 10;
  cfg.dim = 4;
  cfg.key_bits = 64;
  cfg.scale = 100;
  cfg.threshold = 8.0;
  cfg.image_bytes = 64;
  cfg.seed = 42;
  cfg.repeats = 1;
  cfg.test_key = true;
  return cfg;
}

}  // namespace

TEST_CASE("fixtures are deterministic in the seed") {
  DistanceBound bound = DistanceBound::for_parameters(
      mpz_class("1000000000039"), 3, 10);
  Fixture a = generate_fixture(7, 4, 3, 5.0, 32, bound);
  Fixture b = generate_fixture(7, 4, 3, 5.0, 32, bound);
  CHECK(a.features == b.features);
  CHECK(a.images == b.images);
  CHECK(a.query == b.query);

  Fixture c = generate_fixture(8, 4, 3, 5.0, 32, bound);
  CHECK(a.features != c.features);
}

TEST_CASE("empty fixture") {
  DistanceBound bound = DistanceBound::for_parameters(
      mpz_class("1000000000039"), 3, 10);
  Fixture fx = generate_fixture(7, 0, 3, 5.0, 32, bound);
  CHECK(fx.features.empty());
  CHECK(fx.images.empty());
  CHECK(fx.query.size() == 3);
}

TEST_CASE("ranges beyond the safe magnitude are configuration errors") {
  DistanceBound bound = DistanceBound::for_parameters(mpz_class(1763), 1, 1);
  CHECK(bound.max_component_magnitude == doctest::Approx(std::sqrt(1763.0 / 8)));
  CHECK_THROWS_AS(generate_fixture(7, 2, 1, 15.0, 32, bound), ConfigError);
  CHECK_NOTHROW(generate_fixture(7, 2, 1, 14.0, 32, bound));
}

TEST_CASE("experiment rows satisfy the per-scheme cost formulas") {
  ExperimentConfig cfg = small_config();
  std::vector<SchemeRun> runs = run_schemes(cfg);
  REQUIRE(runs.size() == 3);

  const std::uint64_t n = cfg.num_images, t = cfg.dim;
  const std::uint64_t matched = runs[0].row.matched;

  CHECK(runs[0].row.scheme == "1");
  CHECK(runs[0].row.pk_dec == t * n);
  CHECK(runs[0].row.sym_dec == matched);
  CHECK(runs[0].upload.ledger.client.pk_encrypts == t * n);

  CHECK(runs[1].row.scheme == "2");
  CHECK(runs[1].row.pk_dec == n);
  CHECK(runs[1].row.sym_dec == matched);
  CHECK(runs[1].upload.ledger.client.pk_encrypts == t * n + n);
  CHECK(runs[1].query.ledger.server.hom_exps == n * t);
  CHECK(runs[1].query.ledger.server.hom_mults == 2 * n);

  CHECK(runs[2].row.scheme == "revised");
  CHECK(runs[2].row.pk_dec == 0);
  CHECK(runs[2].row.sym_dec == n + matched);
  CHECK(runs[2].upload.ledger.client.pk_encrypts == 0);
  CHECK(runs[2].upload.ledger.client.sym_encrypts == 2 * n);

  // No public-key machinery may appear on the server outside scheme 2.
  for (std::size_t i : {std::size_t(0), std::size_t(2)}) {
    CHECK(runs[i].query.ledger.server.hom_exps == 0);
    CHECK(runs[i].query.ledger.server.hom_mults == 0);
    CHECK(runs[i].query.ledger.server.pk_encrypts == 0);
  }

  // Default decoy count is ceil(N/10) = 1 for N = 10.
  CHECK(runs[1].query.sets.decoy.size() == 1);

  for (const SchemeRun& run : runs) {
    CHECK(run.query.sets.matched == runs[0].query.sets.matched);
    CHECK(run.query.images == runs[0].query.images);
  }
}

TEST_CASE("runs with equal seeds are identical apart from timing") {
  ExperimentConfig cfg = small_config();
  std::vector<SchemeRun> a = run_schemes(cfg);
  std::vector<SchemeRun> b = run_schemes(cfg);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].row.pk_dec == b[i].row.pk_dec);
    CHECK(a[i].row.sym_dec == b[i].row.sym_dec);
    CHECK(a[i].row.bytes_up == b[i].row.bytes_up);
    CHECK(a[i].row.bytes_down == b[i].row.bytes_down);
    CHECK(a[i].query.sets.matched == b[i].query.sets.matched);
    CHECK(a[i].query.sets.padded == b[i].query.sets.padded);
    CHECK(a[i].query.images == b[i].query.images);

    const auto& ta = a[i].transcript.entries();
    const auto& tb = b[i].transcript.entries();
    REQUIRE(ta.size() == tb.size());
    for (std::size_t j = 0; j < ta.size(); ++j) {
      CHECK(ta[j].direction == tb[j].direction);
      CHECK(ta[j].kind == tb[j].kind);
      CHECK(ta[j].payload_size == tb[j].payload_size);
    }
  }
}

TEST_CASE("cost formulas hold across a randomized sweep") {
  RandomSource rng(2024);
  for (int config = 0; config < 25; ++config) {
    ExperimentConfig cfg = small_config();
    cfg.num_images = static_cast<std::uint32_t>(rng.u64(1, 50));
    cfg.dim = static_cast<std::uint32_t>(rng.u64(1, 16));
    cfg.seed = rng.u64(0, UINT64_MAX);
    cfg.threshold = rng.real(0.0, 20.0);

    std::vector<SchemeRun> runs = run_schemes(cfg);
    const std::uint64_t n = cfg.num_images, t = cfg.dim;
    const std::uint64_t matched = runs[0].row.matched;
    CHECK(runs[0].row.pk_dec == t * n);
    CHECK(runs[0].row.sym_dec == matched);
    CHECK(runs[1].row.pk_dec == n);
    CHECK(runs[1].row.sym_dec == matched);
    CHECK(runs[2].row.pk_dec == 0);
    CHECK(runs[2].row.sym_dec == n + matched);
    CHECK(runs[1].row.matched == matched);
    CHECK(runs[2].row.matched == matched);
  }
}

TEST_CASE("invalid configurations are rejected up front") {
  ExperimentConfig cfg = small_config();
  cfg.dim = 0;
  CHECK_THROWS_AS(run_experiment(cfg), ConfigError);

  cfg = small_config();
  cfg.pad_count = 11;  // N = 10
  CHECK_THROWS_AS(run_experiment(cfg), ConfigError);

  cfg = small_config();
  cfg.scheme = "3";
  CHECK_THROWS_AS(run_experiment(cfg), UsageError);

  cfg = small_config();
  cfg.repeats = 0;
  CHECK_THROWS_AS(run_experiment(cfg), ConfigError);

  // A scale so large that the default range overflows the bound must fail
  // before any upload happens.
  cfg = small_config();
  cfg.key_bits = 16;
  cfg.scale = 10000;
  CHECK_THROWS_AS(run_experiment(cfg), ConfigError);
}

TEST_CASE("report rendering") {
  ReportRow row{"1", 80, 3, 12.5, 3.25, 1000, 2000, 3, 4};
  ReportRow row2{"revised", 0, 13, 0.5, 0.25, 10, 20, 3, 3};

  SUBCASE("csv has one header and one line per row with 9 fields") {
    std::string csv = emit_report({row}, "csv");
    std::istringstream lines(csv);
    std::string header, data, extra;
    REQUIRE(std::getline(lines, header));
    REQUIRE(std::getline(lines, data));
    CHECK_FALSE(std::getline(lines, extra));
    CHECK(header ==
          "scheme,pk_dec,sym_dec,client_ms,server_ms,bytes_up,bytes_down,"
          "matched,padded");
    CHECK(std::count(data.begin(), data.end(), ',') == 8);
    CHECK(data.rfind("1,80,3,", 0) == 0);
  }
  SUBCASE("json round-trips") {
    std::string json = emit_report({row, row2}, "json");
    std::vector<ReportRow> parsed = parse_report_json(json);
    REQUIRE(parsed.size() == 2);
    CHECK(parsed[0] == row);
    CHECK(parsed[1] == row2);
  }
  SUBCASE("table aligns header and cells") {
    std::string table = emit_report({row, row2}, "table");
    std::istringstream lines(table);
    std::string header, r1, r2;
    REQUIRE(std::getline(lines, header));
    REQUIRE(std::getline(lines, r1));
    REQUIRE(std::getline(lines, r2));
    CHECK(header.find("scheme") == 0);
    // Every column header starts at the same offset in each data line.
    for (const char* name : {"pk_dec", "sym_dec", "client_ms"}) {
      std::size_t pos = header.find(name);
      REQUIRE(pos != std::string::npos);
      CHECK(r1.size() >= pos);
      CHECK(r2.size() >= pos);
    }
  }
  SUBCASE("unknown formats and empty reports are usage errors") {
    CHECK_THROWS_AS(emit_report({row}, "yaml"), UsageError);
    CHECK_THROWS_AS(emit_report({}, "csv"), UsageError);
  }
}

TEST_CASE("feature CSV overrides the generated fixture") {
  std::string path = "/tmp/cpis_bench_features.csv";
  {
    std::ofstream out(path);
    out << "0.0,0.0\n3.0,4.0\n1.0,-1.0\n";
  }
  ExperimentConfig cfg = small_config();
  cfg.scheme = "revised";
  cfg.dim = 2;
  cfg.threshold = 5.0;
  cfg.features_csv = path;

  std::vector<SchemeRun> runs = run_schemes(cfg);
  REQUIRE(runs.size() == 1);
  CHECK(runs[0].row.sym_dec == 3 + runs[0].row.matched);
  CHECK(runs[0].upload.stored == 3);

  // The file dimension wins when it disagrees with the configured one.
  cfg.dim = 40;
  runs = run_schemes(cfg);
  CHECK(runs[0].upload.stored == 3);
  std::remove(path.c_str());
}
