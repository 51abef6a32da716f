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
#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "cpis/bench.hpp"
#include "cpis/errors.hpp"

// Exit codes: 0 success, 2 configuration or usage error, 1 runtime error.
int main(int argc, char** argv) {
  CLI::App app{
      "Benchmark for confidentiality-preserving image search: runs the two "
      "Paillier-based retrieval flows and the symmetric revision over a "
      "synthetic store and reports per-role operation counts, traffic and "
      "timings."};

  cpis::ExperimentConfig cfg;
  std::string format = "table";
  std::string features_csv;
  std::uint32_t pad_count = 0;
  bool pad_given = false;

  app.add_option("--scheme", cfg.scheme, "Flow to run: 1, 2, revised, or all")
      ->check(CLI::IsMember({"1", "2", "revised", "all"}))
      ->capture_default_str();
  app.add_option("--num-images", cfg.num_images, "Number of stored images N")
      ->capture_default_str();
  app.add_option("--dim", cfg.dim, "Feature dimension t")
      ->capture_default_str();
  app.add_option("--key-bits", cfg.key_bits, "Paillier modulus size in bits")
      ->capture_default_str();
  app.add_option("--scale", cfg.scale, "Fixed-point scale S")
      ->capture_default_str();
  app.add_option("--threshold", cfg.threshold,
                 "Match threshold on the L2 distance")
      ->capture_default_str();
  auto* pad_opt = app.add_option("--pad-count", pad_count,
                                 "Decoy indices per query (default ceil(N/10))");
  app.add_option("--image-bytes", cfg.image_bytes,
                 "Size of each synthetic image")
      ->capture_default_str();
  app.add_option("--seed", cfg.seed, "Deterministic run seed")
      ->capture_default_str();
  app.add_option("--repeats", cfg.repeats, "Timing repetitions per scheme")
      ->capture_default_str();
  app.add_option("--format", format, "Report format: table, json, or csv")
      ->check(CLI::IsMember({"table", "json", "csv"}))
      ->capture_default_str();
  app.add_option("--features", features_csv,
                 "CSV of feature vectors, one image per row (overrides the "
                 "generated fixture)");
  app.add_flag("--test-key", cfg.test_key,
               "Derive the key from the seed for reproducible runs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  pad_given = pad_opt->count() > 0;
  if (pad_given) cfg.pad_count = pad_count;
  if (!features_csv.empty()) cfg.features_csv = features_csv;

  try {
    std::vector<cpis::ReportRow> rows = cpis::run_experiment(cfg);
    std::fputs(cpis::emit_report(rows, format).c_str(), stdout);
    return 0;
  } catch (const cpis::ConfigError& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return 2;
  } catch (const cpis::UsageError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return 2;
  } catch (const cpis::EncodeOverflowError& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
