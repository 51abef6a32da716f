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
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cpis/protocol.hpp"

// End-to-end experiment driver: deterministic fixtures, one session per
// scheme, and per-scheme cost rows. Everything except key generation (in
// production mode) and wall-clock timings is a pure function of the seed.
namespace cpis {

struct ExperimentConfig {
  std::string scheme = "all";  // "1", "2", "revised", or "all"
  std::uint32_t num_images = 100;
  std::uint32_t dim = 128;
  unsigned key_bits = 2048;
  std::uint64_t scale = 10'000;
  double threshold = 75.0;
  std::optional<std::uint32_t> pad_count;  // default: ceil(N/10)
  std::size_t image_bytes = 4096;
  std::uint64_t seed = 1;
  unsigned repeats = 3;
  // Draw the primes from the seed instead of OS entropy, for byte-exact
  // reproducibility.
  bool test_key = false;
  std::optional<std::string> features_csv;
};

// One line of the final report; columns in emit order.
struct ReportRow {
  std::string scheme;
  std::uint64_t pk_dec = 0;
  std::uint64_t sym_dec = 0;
  double client_ms = 0.0;
  double server_ms = 0.0;
  std::uint64_t bytes_up = 0;
  std::uint64_t bytes_down = 0;
  std::uint64_t matched = 0;  // |I|
  std::uint64_t padded = 0;   // |I'|

  bool operator==(const ReportRow&) const = default;
};

struct Fixture {
  std::vector<FeatureVector> features;
  std::vector<Bytes> images;
  FeatureVector query;
};

// Deterministic features uniform in [-value_range, value_range] and
// pseudo-images of seeded random bytes. The range must sit within the
// bound or the call fails before any crypto work.
Fixture generate_fixture(std::uint64_t seed, std::uint32_t n_images,
                         std::uint32_t dim, double value_range,
                         std::size_t image_bytes, const DistanceBound& bound);

// Everything one scheme produced during a run, for tests that need more
// than the report row.
struct SchemeRun {
  Scheme scheme;
  ReportRow row;
  UploadResult upload;
  QueryResult query;           // first repeat
  SessionTranscript transcript;
};

std::vector<SchemeRun> run_schemes(const ExperimentConfig& cfg);

// The report-facing wrapper around run_schemes.
std::vector<ReportRow> run_experiment(const ExperimentConfig& cfg);

// format is "table", "json", or "csv"; anything else raises UsageError,
// as does an empty row list.
std::string emit_report(const std::vector<ReportRow>& rows,
                        const std::string& format);

// Inverse of the json format, used for round-trip checks.
std::vector<ReportRow> parse_report_json(const std::string& text);

}  // namespace cpis
