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
#include "cpis/bench.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "cpis/errors.hpp"

namespace cpis {

namespace {

constexpr double kFixtureValueRange = 8.0;

// Stream separation for the seeded sub-generators.
std::uint64_t subseed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t x = seed + 0x9E3779B97F4A7C15ull * (stream + 1);
  x ^= x >> 30;
  x *= 0xBF58476D1CE4E5B9ull;
  x ^= x >> 27;
  x *= 0x94D049BB133111EBull;
  x ^= x >> 31;
  return x;
}

double median(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  std::size_t n = values.size();
  if (n == 0) return 0.0;
  return n % 2 == 1 ? values[n / 2]
                    : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

void validate_config(const ExperimentConfig& cfg) {
  if (cfg.dim < 1) throw ConfigError("dimension must be at least 1");
  if (cfg.key_bits < 16) throw ConfigError("key size below 16 bits");
  if (cfg.scale < 1) throw ConfigError("scale must be positive");
  if (cfg.repeats < 1) throw ConfigError("repeats must be at least 1");
  if (cfg.pad_count && *cfg.pad_count > cfg.num_images) {
    throw ConfigError("pad count exceeds the number of images");
  }
  scheme_from_string(cfg.scheme == "all" ? "1" : cfg.scheme);
}

std::vector<Scheme> schemes_for(const std::string& id) {
  if (id == "all") {
    return {Scheme::scheme1, Scheme::scheme2, Scheme::revised};
  }
  return {scheme_from_string(id)};
}

}  // namespace

Fixture generate_fixture(std::uint64_t seed, std::uint32_t n_images,
                         std::uint32_t dim, double value_range,
                         std::size_t image_bytes, const DistanceBound& bound) {
  if (value_range < 0) throw ConfigError("value range must be non-negative");
  if (value_range > bound.max_component_magnitude) {
    throw ConfigError("value range exceeds the safe magnitude for this key");
  }
  RandomSource rng(subseed(seed, 0xF1));
  Fixture fx;
  fx.features.reserve(n_images);
  fx.images.reserve(n_images);
  for (std::uint32_t i = 0; i < n_images; ++i) {
    FeatureVector f(dim);
    for (std::uint32_t l = 0; l < dim; ++l) {
      f[l] = rng.real(-value_range, value_range);
    }
    fx.features.push_back(std::move(f));
    Bytes img(image_bytes);
    rng.fill(img);
    fx.images.push_back(std::move(img));
  }
  fx.query.resize(dim);
  for (std::uint32_t l = 0; l < dim; ++l) {
    fx.query[l] = rng.real(-value_range, value_range);
  }
  return fx;
}

std::vector<SchemeRun> run_schemes(const ExperimentConfig& cfg) {
  validate_config(cfg);

  RandomSource key_rng = cfg.test_key
                             ? RandomSource(subseed(cfg.seed, 0x5C))
                             : RandomSource::from_entropy();
  KeyPair kp = keygen(cfg.key_bits, key_rng);
  RandomSource sym_rng(subseed(cfg.seed, 0xA7));
  SymKey sym = SymKey::generate(sym_rng);

  // Fixture generation fails on an unsafe range before any crypto work.
  Fixture fx;
  if (cfg.features_csv) {
    fx.features = load_features_csv(*cfg.features_csv);
    if (fx.features.empty()) throw ConfigError("feature file holds no rows");
    // The file dimension wins over cfg.dim.
    DistanceBound bound = DistanceBound::for_parameters(
        kp.pk.n, fx.features[0].size(), cfg.scale);
    double max_mag = 0.0;
    for (const FeatureVector& f : fx.features) {
      if (f.size() != fx.features[0].size()) {
        throw ConfigError("feature file rows differ in dimension");
      }
      for (double c : f) max_mag = std::max(max_mag, std::abs(c));
      if (!bound.admits(f)) {
        throw ConfigError("feature file exceeds the safe magnitude");
      }
    }
    RandomSource img_rng(subseed(cfg.seed, 0xF1));
    for (std::size_t i = 0; i < fx.features.size(); ++i) {
      Bytes img(cfg.image_bytes);
      img_rng.fill(img);
      fx.images.push_back(std::move(img));
    }
    fx.query.resize(fx.features[0].size());
    for (double& c : fx.query) c = img_rng.real(-max_mag, max_mag);
    if (!bound.admits(fx.query)) {
      throw ConfigError("derived query exceeds the safe magnitude");
    }
  } else {
    DistanceBound bound =
        DistanceBound::for_parameters(kp.pk.n, cfg.dim, cfg.scale);
    fx = generate_fixture(cfg.seed, cfg.num_images, cfg.dim,
                          kFixtureValueRange, cfg.image_bytes, bound);
  }
  std::uint32_t n_images = static_cast<std::uint32_t>(fx.features.size());
  if (cfg.pad_count && *cfg.pad_count > n_images) {
    throw ConfigError("pad count exceeds the number of images");
  }

  std::vector<SchemeRun> runs;
  for (Scheme scheme : schemes_for(cfg.scheme)) {
    Session::Options opts;
    opts.scale = cfg.scale;
    std::uint64_t tag = static_cast<std::uint64_t>(scheme);
    opts.client_seed = subseed(cfg.seed, 0x10 + tag);
    opts.server_seed = subseed(cfg.seed, 0x20 + tag);
    Session session(scheme, kp, sym, opts);

    SchemeRun run;
    run.scheme = scheme;
    run.upload = session.upload(fx.features, fx.images);

    std::vector<double> client_times, server_times;
    bool first = true;
    for (unsigned rep = 0; rep < cfg.repeats; ++rep) {
      QueryResult qr = session.query(fx.query, cfg.threshold, cfg.pad_count);
      client_times.push_back(qr.client_ms);
      server_times.push_back(qr.server_ms);
      if (first) {
        run.query = std::move(qr);
        first = false;
      }
    }

    run.row.scheme = to_string(scheme);
    run.row.pk_dec = run.query.ledger.client.pk_decrypts;
    run.row.sym_dec = run.query.ledger.client.sym_decrypts;
    run.row.client_ms = median(client_times);
    run.row.server_ms = median(server_times);
    run.row.bytes_up = run.query.ledger.client.bytes_sent;
    run.row.bytes_down = run.query.ledger.client.bytes_received;
    run.row.matched = run.query.sets.matched.size();
    run.row.padded = run.query.sets.padded.size();
    run.transcript = session.transcript();
    runs.push_back(std::move(run));
  }

  // All flows must agree on what matched.
  for (std::size_t i = 1; i < runs.size(); ++i) {
    if (runs[i].query.sets.matched != runs[0].query.sets.matched) {
      throw Error("schemes disagree on the matched set");
    }
  }
  return runs;
}

std::vector<ReportRow> run_experiment(const ExperimentConfig& cfg) {
  std::vector<ReportRow> rows;
  for (SchemeRun& run : run_schemes(cfg)) rows.push_back(std::move(run.row));
  return rows;
}

namespace {

constexpr const char* kColumns[] = {"scheme",    "pk_dec",   "sym_dec",
                                    "client_ms", "server_ms", "bytes_up",
                                    "bytes_down", "matched",  "padded"};

std::string format_ms(double v) {
  std::ostringstream os;
  os.precision(3);
  os << std::fixed << v;
  return os.str();
}

std::vector<std::string> row_cells(const ReportRow& r) {
  return {r.scheme,
          std::to_string(r.pk_dec),
          std::to_string(r.sym_dec),
          format_ms(r.client_ms),
          format_ms(r.server_ms),
          std::to_string(r.bytes_up),
          std::to_string(r.bytes_down),
          std::to_string(r.matched),
          std::to_string(r.padded)};
}

nlohmann::json row_json(const ReportRow& r) {
  return {{"scheme", r.scheme},
          {"pk_dec", r.pk_dec},
          {"sym_dec", r.sym_dec},
          {"client_ms", r.client_ms},
          {"server_ms", r.server_ms},
          {"bytes_up", r.bytes_up},
          {"bytes_down", r.bytes_down},
          {"matched", r.matched},
          {"padded", r.padded}};
}

}  // namespace

std::string emit_report(const std::vector<ReportRow>& rows,
                        const std::string& format) {
  if (rows.empty()) throw UsageError("nothing to report");
  constexpr std::size_t kColumnCount = std::size(kColumns);

  if (format == "csv") {
    std::string out;
    for (std::size_t c = 0; c < kColumnCount; ++c) {
      out += kColumns[c];
      out += c + 1 < kColumnCount ? ',' : '\n';
    }
    for (const ReportRow& r : rows) {
      auto cells = row_cells(r);
      for (std::size_t c = 0; c < kColumnCount; ++c) {
        out += cells[c];
        out += c + 1 < kColumnCount ? ',' : '\n';
      }
    }
    return out;
  }

  if (format == "json") {
    nlohmann::json arr = nlohmann::json::array();
    for (const ReportRow& r : rows) arr.push_back(row_json(r));
    return arr.dump(2) + "\n";
  }

  if (format == "table") {
    std::vector<std::vector<std::string>> grid;
    grid.emplace_back(kColumns, kColumns + kColumnCount);
    for (const ReportRow& r : rows) grid.push_back(row_cells(r));
    std::vector<std::size_t> widths(kColumnCount, 0);
    for (const auto& row : grid) {
      for (std::size_t c = 0; c < kColumnCount; ++c) {
        widths[c] = std::max(widths[c], row[c].size());
      }
    }
    std::string out;
    for (const auto& row : grid) {
      for (std::size_t c = 0; c < kColumnCount; ++c) {
        out += row[c];
        if (c + 1 < kColumnCount) {
          out.append(widths[c] - row[c].size() + 2, ' ');
        }
      }
      out += '\n';
    }
    return out;
  }

  throw UsageError("unknown report format: " + format);
}

std::vector<ReportRow> parse_report_json(const std::string& text) {
  nlohmann::json arr = nlohmann::json::parse(text);
  std::vector<ReportRow> rows;
  for (const nlohmann::json& j : arr) {
    ReportRow r;
    r.scheme = j.at("scheme").get<std::string>();
    r.pk_dec = j.at("pk_dec").get<std::uint64_t>();
    r.sym_dec = j.at("sym_dec").get<std::uint64_t>();
    r.client_ms = j.at("client_ms").get<double>();
    r.server_ms = j.at("server_ms").get<double>();
    r.bytes_up = j.at("bytes_up").get<std::uint64_t>();
    r.bytes_down = j.at("bytes_down").get<std::uint64_t>();
    r.matched = j.at("matched").get<std::uint64_t>();
    r.padded = j.at("padded").get<std::uint64_t>();
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace cpis
