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
#include "cpis/encoding.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>

#include "cpis/errors.hpp"

namespace cpis {

namespace {

void check_parameters(const mpz_class& n, std::size_t t, std::uint64_t scale) {
  if (n < 3) throw ConfigError("modulus too small");
  if (t < 1) throw DomainError("feature dimension must be at least 1");
  if (scale < 1) throw ConfigError("scale must be positive");
}

void check_finite(const FeatureVector& v) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i])) {
      throw DomainError("feature component " + std::to_string(i) +
                        " is not finite");
    }
  }
}

}  // namespace

mpz_class round_scaled(double v, std::uint64_t scale) {
  // 192-bit floats hold the 53-bit double mantissa times a 64-bit scale
  // exactly, so the rounding below is exact for any input.
  mpf_class x(v, 192);
  mpf_class s(0.0, 192);
  mpz_class scale_z(static_cast<unsigned long>(scale));
  mpf_set_z(s.get_mpf_t(), scale_z.get_mpz_t());
  x *= s;
  // Ties round away from zero; truncation toward zero after the half-step
  // shift realizes that in both directions.
  mpf_class shifted(0.0, 192);
  if (x >= 0) {
    shifted = x + 0.5;
  } else {
    shifted = x - 0.5;
  }
  mpz_class out;
  mpz_set_f(out.get_mpz_t(), shifted.get_mpf_t());
  return out;
}

double max_safe_magnitude(const mpz_class& n, std::size_t t,
                          std::uint64_t scale) {
  check_parameters(n, t, scale);
  // M = sqrt(n / (8t)) / S. A magnitude of one quantization step (1/S)
  // must be admissible, which needs n > 8t.
  if (n <= 8 * mpz_class(static_cast<unsigned long>(t))) {
    throw ConfigError("modulus leaves no safe magnitude at this dimension");
  }
  mpf_class nf(0.0, 256);
  mpf_set_z(nf.get_mpf_t(), n.get_mpz_t());
  mpf_class m = sqrt(nf / (8.0 * static_cast<double>(t))) /
                static_cast<double>(scale);
  double out = m.get_d();
  if (!std::isfinite(out)) out = std::numeric_limits<double>::max();
  return out;
}

DistanceBound DistanceBound::for_parameters(const mpz_class& n, std::size_t t,
                                            std::uint64_t scale) {
  DistanceBound b;
  b.max_component_magnitude = max_safe_magnitude(n, t, scale);
  b.max_sq_distance_representable = (n - 1) / 2;
  b.scale = scale;
  b.dim = t;
  b.modulus = n;
  return b;
}

bool DistanceBound::admits(const FeatureVector& v) const {
  if (v.size() != dim) return false;
  check_finite(v);
  // Worst case pairs each component against one of opposite sign and equal
  // magnitude, hence the factor 4 = 2^2 on top of t terms: the squared
  // distance must stay under n/2, i.e. 8 * t * x^2 < n.
  mpz_class t_z(static_cast<unsigned long>(dim));
  for (double c : v) {
    mpz_class x = round_scaled(c, scale);
    if (8 * t_z * x * x >= modulus) return false;
  }
  return true;
}

EncodedVector encode_vector(const FeatureVector& v, std::uint64_t scale,
                            const mpz_class& n) {
  check_parameters(n, v.size(), scale);
  check_finite(v);
  EncodedVector out;
  out.scale = scale;
  out.modulus = n;
  out.residues.reserve(v.size());
  for (std::size_t j = 0; j < v.size(); ++j) {
    mpz_class x = round_scaled(v[j], scale);
    if (2 * abs(x) >= n) {
      throw EncodeOverflowError(
          "component " + std::to_string(j) + " exceeds the half-range", j);
    }
    out.residues.push_back(x >= 0 ? x : n + x);
  }
  return out;
}

mpz_class decode_centered(const mpz_class& z, const mpz_class& n) {
  if (z < 0 || z >= n) throw DomainError("residue out of [0, n)");
  return 2 * z < n ? z : z - n;
}

std::vector<mpz_class> decode_components(const EncodedVector& v) {
  std::vector<mpz_class> out;
  out.reserve(v.dim());
  for (const mpz_class& z : v.residues) {
    out.push_back(decode_centered(z, v.modulus));
  }
  return out;
}

double plain_sq_distance(const FeatureVector& f, const FeatureVector& q) {
  if (f.size() != q.size()) throw DomainError("dimension mismatch");
  if (f.empty()) throw DomainError("feature dimension must be at least 1");
  check_finite(f);
  check_finite(q);
  double sum = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j) {
    double d = f[j] - q[j];
    sum += d * d;
  }
  return sum;
}

mpz_class encoded_sq_distance(const EncodedVector& f, const EncodedVector& q) {
  if (f.dim() != q.dim()) throw DomainError("dimension mismatch");
  if (f.scale != q.scale || f.modulus != q.modulus) {
    throw DomainError("encodings use different parameters");
  }
  mpz_class sum = 0;
  for (std::size_t j = 0; j < f.dim(); ++j) {
    mpz_class d = decode_centered(f.residues[j], f.modulus) -
                  decode_centered(q.residues[j], q.modulus);
    sum += d * d;
  }
  return sum;
}

std::vector<FeatureVector> load_features_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open feature file: " + path);

  std::vector<FeatureVector> rows;
  std::string line;
  bool first_line = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;

    FeatureVector row;
    bool parse_failed = false;
    std::size_t start = 0;
    while (start <= line.size()) {
      std::size_t comma = line.find(',', start);
      std::size_t end = comma == std::string::npos ? line.size() : comma;
      std::size_t a = start, b = end;
      while (a < b && (line[a] == ' ' || line[a] == '\t')) ++a;
      while (b > a && (line[b - 1] == ' ' || line[b - 1] == '\t')) --b;
      double value = 0.0;
      auto [ptr, ec] = std::from_chars(line.data() + a, line.data() + b, value);
      if (ec != std::errc() || ptr != line.data() + b || a == b) {
        parse_failed = true;
        break;
      }
      if (!std::isfinite(value)) {
        throw FormatError("non-finite feature value in " + path);
      }
      row.push_back(value);
      if (comma == std::string::npos) break;
      start = comma + 1;
    }

    if (parse_failed) {
      // A non-numeric first line is an optional header.
      if (first_line) {
        first_line = false;
        continue;
      }
      throw FormatError("malformed CSV row: " + line);
    }
    first_line = false;
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw FormatError("inconsistent column count in " + path);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace cpis
