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
#include <string>
#include <vector>

#include <gmpxx.h>

// Fixed-point embedding of real feature vectors into Z_n. Signed values use
// the centered-residue convention: the upper half of Z_n stands for the
// negatives. All functions here are pure; values may be shared freely.
namespace cpis {

using FeatureVector = std::vector<double>;

struct EncodedVector {
  std::vector<mpz_class> residues;  // each in [0, n)
  std::uint64_t scale = 1;          // fixed-point multiplier S
  mpz_class modulus;                // n

  std::size_t dim() const { return residues.size(); }

  bool operator==(const EncodedVector&) const = default;
};

// Worst-case room the plaintext space leaves for squared distances:
// components of magnitude at most max_component_magnitude keep every
// encoded squared distance strictly below n/2, so modular results equal
// integer results and the centered read-back is unambiguous.
struct DistanceBound {
  double max_component_magnitude = 0.0;      // M, in feature units
  mpz_class max_sq_distance_representable;   // floor((n-1)/2)
  std::uint64_t scale = 1;
  std::size_t dim = 0;
  mpz_class modulus;

  static DistanceBound for_parameters(const mpz_class& n, std::size_t t,
                                      std::uint64_t scale);

  // Exact integer check of 8 * t * round(v_j * S)^2 < n for every
  // component; no floating point is involved.
  bool admits(const FeatureVector& v) const;
};

// Largest component magnitude M with 4 * t * (S*M)^2 < n/2. Throws
// ConfigError when not even a single quantization step (1/S) is safe.
double max_safe_magnitude(const mpz_class& n, std::size_t t,
                          std::uint64_t scale);

// round(v * S) with ties away from zero, exact for any double.
mpz_class round_scaled(double v, std::uint64_t scale);

// residues[j] = round(v_j * S) mod n. Components whose scaled magnitude
// reaches n/2 cannot be represented and raise EncodeOverflowError naming
// the offending index. This is a representability check only; the
// distance-level overflow guard is DistanceBound.
EncodedVector encode_vector(const FeatureVector& v, std::uint64_t scale,
                            const mpz_class& n);

// z if z < n/2, else z - n.
mpz_class decode_centered(const mpz_class& z, const mpz_class& n);

// Componentwise centered decode of the residues (signed, still scaled).
std::vector<mpz_class> decode_components(const EncodedVector& v);

// Sum of squared componentwise differences over the reals.
double plain_sq_distance(const FeatureVector& f, const FeatureVector& q);

// Exact integer squared distance between two encodings of the same shape
// (same scale and modulus), computed over centered residues in Z, not mod n.
mpz_class encoded_sq_distance(const EncodedVector& f, const EncodedVector& q);

// CSV feature files: one row per image, t float columns, optional header,
// '.' decimal point regardless of locale.
std::vector<FeatureVector> load_features_csv(const std::string& path);

}  // namespace cpis
