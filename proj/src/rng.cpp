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
#include "cpis/rng.hpp"

#include <random>

#include "cpis/errors.hpp"

namespace cpis {

struct RandomSource::Impl {
  gmp_randstate_t state;
  std::mt19937_64 engine;

  explicit Impl(std::uint64_t seed) : engine(seed) {
    gmp_randinit_mt(state);
    gmp_randseed_ui(state, seed);
  }
  ~Impl() { gmp_randclear(state); }
};

RandomSource::RandomSource(std::uint64_t seed)
    : impl_(std::make_unique<Impl>(seed)) {}

RandomSource RandomSource::from_entropy() {
  std::random_device dev;
  std::uint64_t seed = (static_cast<std::uint64_t>(dev()) << 32) ^ dev();
  return RandomSource(seed);
}

RandomSource::RandomSource(RandomSource&&) noexcept = default;
RandomSource& RandomSource::operator=(RandomSource&&) noexcept = default;
RandomSource::~RandomSource() = default;

mpz_class RandomSource::below(const mpz_class& bound) {
  if (bound <= 0) throw DomainError("random bound must be positive");
  mpz_class out;
  mpz_urandomm(out.get_mpz_t(), impl_->state, bound.get_mpz_t());
  return out;
}

mpz_class RandomSource::bits(unsigned bit_count) {
  mpz_class out;
  mpz_urandomb(out.get_mpz_t(), impl_->state, bit_count);
  return out;
}

std::uint64_t RandomSource::next_u64() { return impl_->engine(); }

std::uint64_t RandomSource::u64(std::uint64_t lo, std::uint64_t hi) {
  if (lo > hi) throw DomainError("empty integer range");
  std::uint64_t span = hi - lo;
  if (span == UINT64_MAX) return next_u64();
  std::uint64_t range = span + 1;
  // Rejection sampling keeps the draw exactly uniform.
  std::uint64_t limit = UINT64_MAX - UINT64_MAX % range;
  std::uint64_t x;
  do {
    x = next_u64();
  } while (x >= limit);
  return lo + x % range;
}

double RandomSource::real(double lo, double hi) {
  double unit = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  return lo + unit * (hi - lo);
}

void RandomSource::fill(std::span<std::uint8_t> out) {
  std::size_t i = 0;
  while (i < out.size()) {
    std::uint64_t word = next_u64();
    for (int b = 0; b < 8 && i < out.size(); ++b, ++i) {
      out[i] = static_cast<std::uint8_t>(word >> (8 * b));
    }
  }
}

}  // namespace cpis
