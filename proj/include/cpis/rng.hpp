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
#include <memory>
#include <span>

#include <gmpxx.h>

namespace cpis {

// Deterministic randomness source. One instance per thread; nothing here is
// synchronized. Seeded construction gives a reproducible stream,
// from_entropy() seeds from the operating system.
class RandomSource {
 public:
  explicit RandomSource(std::uint64_t seed);
  static RandomSource from_entropy();

  RandomSource(RandomSource&&) noexcept;
  RandomSource& operator=(RandomSource&&) noexcept;
  RandomSource(const RandomSource&) = delete;
  RandomSource& operator=(const RandomSource&) = delete;
  ~RandomSource();

  // Uniform in [0, bound). bound must be positive.
  mpz_class below(const mpz_class& bound);

  // Uniform integer with up to bit_count bits.
  mpz_class bits(unsigned bit_count);

  // Uniform in [lo, hi], inclusive.
  std::uint64_t u64(std::uint64_t lo, std::uint64_t hi);

  // Uniform double in [lo, hi).
  double real(double lo, double hi);

  void fill(std::span<std::uint8_t> out);

  std::uint64_t next_u64();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace cpis
