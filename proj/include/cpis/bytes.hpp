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
#include <span>
#include <string>
#include <vector>

#include <gmpxx.h>

namespace cpis {

using Bytes = std::vector<std::uint8_t>;

// ceil(bits/8) with a 1-byte minimum so zero still occupies a byte.
std::size_t byte_width(const mpz_class& v);

// Big-endian magnitude encoding of a non-negative integer.
Bytes to_be_bytes(const mpz_class& v);
// Fixed-width variant, left padded with zeros. Throws FormatError when the
// value does not fit.
Bytes to_be_bytes(const mpz_class& v, std::size_t width);
mpz_class from_be_bytes(std::span<const std::uint8_t> data);

std::string to_hex(std::span<const std::uint8_t> data);
Bytes from_hex(const std::string& hex);

// Sequential big-endian writer for message payloads.
class ByteWriter {
 public:
  void u8(std::uint8_t v);
  void u32(std::uint32_t v);
  void u64(std::uint64_t v);
  void raw(std::span<const std::uint8_t> data);
  // Length-prefixed (u32) byte string.
  void blob(std::span<const std::uint8_t> data);
  // Fixed-width big-endian integer.
  void mpz(const mpz_class& v, std::size_t width);

  Bytes take() { return std::move(out_); }
  std::size_t size() const { return out_.size(); }

 private:
  Bytes out_;
};

// Bounds-checked reader; every underrun throws FormatError.
class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> data) : data_(data) {}

  std::uint8_t u8();
  std::uint32_t u32();
  std::uint64_t u64();
  std::span<const std::uint8_t> raw(std::size_t count);
  Bytes blob();
  mpz_class mpz(std::size_t width);

  std::size_t remaining() const { return data_.size() - pos_; }
  // Throws FormatError unless the payload was consumed exactly.
  void expect_end() const;

 private:
  std::span<const std::uint8_t> data_;
  std::size_t pos_ = 0;
};

}  // namespace cpis
