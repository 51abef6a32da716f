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
#include "cpis/bytes.hpp"

#include "cpis/errors.hpp"

namespace cpis {

std::size_t byte_width(const mpz_class& v) {
  if (v == 0) return 1;
  return (mpz_sizeinbase(v.get_mpz_t(), 2) + 7) / 8;
}

Bytes to_be_bytes(const mpz_class& v) { return to_be_bytes(v, byte_width(v)); }

Bytes to_be_bytes(const mpz_class& v, std::size_t width) {
  if (v < 0) throw FormatError("negative value has no unsigned encoding");
  if (byte_width(v) > width) throw FormatError("value does not fit the fixed width");
  Bytes out(width, 0);
  std::size_t count = 0;
  if (v != 0) {
    mpz_export(out.data() + (width - byte_width(v)), &count, 1, 1, 0, 0,
               v.get_mpz_t());
  }
  return out;
}

mpz_class from_be_bytes(std::span<const std::uint8_t> data) {
  mpz_class out;
  if (!data.empty()) {
    mpz_import(out.get_mpz_t(), data.size(), 1, 1, 0, 0, data.data());
  }
  return out;
}

static const char kHexDigits[] = "0123456789abcdef";

std::string to_hex(std::span<const std::uint8_t> data) {
  std::string out;
  out.reserve(data.size() * 2);
  for (std::uint8_t b : data) {
    out.push_back(kHexDigits[b >> 4]);
    out.push_back(kHexDigits[b & 0xf]);
  }
  return out;
}

static int hex_nibble(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  throw FormatError("invalid hex digit");
}

Bytes from_hex(const std::string& hex) {
  if (hex.size() % 2 != 0) throw FormatError("odd-length hex string");
  Bytes out(hex.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = static_cast<std::uint8_t>((hex_nibble(hex[2 * i]) << 4) |
                                       hex_nibble(hex[2 * i + 1]));
  }
  return out;
}

void ByteWriter::u8(std::uint8_t v) { out_.push_back(v); }

void ByteWriter::u32(std::uint32_t v) {
  for (int shift = 24; shift >= 0; shift -= 8) {
    out_.push_back(static_cast<std::uint8_t>(v >> shift));
  }
}

void ByteWriter::u64(std::uint64_t v) {
  for (int shift = 56; shift >= 0; shift -= 8) {
    out_.push_back(static_cast<std::uint8_t>(v >> shift));
  }
}

void ByteWriter::raw(std::span<const std::uint8_t> data) {
  out_.insert(out_.end(), data.begin(), data.end());
}

void ByteWriter::blob(std::span<const std::uint8_t> data) {
  u32(static_cast<std::uint32_t>(data.size()));
  raw(data);
}

void ByteWriter::mpz(const mpz_class& v, std::size_t width) {
  raw(to_be_bytes(v, width));
}

std::uint8_t ByteReader::u8() {
  if (remaining() < 1) throw FormatError("truncated payload");
  return data_[pos_++];
}

std::uint32_t ByteReader::u32() {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v = (v << 8) | u8();
  return v;
}

std::uint64_t ByteReader::u64() {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v = (v << 8) | u8();
  return v;
}

std::span<const std::uint8_t> ByteReader::raw(std::size_t count) {
  if (remaining() < count) throw FormatError("truncated payload");
  auto out = data_.subspan(pos_, count);
  pos_ += count;
  return out;
}

Bytes ByteReader::blob() {
  std::uint32_t len = u32();
  auto span = raw(len);
  return Bytes(span.begin(), span.end());
}

mpz_class ByteReader::mpz(std::size_t width) { return from_be_bytes(raw(width)); }

void ByteReader::expect_end() const {
  if (remaining() != 0) throw FormatError("trailing bytes in payload");
}

}  // namespace cpis
