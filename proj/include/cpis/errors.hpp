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

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cpis {

// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A value lies outside the operating domain (plaintext out of range,
// dimension mismatch, unexpected protocol message).
struct DomainError : Error {
  using Error::Error;
};

// Invalid run configuration (pad count out of range, fixture range beyond
// the safe magnitude, unusable modulus/scale combination).
struct ConfigError : Error {
  using Error::Error;
};

// A feature component does not fit the plaintext half-range. Carries the
// index of the offending component or record.
struct EncodeOverflowError : Error {
  EncodeOverflowError(const std::string& what, std::size_t offending_index)
      : Error(what), index(offending_index) {}
  std::size_t index;
};

// Prime search exhausted its attempt budget or the supplied parameters
// cannot form a valid key.
struct KeygenError : Error {
  using Error::Error;
};

// Ciphertext violates its invariants (out of range, shares a factor with
// the modulus, undecryptable).
struct MalformedCiphertextError : Error {
  using Error::Error;
};

// Authenticated decryption failed. Covers both tampered envelopes and a
// wrong key; the two are indistinguishable by construction.
struct AuthenticationError : Error {
  using Error::Error;
};

// A serialized payload is truncated, non-canonical, or inconsistent.
struct FormatError : Error {
  using Error::Error;
};

// Bad command-line or report-format request.
struct UsageError : Error {
  using Error::Error;
};

}  // namespace cpis
