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

#include <array>
#include <cstdint>

#include "cpis/bytes.hpp"
#include "cpis/encoding.hpp"
#include "cpis/rng.hpp"

// Authenticated symmetric encryption (AES-256-GCM) for image payloads and,
// in the revised scheme, feature payloads. Any bit flip in an envelope
// fails decryption. Per-operation cost does not depend on the Paillier key
// size.
namespace cpis {

constexpr std::size_t kSymKeyBytes = 32;
constexpr std::size_t kNonceBytes = 12;
constexpr std::size_t kTagBytes = 16;

struct SymKey {
  // Never serialized; stays with the client.
  std::array<std::uint8_t, kSymKeyBytes> key_bytes{};

  static SymKey generate(RandomSource& rng);
};

struct Envelope {
  std::array<std::uint8_t, kNonceBytes> nonce{};
  Bytes ciphertext_and_tag;  // ciphertext followed by the 16-byte tag

  // Wire format: nonce || ciphertext || tag.
  Bytes to_wire() const;
  static Envelope from_wire(std::span<const std::uint8_t> data);
  std::size_t wire_size() const { return kNonceBytes + ciphertext_and_tag.size(); }

  bool operator==(const Envelope&) const = default;
};

Envelope sym_encrypt(const SymKey& key, std::span<const std::uint8_t> plaintext,
                     RandomSource& rng);

// Throws AuthenticationError on any tamper or key mismatch.
Bytes sym_decrypt(const SymKey& key, const Envelope& envelope);

// Canonical byte serialization of an encoded feature vector:
//   u32 dimension | u64 scale | u32 modulus length | modulus |
//   dimension * fixed-width residues (big-endian).
// Bijective; total length = 16 + (dimension + 1) * byte_width(modulus).
Bytes encode_feature_payload(const EncodedVector& v);
EncodedVector decode_feature_payload(std::span<const std::uint8_t> data);

}  // namespace cpis
