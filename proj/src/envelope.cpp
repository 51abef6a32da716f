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
#include "cpis/envelope.hpp"

#include <memory>

#include <openssl/evp.h>

#include "cpis/errors.hpp"

namespace cpis {

namespace {

struct CtxDeleter {
  void operator()(EVP_CIPHER_CTX* ctx) const { EVP_CIPHER_CTX_free(ctx); }
};
using CipherCtx = std::unique_ptr<EVP_CIPHER_CTX, CtxDeleter>;

CipherCtx new_ctx() {
  CipherCtx ctx(EVP_CIPHER_CTX_new());
  if (!ctx) throw Error("cipher context allocation failed");
  return ctx;
}

}  // namespace

SymKey SymKey::generate(RandomSource& rng) {
  SymKey key;
  rng.fill(key.key_bytes);
  return key;
}

Bytes Envelope::to_wire() const {
  Bytes out;
  out.reserve(wire_size());
  out.insert(out.end(), nonce.begin(), nonce.end());
  out.insert(out.end(), ciphertext_and_tag.begin(), ciphertext_and_tag.end());
  return out;
}

Envelope Envelope::from_wire(std::span<const std::uint8_t> data) {
  if (data.size() < kNonceBytes + kTagBytes) {
    throw FormatError("envelope shorter than nonce plus tag");
  }
  Envelope e;
  std::copy(data.begin(), data.begin() + kNonceBytes, e.nonce.begin());
  e.ciphertext_and_tag.assign(data.begin() + kNonceBytes, data.end());
  return e;
}

Envelope sym_encrypt(const SymKey& key, std::span<const std::uint8_t> plaintext,
                     RandomSource& rng) {
  Envelope e;
  rng.fill(e.nonce);

  CipherCtx ctx = new_ctx();
  if (EVP_EncryptInit_ex(ctx.get(), EVP_aes_256_gcm(), nullptr,
                         key.key_bytes.data(), e.nonce.data()) != 1) {
    throw Error("aead encrypt init failed");
  }
  e.ciphertext_and_tag.resize(plaintext.size() + kTagBytes);
  int len = 0;
  if (!plaintext.empty()) {
    if (EVP_EncryptUpdate(ctx.get(), e.ciphertext_and_tag.data(), &len,
                          plaintext.data(),
                          static_cast<int>(plaintext.size())) != 1) {
      throw Error("aead encrypt failed");
    }
  }
  int fin = 0;
  if (EVP_EncryptFinal_ex(ctx.get(), e.ciphertext_and_tag.data() + len,
                          &fin) != 1) {
    throw Error("aead encrypt finalization failed");
  }
  if (EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_GET_TAG, kTagBytes,
                          e.ciphertext_and_tag.data() + len + fin) != 1) {
    throw Error("aead tag extraction failed");
  }
  return e;
}

Bytes sym_decrypt(const SymKey& key, const Envelope& envelope) {
  if (envelope.ciphertext_and_tag.size() < kTagBytes) {
    throw FormatError("envelope shorter than its tag");
  }
  std::size_t ct_len = envelope.ciphertext_and_tag.size() - kTagBytes;

  CipherCtx ctx = new_ctx();
  if (EVP_DecryptInit_ex(ctx.get(), EVP_aes_256_gcm(), nullptr,
                         key.key_bytes.data(), envelope.nonce.data()) != 1) {
    throw Error("aead decrypt init failed");
  }
  Bytes out(ct_len);
  int len = 0;
  if (ct_len > 0) {
    if (EVP_DecryptUpdate(ctx.get(), out.data(), &len,
                          envelope.ciphertext_and_tag.data(),
                          static_cast<int>(ct_len)) != 1) {
      throw AuthenticationError("envelope failed authentication");
    }
  }
  // GCM verifies the tag at finalization time.
  Bytes tag(envelope.ciphertext_and_tag.end() - kTagBytes,
            envelope.ciphertext_and_tag.end());
  if (EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_SET_TAG, kTagBytes,
                          tag.data()) != 1) {
    throw Error("aead tag injection failed");
  }
  int fin = 0;
  if (EVP_DecryptFinal_ex(ctx.get(), out.data() + len, &fin) != 1) {
    throw AuthenticationError("envelope failed authentication");
  }
  out.resize(static_cast<std::size_t>(len) + fin);
  return out;
}

Bytes encode_feature_payload(const EncodedVector& v) {
  if (v.dim() < 1) throw FormatError("encoded vector must have dimension >= 1");
  if (v.modulus < 3) throw FormatError("encoded vector has no modulus");
  std::size_t width = byte_width(v.modulus);
  ByteWriter w;
  w.u32(static_cast<std::uint32_t>(v.dim()));
  w.u64(v.scale);
  w.u32(static_cast<std::uint32_t>(width));
  w.mpz(v.modulus, width);
  for (const mpz_class& residue : v.residues) {
    if (residue < 0 || residue >= v.modulus) {
      throw FormatError("residue out of [0, n)");
    }
    w.mpz(residue, width);
  }
  return w.take();
}

EncodedVector decode_feature_payload(std::span<const std::uint8_t> data) {
  ByteReader r(data);
  std::uint32_t dim = r.u32();
  if (dim < 1) throw FormatError("payload dimension must be at least 1");
  EncodedVector v;
  v.scale = r.u64();
  if (v.scale < 1) throw FormatError("payload scale must be positive");
  std::uint32_t width = r.u32();
  if (width < 1) throw FormatError("payload modulus width must be positive");
  v.modulus = r.mpz(width);
  if (v.modulus < 3) throw FormatError("payload modulus too small");
  if (byte_width(v.modulus) != width) {
    throw FormatError("non-canonical modulus width");
  }
  v.residues.reserve(dim);
  for (std::uint32_t j = 0; j < dim; ++j) {
    mpz_class residue = r.mpz(width);
    if (residue >= v.modulus) throw FormatError("residue out of [0, n)");
    v.residues.push_back(residue);
  }
  r.expect_end();
  return v;
}

}  // namespace cpis
