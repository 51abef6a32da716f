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

#include <gmpxx.h>

#include "cpis/bytes.hpp"
#include "cpis/rng.hpp"

// Paillier cryptosystem over Z_n with ciphertexts in Z*_{n^2}.
// Multiplying ciphertexts adds plaintexts; exponentiation scales them.
// Keys and ciphertexts are immutable values and safe to share across
// threads; the RandomSource arguments are the only stateful inputs.
namespace cpis {

struct PublicKey {
  mpz_class n;     // RSA modulus, product of two distinct odd primes
  mpz_class n_sq;  // n^2
  mpz_class g;     // element of Z*_{n^2} whose order is divisible by n

  // Serialization width for Z_n values (n has a fixed bit length, so this
  // is stable per key size).
  std::size_t n_bytes() const { return byte_width(n); }
  // Width for Z_{n^2} values, used for ciphertexts on the wire.
  std::size_t ct_bytes() const { return byte_width(n_sq); }

  Bytes to_bytes() const;
  static PublicKey from_bytes(std::span<const std::uint8_t> data);
};

struct SecretKey {
  mpz_class lambda;  // lcm(p-1, q-1), the Carmichael value of n
  mpz_class mu;      // inverse of L(g^lambda mod n^2) mod n
  mpz_class p;       // prime factors, retained for test oracles and the
  mpz_class q;       // CRT decryption path

  // Per-factor decryption constants, fixed at keygen.
  struct CrtParams {
    mpz_class p_sq;
    mpz_class q_sq;
    mpz_class hp;             // inverse of L_p(g^{p-1} mod p^2) mod p
    mpz_class hq;             // inverse of L_q(g^{q-1} mod q^2) mod q
    mpz_class p_inv_mod_q;    // Garner coefficient for recombination mod n
    mpz_class q_sq_inv_p_sq;  // Garner coefficient for recombination mod n^2
  };
  CrtParams crt;

  Bytes to_bytes() const;
  // Rebuilds the CRT constants, which depend on the public g.
  static SecretKey from_bytes(std::span<const std::uint8_t> data,
                              const PublicKey& pk);
};

struct KeyPair {
  PublicKey pk;
  SecretKey sk;
};

struct Ciphertext {
  mpz_class value;  // element of Z*_{n^2}

  bool operator==(const Ciphertext&) const = default;

  Bytes to_bytes(const PublicKey& pk) const;
  static Ciphertext from_bytes(std::span<const std::uint8_t> data);
};

// Generates a fresh key whose modulus has exactly bit_length bits
// (bit_length >= 16; use >= 1024 outside tests). g defaults to n+1, which
// keeps encryption to a single modular multiplication on top of r^n; a
// random g that fails the order condition is never emitted.
KeyPair keygen(unsigned bit_length, RandomSource& rng);

// Deterministic key construction from fixed primes, for reproducible test
// vectors. Validates primality, p != q, and the order condition on g.
KeyPair keygen_from_primes(const mpz_class& p, const mpz_class& q);
KeyPair keygen_from_primes(const mpz_class& p, const mpz_class& q,
                           const mpz_class& g);

// c = g^m * r^n mod n^2 with r drawn uniformly from Z*_n.
Ciphertext encrypt(const PublicKey& pk, const mpz_class& m, RandomSource& rng);

// Test hook: encryption with a caller-supplied r in Z*_n.
Ciphertext encrypt_with_nonce(const PublicKey& pk, const mpz_class& m,
                              const mpz_class& r);

// Same ciphertext distribution as encrypt(), but computes r^n by CRT using
// the key holder's factors. Roughly twice as fast at benchmark key sizes;
// only the party that owns the secret key can use it.
Ciphertext encrypt_with_sk(const KeyPair& kp, const mpz_class& m,
                           RandomSource& rng);

// m = L(c^lambda mod n^2) * mu mod n, evaluated per factor and recombined.
mpz_class decrypt(const PublicKey& pk, const SecretKey& sk,
                  const Ciphertext& c);

// Single-exponentiation evaluation of the same formula, kept as an
// independent route for conformance checks.
mpz_class decrypt_textbook(const PublicKey& pk, const SecretKey& sk,
                           const Ciphertext& c);

// Deliberately wrong variant that applies the final reduction mod n^2
// instead of mod n. Demonstrates why the reduction modulus matters; do not
// use for actual decryption.
mpz_class decrypt_mod_nsq(const PublicKey& pk, const SecretKey& sk,
                          const Ciphertext& c);

// Ciphertext product; decrypts to the plaintext sum mod n.
Ciphertext hom_add(const PublicKey& pk, const Ciphertext& a,
                   const Ciphertext& b);

// Ciphertext exponentiation; decrypts to k * m mod n. Negative k goes
// through the modular inverse of the ciphertext.
Ciphertext hom_scale(const PublicKey& pk, const Ciphertext& c,
                     const mpz_class& k);

}  // namespace cpis
