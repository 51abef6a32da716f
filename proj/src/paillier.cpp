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
#include "cpis/paillier.hpp"

#include "cpis/errors.hpp"

namespace cpis {

namespace {

// 40 Miller-Rabin rounds keep the per-candidate error below 2^-80.
constexpr int kPrimalityRounds = 40;
constexpr int kPrimeSearchBudget = 100000;

bool is_prime(const mpz_class& v) {
  return mpz_probab_prime_p(v.get_mpz_t(), kPrimalityRounds) != 0;
}

mpz_class powm(const mpz_class& base, const mpz_class& exp,
               const mpz_class& mod) {
  mpz_class out;
  mpz_powm(out.get_mpz_t(), base.get_mpz_t(), exp.get_mpz_t(),
           mod.get_mpz_t());
  return out;
}

// L(u) = (u - 1) / divisor, defined only when divisor | u - 1.
mpz_class l_function(const mpz_class& u, const mpz_class& divisor) {
  mpz_class out = u - 1;
  mpz_divexact(out.get_mpz_t(), out.get_mpz_t(), divisor.get_mpz_t());
  return out;
}

mpz_class invert_or_throw(const mpz_class& v, const mpz_class& mod,
                          const char* what) {
  mpz_class out;
  if (mpz_invert(out.get_mpz_t(), v.get_mpz_t(), mod.get_mpz_t()) == 0) {
    throw MalformedCiphertextError(what);
  }
  return out;
}

// Checks the order condition on g: L(g^lambda mod n^2) must be invertible
// mod n. Returns mu on success.
mpz_class validate_g(const mpz_class& n, const mpz_class& n_sq,
                     const mpz_class& g, const mpz_class& lambda) {
  if (g <= 0 || g >= n_sq) throw KeygenError("g out of range");
  mpz_class gcd_g;
  mpz_gcd(gcd_g.get_mpz_t(), g.get_mpz_t(), n_sq.get_mpz_t());
  if (gcd_g != 1) throw KeygenError("g is not invertible mod n^2");

  mpz_class u = powm(g, lambda, n_sq);
  if ((u - 1) % n != 0) throw KeygenError("g^lambda is not 1 mod n");
  mpz_class denom = l_function(u, n);
  mpz_class mu;
  if (mpz_invert(mu.get_mpz_t(), denom.get_mpz_t(), n.get_mpz_t()) == 0) {
    throw KeygenError("n does not divide the order of g");
  }
  return mu;
}

mpz_class invert_for_keygen(const mpz_class& v, const mpz_class& mod,
                            const char* what) {
  mpz_class out;
  if (mpz_invert(out.get_mpz_t(), v.get_mpz_t(), mod.get_mpz_t()) == 0) {
    throw KeygenError(what);
  }
  return out;
}

SecretKey::CrtParams make_crt_params(const mpz_class& p, const mpz_class& q,
                                     const mpz_class& g) {
  SecretKey::CrtParams crt;
  crt.p_sq = p * p;
  crt.q_sq = q * q;
  mpz_class up = powm(g % crt.p_sq, p - 1, crt.p_sq);
  mpz_class uq = powm(g % crt.q_sq, q - 1, crt.q_sq);
  if ((up - 1) % p != 0 || (uq - 1) % q != 0) {
    throw KeygenError("g is degenerate modulo a factor");
  }
  crt.hp = invert_for_keygen(l_function(up, p) % p, p,
                             "g is degenerate mod p^2");
  crt.hq = invert_for_keygen(l_function(uq, q) % q, q,
                             "g is degenerate mod q^2");
  crt.p_inv_mod_q = invert_for_keygen(p, q, "p not invertible mod q");
  crt.q_sq_inv_p_sq = invert_for_keygen(crt.q_sq % crt.p_sq, crt.p_sq,
                                        "factors not coprime");
  return crt;
}

KeyPair assemble_keypair(const mpz_class& p, const mpz_class& q,
                         const mpz_class& g) {
  KeyPair kp;
  kp.pk.n = p * q;
  kp.pk.n_sq = kp.pk.n * kp.pk.n;
  kp.pk.g = g;

  mpz_class lambda;
  mpz_lcm(lambda.get_mpz_t(), mpz_class(p - 1).get_mpz_t(),
          mpz_class(q - 1).get_mpz_t());
  kp.sk.lambda = lambda;
  kp.sk.mu = validate_g(kp.pk.n, kp.pk.n_sq, g, lambda);
  kp.sk.p = p;
  kp.sk.q = q;
  kp.sk.crt = make_crt_params(p, q, g);
  return kp;
}

mpz_class draw_prime(unsigned bit_count, RandomSource& rng, int& budget) {
  while (budget-- > 0) {
    mpz_class candidate = rng.bits(bit_count);
    // Force the top two bits so the product of two such primes keeps the
    // full modulus width, and force oddness.
    mpz_setbit(candidate.get_mpz_t(), bit_count - 1);
    mpz_setbit(candidate.get_mpz_t(), bit_count - 2);
    mpz_setbit(candidate.get_mpz_t(), 0);
    mpz_class prime;
    mpz_nextprime(prime.get_mpz_t(), candidate.get_mpz_t());
    if (mpz_sizeinbase(prime.get_mpz_t(), 2) != bit_count) continue;
    if (!is_prime(prime)) continue;
    return prime;
  }
  throw KeygenError("prime search exhausted its attempt budget");
}

void check_plaintext_range(const PublicKey& pk, const mpz_class& m) {
  if (m < 0 || m >= pk.n) throw DomainError("plaintext out of [0, n)");
}

void check_ciphertext(const PublicKey& pk, const Ciphertext& c) {
  if (c.value <= 0 || c.value >= pk.n_sq) {
    throw MalformedCiphertextError("ciphertext out of (0, n^2)");
  }
  mpz_class gcd_c;
  mpz_gcd(gcd_c.get_mpz_t(), c.value.get_mpz_t(), pk.n_sq.get_mpz_t());
  if (gcd_c != 1) {
    throw MalformedCiphertextError("ciphertext shares a factor with n");
  }
}

// g^m mod n^2; uses (1+n)^m = 1 + m*n mod n^2 when g is the default.
mpz_class g_to_m(const PublicKey& pk, const mpz_class& m) {
  if (pk.g == pk.n + 1) return (1 + m * pk.n) % pk.n_sq;
  return powm(pk.g, m, pk.n_sq);
}

mpz_class draw_unit(const PublicKey& pk, RandomSource& rng) {
  mpz_class r, gcd_r;
  do {
    r = rng.below(pk.n);
    mpz_gcd(gcd_r.get_mpz_t(), r.get_mpz_t(), pk.n.get_mpz_t());
  } while (r == 0 || gcd_r != 1);
  return r;
}

}  // namespace

KeyPair keygen(unsigned bit_length, RandomSource& rng) {
  if (bit_length < 16) throw KeygenError("modulus below 16 bits");
  int budget = kPrimeSearchBudget;
  unsigned p_bits = (bit_length + 1) / 2;
  unsigned q_bits = bit_length / 2;
  while (budget > 0) {
    mpz_class p = draw_prime(p_bits, rng, budget);
    mpz_class q = draw_prime(q_bits, rng, budget);
    if (p == q) continue;
    mpz_class n = p * q;
    if (mpz_sizeinbase(n.get_mpz_t(), 2) != bit_length) continue;
    try {
      return assemble_keypair(p, q, n + 1);
    } catch (const KeygenError&) {
      // p | q-1 or q | p-1 breaks the order condition; redraw.
      continue;
    }
  }
  throw KeygenError("prime search exhausted its attempt budget");
}

KeyPair keygen_from_primes(const mpz_class& p, const mpz_class& q) {
  return keygen_from_primes(p, q, p * q + 1);
}

KeyPair keygen_from_primes(const mpz_class& p, const mpz_class& q,
                           const mpz_class& g) {
  if (p == q) throw KeygenError("prime factors must be distinct");
  if (p < 3 || q < 3 || !is_prime(p) || !is_prime(q)) {
    throw KeygenError("factors must be odd primes");
  }
  return assemble_keypair(p, q, g);
}

Ciphertext encrypt(const PublicKey& pk, const mpz_class& m,
                   RandomSource& rng) {
  check_plaintext_range(pk, m);
  mpz_class r = draw_unit(pk, rng);
  return Ciphertext{g_to_m(pk, m) * powm(r, pk.n, pk.n_sq) % pk.n_sq};
}

Ciphertext encrypt_with_nonce(const PublicKey& pk, const mpz_class& m,
                              const mpz_class& r) {
  check_plaintext_range(pk, m);
  if (r <= 0 || r >= pk.n) throw DomainError("nonce out of (0, n)");
  mpz_class gcd_r;
  mpz_gcd(gcd_r.get_mpz_t(), r.get_mpz_t(), pk.n.get_mpz_t());
  if (gcd_r != 1) throw DomainError("nonce shares a factor with n");
  return Ciphertext{g_to_m(pk, m) * powm(r, pk.n, pk.n_sq) % pk.n_sq};
}

Ciphertext encrypt_with_sk(const KeyPair& kp, const mpz_class& m,
                           RandomSource& rng) {
  const PublicKey& pk = kp.pk;
  const SecretKey::CrtParams& crt = kp.sk.crt;
  check_plaintext_range(pk, m);
  mpz_class r = draw_unit(pk, rng);
  // r^n recombined from the halves mod p^2 and q^2.
  mpz_class rp = powm(r % crt.p_sq, pk.n, crt.p_sq);
  mpz_class rq = powm(r % crt.q_sq, pk.n, crt.q_sq);
  mpz_class diff = (rp - rq) % crt.p_sq;
  if (diff < 0) diff += crt.p_sq;
  mpz_class rn = rq + crt.q_sq * (diff * crt.q_sq_inv_p_sq % crt.p_sq);
  return Ciphertext{g_to_m(pk, m) * rn % pk.n_sq};
}

mpz_class decrypt(const PublicKey& pk, const SecretKey& sk,
                  const Ciphertext& c) {
  check_ciphertext(pk, c);
  const SecretKey::CrtParams& crt = sk.crt;

  mpz_class up = powm(c.value % crt.p_sq, sk.p - 1, crt.p_sq);
  mpz_class uq = powm(c.value % crt.q_sq, sk.q - 1, crt.q_sq);
  if ((up - 1) % sk.p != 0 || (uq - 1) % sk.q != 0) {
    throw MalformedCiphertextError("L undefined for this ciphertext");
  }
  mpz_class mp = l_function(up, sk.p) % sk.p * crt.hp % sk.p;
  mpz_class mq = l_function(uq, sk.q) % sk.q * crt.hq % sk.q;

  // Garner recombination of (mp mod p, mq mod q).
  mpz_class diff = (mq - mp) % sk.q;
  if (diff < 0) diff += sk.q;
  return mp + sk.p * (diff * crt.p_inv_mod_q % sk.q);
}

mpz_class decrypt_textbook(const PublicKey& pk, const SecretKey& sk,
                           const Ciphertext& c) {
  check_ciphertext(pk, c);
  mpz_class u = powm(c.value, sk.lambda, pk.n_sq);
  if ((u - 1) % pk.n != 0) {
    throw MalformedCiphertextError("L undefined for this ciphertext");
  }
  return l_function(u, pk.n) * sk.mu % pk.n;
}

mpz_class decrypt_mod_nsq(const PublicKey& pk, const SecretKey& sk,
                          const Ciphertext& c) {
  check_ciphertext(pk, c);
  mpz_class u = powm(c.value, sk.lambda, pk.n_sq);
  if ((u - 1) % pk.n != 0) {
    throw MalformedCiphertextError("L undefined for this ciphertext");
  }
  // Wrong on purpose: the product is reduced mod n^2, so anything at or
  // above n survives unreduced.
  return l_function(u, pk.n) * sk.mu % pk.n_sq;
}

Ciphertext hom_add(const PublicKey& pk, const Ciphertext& a,
                   const Ciphertext& b) {
  return Ciphertext{a.value * b.value % pk.n_sq};
}

Ciphertext hom_scale(const PublicKey& pk, const Ciphertext& c,
                     const mpz_class& k) {
  if (k >= 0) return Ciphertext{powm(c.value, k, pk.n_sq)};
  mpz_class inv = invert_or_throw(c.value, pk.n_sq,
                                  "ciphertext not invertible mod n^2");
  return Ciphertext{powm(inv, -k, pk.n_sq)};
}

Bytes PublicKey::to_bytes() const {
  ByteWriter w;
  w.blob(to_be_bytes(n));
  w.blob(to_be_bytes(g));
  return w.take();
}

PublicKey PublicKey::from_bytes(std::span<const std::uint8_t> data) {
  ByteReader r(data);
  PublicKey pk;
  pk.n = from_be_bytes(r.blob());
  pk.g = from_be_bytes(r.blob());
  r.expect_end();
  if (pk.n < 3) throw FormatError("modulus too small");
  pk.n_sq = pk.n * pk.n;
  mpz_class gcd_g;
  mpz_gcd(gcd_g.get_mpz_t(), pk.g.get_mpz_t(), pk.n_sq.get_mpz_t());
  if (pk.g <= 0 || pk.g >= pk.n_sq || gcd_g != 1) {
    throw FormatError("g is not a unit mod n^2");
  }
  return pk;
}

Bytes SecretKey::to_bytes() const {
  ByteWriter w;
  w.blob(to_be_bytes(lambda));
  w.blob(to_be_bytes(mu));
  w.blob(to_be_bytes(p));
  w.blob(to_be_bytes(q));
  return w.take();
}

SecretKey SecretKey::from_bytes(std::span<const std::uint8_t> data,
                                const PublicKey& pk) {
  ByteReader r(data);
  SecretKey sk;
  sk.lambda = from_be_bytes(r.blob());
  sk.mu = from_be_bytes(r.blob());
  sk.p = from_be_bytes(r.blob());
  sk.q = from_be_bytes(r.blob());
  r.expect_end();
  if (sk.p * sk.q != pk.n) throw FormatError("factors do not match modulus");
  sk.crt = make_crt_params(sk.p, sk.q, pk.g);
  return sk;
}

Bytes Ciphertext::to_bytes(const PublicKey& pk) const {
  ByteWriter w;
  w.blob(to_be_bytes(value, pk.ct_bytes()));
  return w.take();
}

Ciphertext Ciphertext::from_bytes(std::span<const std::uint8_t> data) {
  ByteReader r(data);
  Ciphertext c{from_be_bytes(r.blob())};
  r.expect_end();
  return c;
}

}  // namespace cpis
