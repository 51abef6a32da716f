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
#include "cpis/protocol.hpp"

#include <algorithm>
#include <set>

#include <json.hpp>

#include "cpis/errors.hpp"

namespace cpis {

const char* to_string(Scheme s) {
  switch (s) {
    case Scheme::scheme1: return "1";
    case Scheme::scheme2: return "2";
    case Scheme::revised: return "revised";
  }
  return "?";
}

Scheme scheme_from_string(const std::string& s) {
  if (s == "1") return Scheme::scheme1;
  if (s == "2") return Scheme::scheme2;
  if (s == "revised") return Scheme::revised;
  throw UsageError("unknown scheme: " + s);
}

const char* to_string(MessageKind kind) {
  switch (kind) {
    case MessageKind::upload_records: return "upload_records";
    case MessageKind::feature_request: return "feature_request";
    case MessageKind::encrypted_features: return "encrypted_features";
    case MessageKind::query_vector: return "query_vector";
    case MessageKind::encrypted_distances: return "encrypted_distances";
    case MessageKind::feature_envelopes: return "feature_envelopes";
    case MessageKind::match_indices: return "match_indices";
    case MessageKind::images: return "images";
  }
  return "?";
}

const char* to_string(Direction d) {
  return d == Direction::client_to_server ? "client_to_server"
                                          : "server_to_client";
}

std::string SessionTranscript::to_json_lines() const {
  std::string out;
  for (const TranscriptEntry& e : entries_) {
    nlohmann::json line = {{"direction", to_string(e.direction)},
                           {"kind", to_string(e.kind)},
                           {"payload_size", e.payload_size},
                           {"t_ns", e.t_ns}};
    out += line.dump();
    out += '\n';
  }
  return out;
}

MatchSets pad_index_set(const std::vector<std::uint32_t>& matched,
                        std::uint32_t n_records, std::uint32_t pad_count,
                        RandomSource& rng) {
  if (pad_count > n_records) {
    throw ConfigError("pad count exceeds the number of records");
  }
  MatchSets sets;
  sets.matched = matched;
  std::sort(sets.matched.begin(), sets.matched.end());
  sets.matched.erase(std::unique(sets.matched.begin(), sets.matched.end()),
                     sets.matched.end());
  for (std::uint32_t i : sets.matched) {
    if (i < 1 || i > n_records) throw DomainError("matched index out of range");
  }

  // Partial Fisher-Yates: the first pad_count slots end up a uniform
  // without-replacement sample of [1, N].
  std::vector<std::uint32_t> pool(n_records);
  for (std::uint32_t i = 0; i < n_records; ++i) pool[i] = i + 1;
  for (std::uint32_t i = 0; i < pad_count; ++i) {
    std::uint32_t j =
        static_cast<std::uint32_t>(rng.u64(i, n_records - 1));
    std::swap(pool[i], pool[j]);
  }
  sets.decoy.assign(pool.begin(), pool.begin() + pad_count);
  std::sort(sets.decoy.begin(), sets.decoy.end());

  sets.padded.reserve(sets.matched.size() + sets.decoy.size());
  std::set_union(sets.matched.begin(), sets.matched.end(), sets.decoy.begin(),
                 sets.decoy.end(), std::back_inserter(sets.padded));
  return sets;
}

Ciphertext compute_encrypted_distance(const PublicKey& pk,
                                      const StoredRecord& record,
                                      const EncodedVector& q_enc,
                                      const Ciphertext& q_sq_ct,
                                      OpCounters* counters) {
  const auto* features = std::get_if<std::vector<Ciphertext>>(&record.enc_features);
  if (features == nullptr) {
    throw DomainError("record does not carry per-component ciphertexts");
  }
  if (!record.chi.has_value()) {
    throw DomainError("record lacks an encrypted squared norm");
  }
  if (features->size() != q_enc.dim()) throw DomainError("dimension mismatch");
  if (q_enc.modulus != pk.n) throw DomainError("query encoded for another key");

  // One pass of exponentiations with exponents -2*q_l (centered), their
  // products folded into the accumulator. The ciphertext inversions ride
  // inside the negative exponents, leaving dim exponentiations plus the
  // two multiplications below per record.
  mpz_class acc = 1;
  for (std::size_t l = 0; l < features->size(); ++l) {
    mpz_class exponent = -2 * decode_centered(q_enc.residues[l], pk.n);
    Ciphertext term = hom_scale(pk, (*features)[l], exponent);
    if (counters != nullptr) counters->hom_exps += 1;
    acc = acc * term.value % pk.n_sq;
  }
  Ciphertext h{acc};
  h = hom_add(pk, h, q_sq_ct);
  h = hom_add(pk, h, *record.chi);
  if (counters != nullptr) counters->hom_mults += 2;
  return h;
}

mpz_class encoded_sq_threshold(double threshold, std::uint64_t scale) {
  if (threshold < 0) return mpz_class(-1);
  mpf_class t(threshold, 256);
  t *= t;
  mpf_class s(0.0, 256);
  mpz_class scale_sq =
      mpz_class(static_cast<unsigned long>(scale)) * static_cast<unsigned long>(scale);
  mpf_set_z(s.get_mpf_t(), scale_sq.get_mpz_t());
  t *= s;
  mpz_class out;
  mpz_set_f(out.get_mpz_t(), t.get_mpf_t());  // truncation = floor, t >= 0
  return out;
}

// ---------------------------------------------------------------------------
// Server

Server::Server(Scheme scheme, PublicKey pk, RandomSource rng)
    : scheme_(scheme), pk_(std::move(pk)), rng_(std::move(rng)) {}

std::optional<Message> Server::handle(const Message& request) {
  switch (request.kind) {
    case MessageKind::upload_records:
      handle_upload(request);
      return std::nullopt;
    case MessageKind::feature_request:
      if (scheme_ == Scheme::scheme2) {
        throw DomainError("feature requests are not part of this flow");
      }
      return handle_feature_request();
    case MessageKind::query_vector:
      if (scheme_ != Scheme::scheme2) {
        throw DomainError("plaintext queries are not part of this flow");
      }
      return handle_query(request);
    case MessageKind::match_indices:
      return handle_match_indices(request);
    default:
      throw DomainError("unexpected message kind");
  }
}

void Server::handle_upload(const Message& request) {
  if (!records_.empty()) throw DomainError("store already populated");
  ByteReader r(request.payload);
  std::uint32_t count = r.u32();
  std::uint32_t dim = r.u32();
  std::size_t ct_width = pk_.ct_bytes();

  auto read_ciphertext = [&]() {
    mpz_class v = r.mpz(ct_width);
    if (v <= 0 || v >= pk_.n_sq) throw FormatError("ciphertext out of range");
    return Ciphertext{v};
  };

  records_.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    StoredRecord rec;
    rec.index = r.u32();
    if (rec.index != i + 1) throw FormatError("record indices must be 1..N");
    if (scheme_ == Scheme::scheme2) rec.chi = read_ciphertext();
    if (scheme_ == Scheme::revised) {
      rec.enc_features = Envelope::from_wire(r.blob());
    } else {
      std::vector<Ciphertext> cts;
      cts.reserve(dim);
      for (std::uint32_t l = 0; l < dim; ++l) cts.push_back(read_ciphertext());
      rec.enc_features = std::move(cts);
    }
    rec.enc_image = Envelope::from_wire(r.blob());
    records_.push_back(std::move(rec));
  }
  r.expect_end();
  dim_ = dim;
}

Message Server::handle_feature_request() const {
  ByteWriter w;
  w.u32(static_cast<std::uint32_t>(records_.size()));
  w.u32(dim_);
  if (scheme_ == Scheme::scheme1) {
    std::size_t ct_width = pk_.ct_bytes();
    for (const StoredRecord& rec : records_) {
      w.u32(rec.index);
      for (const Ciphertext& ct :
           std::get<std::vector<Ciphertext>>(rec.enc_features)) {
        w.mpz(ct.value, ct_width);
      }
    }
    return Message{MessageKind::encrypted_features, w.take()};
  }
  for (const StoredRecord& rec : records_) {
    w.u32(rec.index);
    w.blob(std::get<Envelope>(rec.enc_features).to_wire());
  }
  return Message{MessageKind::feature_envelopes, w.take()};
}

Message Server::handle_query(const Message& request) {
  EncodedVector q_enc = decode_feature_payload(request.payload);
  if (q_enc.modulus != pk_.n) throw DomainError("query encoded for another key");
  if (!records_.empty() && q_enc.dim() != dim_) {
    throw DomainError("query dimension does not match the store");
  }

  // E(sum q_l^2), encrypted once per query under the public key.
  mpz_class q_sq = 0;
  for (const mpz_class& residue : q_enc.residues) {
    mpz_class c = decode_centered(residue, pk_.n);
    q_sq += c * c;
  }
  q_sq %= pk_.n;
  if (q_sq < 0) q_sq += pk_.n;
  Ciphertext q_sq_ct = encrypt(pk_, q_sq, rng_);
  counters_.pk_encrypts += 1;

  ByteWriter w;
  w.u32(static_cast<std::uint32_t>(records_.size()));
  std::size_t ct_width = pk_.ct_bytes();
  for (const StoredRecord& rec : records_) {
    Ciphertext h =
        compute_encrypted_distance(pk_, rec, q_enc, q_sq_ct, &counters_);
    w.u32(rec.index);
    w.mpz(h.value, ct_width);
  }
  return Message{MessageKind::encrypted_distances, w.take()};
}

Message Server::handle_match_indices(const Message& request) const {
  ByteReader r(request.payload);
  std::uint32_t count = r.u32();
  std::set<std::uint32_t> wanted;
  for (std::uint32_t i = 0; i < count; ++i) {
    std::uint32_t index = r.u32();
    if (index < 1 || index > records_.size()) {
      throw DomainError("requested index out of range");
    }
    wanted.insert(index);
  }
  r.expect_end();

  ByteWriter w;
  w.u32(static_cast<std::uint32_t>(wanted.size()));
  for (std::uint32_t index : wanted) {
    w.u32(index);
    w.blob(records_[index - 1].enc_image.to_wire());
  }
  return Message{MessageKind::images, w.take()};
}

// ---------------------------------------------------------------------------
// Client

Client::Client(Scheme scheme, KeyPair kp, SymKey sym, std::uint64_t scale,
               RandomSource rng)
    : scheme_(scheme),
      kp_(std::move(kp)),
      sym_(sym),
      scale_(scale),
      rng_(std::move(rng)) {}

EncodedVector Client::encode(const FeatureVector& v) const {
  return encode_vector(v, scale_, kp_.pk.n);
}

Message Client::make_upload(const std::vector<FeatureVector>& features,
                            const std::vector<Bytes>& images,
                            bool bypass_distance_bound) {
  if (features.size() != images.size()) {
    throw DomainError("feature and image counts differ");
  }
  std::uint32_t count = static_cast<std::uint32_t>(features.size());
  std::uint32_t dim = count == 0 ? 0 : static_cast<std::uint32_t>(features[0].size());
  for (const FeatureVector& f : features) {
    if (f.size() != dim) throw DomainError("inconsistent feature dimensions");
  }

  std::optional<DistanceBound> bound;
  if (count > 0 && !bypass_distance_bound) {
    bound = DistanceBound::for_parameters(kp_.pk.n, dim, scale_);
  }

  std::size_t ct_width = kp_.pk.ct_bytes();
  ByteWriter w;
  w.u32(count);
  w.u32(dim);
  for (std::uint32_t i = 0; i < count; ++i) {
    if (bound && !bound->admits(features[i])) {
      throw EncodeOverflowError(
          "image " + std::to_string(i + 1) +
              " exceeds the safe magnitude for this key",
          i + 1);
    }
    EncodedVector enc = encode_vector(features[i], scale_, kp_.pk.n);
    w.u32(i + 1);
    if (scheme_ == Scheme::scheme2) {
      mpz_class norm_sq = 0;
      for (const mpz_class& residue : enc.residues) {
        mpz_class c = decode_centered(residue, kp_.pk.n);
        norm_sq += c * c;
      }
      norm_sq %= kp_.pk.n;
      if (norm_sq < 0) norm_sq += kp_.pk.n;
      Ciphertext chi = encrypt_with_sk(kp_, norm_sq, rng_);
      counters_.pk_encrypts += 1;
      w.mpz(chi.value, ct_width);
    }
    if (scheme_ == Scheme::revised) {
      Envelope env = sym_encrypt(sym_, encode_feature_payload(enc), rng_);
      counters_.sym_encrypts += 1;
      w.blob(env.to_wire());
    } else {
      for (const mpz_class& residue : enc.residues) {
        Ciphertext ct = encrypt_with_sk(kp_, residue, rng_);
        counters_.pk_encrypts += 1;
        w.mpz(ct.value, ct_width);
      }
    }
    Envelope img = sym_encrypt(sym_, images[i], rng_);
    counters_.sym_encrypts += 1;
    w.blob(img.to_wire());
  }
  uploaded_ = count;
  return Message{MessageKind::upload_records, w.take()};
}

Message Client::make_feature_request() const {
  return Message{MessageKind::feature_request, {}};
}

Message Client::make_query(const EncodedVector& q_enc) const {
  return Message{MessageKind::query_vector, encode_feature_payload(q_enc)};
}

Message Client::make_match_indices(
    const std::vector<std::uint32_t>& indices) const {
  ByteWriter w;
  w.u32(static_cast<std::uint32_t>(indices.size()));
  for (std::uint32_t i : indices) w.u32(i);
  return Message{MessageKind::match_indices, w.take()};
}

MatchScan Client::receive_encrypted_features(const Message& reply,
                                             const EncodedVector& q_enc,
                                             const mpz_class& sq_threshold) {
  if (reply.kind != MessageKind::encrypted_features) {
    throw DomainError("unexpected reply kind");
  }
  ByteReader r(reply.payload);
  MatchScan scan;
  scan.total = r.u32();
  std::uint32_t dim = r.u32();
  if (dim != q_enc.dim() && scan.total > 0) {
    throw DomainError("stored dimension does not match the query");
  }
  std::size_t ct_width = kp_.pk.ct_bytes();
  std::vector<mpz_class> q_centered = decode_components(q_enc);
  for (std::uint32_t i = 0; i < scan.total; ++i) {
    std::uint32_t index = r.u32();
    mpz_class d_sq = 0;
    for (std::uint32_t l = 0; l < dim; ++l) {
      Ciphertext ct{r.mpz(ct_width)};
      mpz_class component = decrypt(kp_.pk, kp_.sk, ct);
      counters_.pk_decrypts += 1;
      mpz_class diff = decode_centered(component, kp_.pk.n) - q_centered[l];
      d_sq += diff * diff;
    }
    if (d_sq <= sq_threshold) scan.matched.push_back(index);
  }
  r.expect_end();
  return scan;
}

MatchScan Client::receive_encrypted_distances(const Message& reply,
                                              const mpz_class& sq_threshold) {
  if (reply.kind != MessageKind::encrypted_distances) {
    throw DomainError("unexpected reply kind");
  }
  ByteReader r(reply.payload);
  MatchScan scan;
  scan.total = r.u32();
  std::size_t ct_width = kp_.pk.ct_bytes();
  for (std::uint32_t i = 0; i < scan.total; ++i) {
    std::uint32_t index = r.u32();
    Ciphertext h{r.mpz(ct_width)};
    // The decrypted value is taken at face value, exactly as the flow
    // defines it; out-of-bound fixtures surface here as wrapped garbage.
    mpz_class d_sq = decrypt(kp_.pk, kp_.sk, h);
    counters_.pk_decrypts += 1;
    if (d_sq <= sq_threshold) scan.matched.push_back(index);
  }
  r.expect_end();
  return scan;
}

MatchScan Client::receive_feature_envelopes(const Message& reply,
                                            const EncodedVector& q_enc,
                                            const mpz_class& sq_threshold) {
  if (reply.kind != MessageKind::feature_envelopes) {
    throw DomainError("unexpected reply kind");
  }
  ByteReader r(reply.payload);
  MatchScan scan;
  scan.total = r.u32();
  std::uint32_t dim = r.u32();
  if (dim != q_enc.dim() && scan.total > 0) {
    throw DomainError("stored dimension does not match the query");
  }
  for (std::uint32_t i = 0; i < scan.total; ++i) {
    std::uint32_t index = r.u32();
    Envelope env = Envelope::from_wire(r.blob());
    Bytes payload = sym_decrypt(sym_, env);
    counters_.sym_decrypts += 1;
    EncodedVector stored = decode_feature_payload(payload);
    mpz_class d_sq = encoded_sq_distance(stored, q_enc);
    if (d_sq <= sq_threshold) scan.matched.push_back(index);
  }
  r.expect_end();
  return scan;
}

std::vector<std::pair<std::uint32_t, Bytes>> Client::receive_images(
    const Message& reply, const std::vector<std::uint32_t>& recover) {
  if (reply.kind != MessageKind::images) {
    throw DomainError("unexpected reply kind");
  }
  std::set<std::uint32_t> wanted(recover.begin(), recover.end());
  ByteReader r(reply.payload);
  std::uint32_t count = r.u32();
  std::vector<std::pair<std::uint32_t, Bytes>> out;
  out.reserve(wanted.size());
  for (std::uint32_t i = 0; i < count; ++i) {
    std::uint32_t index = r.u32();
    Envelope env = Envelope::from_wire(r.blob());
    if (wanted.count(index) == 0) continue;  // decoy, discarded undecrypted
    out.emplace_back(index, sym_decrypt(sym_, env));
    counters_.sym_decrypts += 1;
  }
  r.expect_end();
  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  return out;
}

// ---------------------------------------------------------------------------
// Session

Session::Session(Scheme scheme, const KeyPair& kp, const SymKey& sym,
                 const Options& options)
    : scheme_(scheme),
      options_(options),
      client_(scheme, kp, sym, options.scale, RandomSource(options.client_seed)),
      server_(scheme, kp.pk, RandomSource(options.server_seed)),
      start_(std::chrono::steady_clock::now()) {}

std::uint64_t Session::now_ns() const {
  return static_cast<std::uint64_t>(
      std::chrono::duration_cast<std::chrono::nanoseconds>(
          std::chrono::steady_clock::now() - start_)
          .count());
}

CostLedger Session::snapshot() const {
  return CostLedger{client_.counters(), server_.counters()};
}

CostLedger Session::ledger() const { return snapshot(); }

std::optional<Message> Session::exchange(const Message& request) {
  transcript_.record(Direction::client_to_server, request, now_ns());
  client_.count_bytes(request.frame_size(), 0);
  server_.count_bytes(0, request.frame_size());

  auto s0 = std::chrono::steady_clock::now();
  std::optional<Message> reply = server_.handle(request);
  server_ns_ += static_cast<std::uint64_t>(
      std::chrono::duration_cast<std::chrono::nanoseconds>(
          std::chrono::steady_clock::now() - s0)
          .count());

  if (reply.has_value()) {
    transcript_.record(Direction::server_to_client, *reply, now_ns());
    server_.count_bytes(reply->frame_size(), 0);
    client_.count_bytes(0, reply->frame_size());
  }
  return reply;
}

UploadResult Session::upload(const std::vector<FeatureVector>& features,
                             const std::vector<Bytes>& images) {
  CostLedger before = snapshot();
  Message msg = client_.make_upload(features, images,
                                    options_.bypass_distance_bound);
  exchange(msg);
  UploadResult out;
  out.stored = features.size();
  out.ledger = snapshot() - before;
  return out;
}

QueryResult Session::query(const FeatureVector& q, double threshold,
                           std::optional<std::uint32_t> pad_count) {
  CostLedger before = snapshot();
  std::uint64_t server_ns_before = server_ns_;
  auto t0 = std::chrono::steady_clock::now();

  EncodedVector q_enc = client_.encode(q);
  if (!options_.bypass_distance_bound && !q.empty()) {
    DistanceBound bound =
        DistanceBound::for_parameters(client_.pk().n, q.size(), client_.scale());
    if (!bound.admits(q)) {
      throw EncodeOverflowError("query exceeds the safe magnitude", 0);
    }
  }
  mpz_class sq_threshold = encoded_sq_threshold(threshold, client_.scale());

  QueryResult out;
  MatchScan scan;
  switch (scheme_) {
    case Scheme::scheme1: {
      Message reply = *exchange(client_.make_feature_request());
      scan = client_.receive_encrypted_features(reply, q_enc, sq_threshold);
      out.sets = MatchSets{scan.matched, {}, scan.matched};
      break;
    }
    case Scheme::scheme2: {
      Message reply = *exchange(client_.make_query(q_enc));
      scan = client_.receive_encrypted_distances(reply, sq_threshold);
      std::uint32_t pad = pad_count.value_or((scan.total + 9) / 10);
      out.sets = pad_index_set(scan.matched, scan.total, pad, client_.rng());
      break;
    }
    case Scheme::revised: {
      Message reply = *exchange(client_.make_feature_request());
      scan = client_.receive_feature_envelopes(reply, q_enc, sq_threshold);
      out.sets = MatchSets{scan.matched, {}, scan.matched};
      break;
    }
  }

  Message images_reply = *exchange(client_.make_match_indices(out.sets.padded));
  out.images = client_.receive_images(images_reply, out.sets.matched);

  std::uint64_t total_ns = static_cast<std::uint64_t>(
      std::chrono::duration_cast<std::chrono::nanoseconds>(
          std::chrono::steady_clock::now() - t0)
          .count());
  std::uint64_t server_ns = server_ns_ - server_ns_before;
  out.server_ms = static_cast<double>(server_ns) / 1e6;
  out.client_ms = static_cast<double>(total_ns - server_ns) / 1e6;
  out.ledger = snapshot() - before;
  return out;
}

}  // namespace cpis
