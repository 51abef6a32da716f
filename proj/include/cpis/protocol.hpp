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

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "cpis/encoding.hpp"
#include "cpis/envelope.hpp"
#include "cpis/ledger.hpp"
#include "cpis/paillier.hpp"

// Client and server state machines for three image retrieval flows over an
// in-process channel carrying length-prefixed frames (kind byte, u32
// length, payload), with exact per-role operation and byte accounting.
//
//   scheme1: features stored Paillier-encrypted per component; the client
//            fetches every encrypted feature vector, decrypts all of them,
//            and matches locally.
//   scheme2: as scheme1 plus a stored encryption of each squared feature
//            norm; the query travels in plaintext and the server folds the
//            homomorphic operations into one encrypted squared distance
//            per record.
//   revised: features travel under the symmetric envelope; no public-key
//            operation appears anywhere.
//
// One session is single-threaded; independent sessions may run in
// parallel.
namespace cpis {

enum class Scheme { scheme1, scheme2, revised };

const char* to_string(Scheme s);
Scheme scheme_from_string(const std::string& s);

enum class MessageKind : std::uint8_t {
  upload_records = 1,
  feature_request = 2,
  encrypted_features = 3,  // scheme1 reply: all {i, E(f_i)} pairs
  query_vector = 4,        // scheme2: plaintext encoded query
  encrypted_distances = 5, // scheme2 reply: all h_i
  feature_envelopes = 6,   // revised reply: all symmetric feature envelopes
  match_indices = 7,       // index set going to the server
  images = 8,              // image envelopes for the requested indices
};

const char* to_string(MessageKind kind);

struct Message {
  MessageKind kind;
  Bytes payload;

  // kind byte + u32 length prefix + payload.
  std::size_t frame_size() const { return 5 + payload.size(); }
};

enum class Direction { client_to_server, server_to_client };

const char* to_string(Direction d);

struct TranscriptEntry {
  Direction direction;
  MessageKind kind;
  std::size_t payload_size;
  std::uint64_t t_ns;  // monotonic, relative to session start
};

// Ordered message log of one protocol run, for replay checks and byte
// accounting. Exportable as JSON lines.
class SessionTranscript {
 public:
  void record(Direction d, const Message& m, std::uint64_t t_ns) {
    entries_.push_back({d, m.kind, m.payload.size(), t_ns});
  }
  const std::vector<TranscriptEntry>& entries() const { return entries_; }
  std::string to_json_lines() const;

 private:
  std::vector<TranscriptEntry> entries_;
};

// One server-side record: index, optional encrypted squared norm (scheme2),
// the feature material in the scheme's shape, and the image envelope.
struct StoredRecord {
  std::uint32_t index = 0;  // 1-based
  std::optional<Ciphertext> chi;
  std::variant<std::vector<Ciphertext>, Envelope> enc_features;
  Envelope enc_image;
};

// Matched set I, decoy set, and their union as sent to the server. In
// scheme1 and the revised flow there are no decoys and padded == matched.
struct MatchSets {
  std::vector<std::uint32_t> matched;
  std::vector<std::uint32_t> decoy;
  std::vector<std::uint32_t> padded;
};

// Uniformly draws pad_count distinct decoy indices from [1, N] and unions
// them with the matched set.
MatchSets pad_index_set(const std::vector<std::uint32_t>& matched,
                        std::uint32_t n_records, std::uint32_t pad_count,
                        RandomSource& rng);

// h_i = (prod_l E(f_l)^{-2 q_l}) * E(sum q_l^2) * chi_i, which decrypts to
// the squared distance between the stored encoding and the query encoding
// mod n. Exactly dim exponentiations (negative exponents, so the inversion
// rides inside them) and 2 multiplications land in `counters` per call.
Ciphertext compute_encrypted_distance(const PublicKey& pk,
                                      const StoredRecord& record,
                                      const EncodedVector& q_enc,
                                      const Ciphertext& q_sq_ct,
                                      OpCounters* counters);

class Server {
 public:
  Server(Scheme scheme, PublicKey pk, RandomSource rng);

  // Executes one request; the reply is empty for fire-and-forget kinds
  // (upload). Unknown or out-of-place kinds raise DomainError.
  std::optional<Message> handle(const Message& request);

  const std::vector<StoredRecord>& store() const { return records_; }
  const OpCounters& counters() const { return counters_; }
  std::uint32_t dim() const { return dim_; }
  void count_bytes(std::uint64_t sent, std::uint64_t received) {
    counters_.bytes_sent += sent;
    counters_.bytes_received += received;
  }

 private:
  void handle_upload(const Message& request);
  Message handle_feature_request() const;
  Message handle_query(const Message& request);
  Message handle_match_indices(const Message& request) const;

  Scheme scheme_;
  PublicKey pk_;
  RandomSource rng_;
  std::vector<StoredRecord> records_;
  std::uint32_t dim_ = 0;
  OpCounters counters_;
};

// Matched indices plus the record count announced by the reply.
struct MatchScan {
  std::vector<std::uint32_t> matched;
  std::uint32_t total = 0;
};

class Client {
 public:
  Client(Scheme scheme, KeyPair kp, SymKey sym, std::uint64_t scale,
         RandomSource rng);

  Message make_upload(const std::vector<FeatureVector>& features,
                      const std::vector<Bytes>& images,
                      bool bypass_distance_bound);
  Message make_feature_request() const;
  Message make_query(const EncodedVector& q_enc) const;
  Message make_match_indices(const std::vector<std::uint32_t>& indices) const;

  // Reply handlers return the matched set for the given squared-distance
  // threshold in encoded units.
  MatchScan receive_encrypted_features(const Message& reply,
                                       const EncodedVector& q_enc,
                                       const mpz_class& sq_threshold);
  MatchScan receive_encrypted_distances(const Message& reply,
                                        const mpz_class& sq_threshold);
  MatchScan receive_feature_envelopes(const Message& reply,
                                      const EncodedVector& q_enc,
                                      const mpz_class& sq_threshold);
  // Decrypts exactly the images named in `recover`; decoys pass through
  // untouched.
  std::vector<std::pair<std::uint32_t, Bytes>> receive_images(
      const Message& reply, const std::vector<std::uint32_t>& recover);

  EncodedVector encode(const FeatureVector& v) const;

  const PublicKey& pk() const { return kp_.pk; }
  std::uint64_t scale() const { return scale_; }
  std::uint32_t uploaded_count() const { return uploaded_; }
  const OpCounters& counters() const { return counters_; }
  RandomSource& rng() { return rng_; }
  void count_bytes(std::uint64_t sent, std::uint64_t received) {
    counters_.bytes_sent += sent;
    counters_.bytes_received += received;
  }

 private:
  Scheme scheme_;
  KeyPair kp_;
  SymKey sym_;
  std::uint64_t scale_;
  RandomSource rng_;
  std::uint32_t uploaded_ = 0;
  OpCounters counters_;
};

struct UploadResult {
  std::size_t stored = 0;
  CostLedger ledger;  // this upload only
};

struct QueryResult {
  MatchSets sets;
  // (index, recovered image bytes) for the matched set, ascending index.
  std::vector<std::pair<std::uint32_t, Bytes>> images;
  CostLedger ledger;  // this query only
  double client_ms = 0.0;
  double server_ms = 0.0;
};

// Converts a real distance threshold to the squared integer threshold used
// in encoded units: floor((threshold * S)^2). Negative thresholds match
// nothing.
mpz_class encoded_sq_threshold(double threshold, std::uint64_t scale);

// One client, one server, one store. Drives the message flows and keeps
// the cumulative ledger and transcript.
class Session {
 public:
  struct Options {
    std::uint64_t scale = 10'000;
    std::uint64_t client_seed = 1;
    std::uint64_t server_seed = 2;
    // Skips the distance-level overflow guard at upload, so wraparound
    // behaviour can be observed downstream. Testing only.
    bool bypass_distance_bound = false;
  };

  Session(Scheme scheme, const KeyPair& kp, const SymKey& sym,
          const Options& options);

  UploadResult upload(const std::vector<FeatureVector>& features,
                      const std::vector<Bytes>& images);

  // pad_count applies to scheme2 only; the default is ceil(N/10).
  QueryResult query(const FeatureVector& q, double threshold,
                    std::optional<std::uint32_t> pad_count = std::nullopt);

  const SessionTranscript& transcript() const { return transcript_; }
  CostLedger ledger() const;
  Scheme scheme() const { return scheme_; }
  const Server& server() const { return server_; }

 private:
  // Sends the request through the channel, times the server side, and
  // returns the reply when the flow defines one.
  std::optional<Message> exchange(const Message& request);
  CostLedger snapshot() const;
  std::uint64_t now_ns() const;

  Scheme scheme_;
  Options options_;
  Client client_;
  Server server_;
  SessionTranscript transcript_;
  std::chrono::steady_clock::time_point start_;
  std::uint64_t server_ns_ = 0;  // accumulated inside exchange()
};

}  // namespace cpis
