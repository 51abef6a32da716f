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

namespace cpis {

// Crypto-operation and traffic counters for one protocol role. Counters
// only ever grow while a session runs; phase costs are differences of
// snapshots.
struct OpCounters {
  std::uint64_t pk_encrypts = 0;
  std::uint64_t pk_decrypts = 0;
  std::uint64_t hom_mults = 0;   // ciphertext-by-ciphertext multiplications
  std::uint64_t hom_exps = 0;    // ciphertext exponentiations (incl. inverses)
  std::uint64_t sym_encrypts = 0;
  std::uint64_t sym_decrypts = 0;
  std::uint64_t bytes_sent = 0;
  std::uint64_t bytes_received = 0;

  OpCounters operator-(const OpCounters& rhs) const {
    return OpCounters{pk_encrypts - rhs.pk_encrypts,
                      pk_decrypts - rhs.pk_decrypts,
                      hom_mults - rhs.hom_mults,
                      hom_exps - rhs.hom_exps,
                      sym_encrypts - rhs.sym_encrypts,
                      sym_decrypts - rhs.sym_decrypts,
                      bytes_sent - rhs.bytes_sent,
                      bytes_received - rhs.bytes_received};
  }
  bool operator==(const OpCounters&) const = default;
};

struct CostLedger {
  OpCounters client;
  OpCounters server;

  CostLedger operator-(const CostLedger& rhs) const {
    return CostLedger{client - rhs.client, server - rhs.server};
  }
  bool operator==(const CostLedger&) const = default;
};

}  // namespace cpis
