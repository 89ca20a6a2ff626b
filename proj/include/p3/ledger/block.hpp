// Copyright 2026 The P3 Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <string>

#include "p3/bytes.hpp"
#include "p3/crypto/hash.hpp"
#include "p3/crypto/pseudonym.hpp"
#include "p3/crypto/rsa.hpp"
#include "p3/rng.hpp"

namespace p3::ledger {

using crypto::Digest;
using crypto::Pseudonym;
using DatumId = ByteArray<16>;
using Label = ByteArray<16>;

inline constexpr int kDefaultDifficulty = 12;
inline constexpr int kMaxDifficulty = 32;
inline constexpr std::size_t kMaxPurposeBytes = 1024;
// Record plaintexts are zero-padded to a multiple of this before
// encryption so ciphertext length does not reveal the purpose length.
inline constexpr std::size_t kRecordBucket = 256;

// Reserved id of the decoy datum; never stored, never logged.
inline constexpr DatumId kFakeDatum{};

struct UsageRecord {
  DatumId datum_id{};
  std::int64_t timestamp = 0;
  std::string purpose;
  Label label_t{};
  Pseudonym counterpart_pseudonym;

  // datum_id || i64 timestamp || len16 purpose || label_t || counterpart,
  // then zero padding to a multiple of kRecordBucket.
  Bytes encode() const;
  // Throws DecodeError (also for non-zero padding or an oversized purpose).
  static UsageRecord decode(ByteView data);

  friend bool operator==(const UsageRecord&, const UsageRecord&) = default;
};

struct BlockPayload {
  Pseudonym consumer_pseudonym;
  Pseudonym owner_pseudonym;
  Bytes enc_consumer;
  Bytes enc_owner;

  friend bool operator==(const BlockPayload&, const BlockPayload&) = default;
};

struct Block {
  Digest prev_hash{};
  std::uint64_t nonce = 0;
  BlockPayload payload;

  // prev_hash(32) || nonce(8) || p(c)(32) || p(o)(32) ||
  // len32 || enc_c || len32 || enc_o
  Bytes serialize() const;
  static Block parse(ByteView data);

  friend bool operator==(const Block&, const Block&) = default;
};

// Nonce field offset inside the serialized block.
inline constexpr std::size_t kNonceOffset = 32;

Digest block_hash(const Block& b);
Digest block_hash_of_bytes(ByteView serialized);

// All-zero prev_hash, nonce and pseudonyms, empty ciphertexts.
const Block& genesis_block();
const Digest& genesis_hash();

int leading_zero_bits(const Digest& d);
bool meets_difficulty(const Digest& d, int difficulty);

struct MiningStats {
  std::uint64_t attempts = 0;
};

// Searches nonces upward from a random start. Throws Errc::kInvalidArgument
// for difficulty outside [0, kMaxDifficulty].
Block mine_block(const Digest& prev_hash, BlockPayload payload, int difficulty, Rng& rng,
                 MiningStats* stats = nullptr);

// Encrypted record copy for one side of a block.
Bytes seal_record(const crypto::PublicKey& key, const UsageRecord& record, Rng& rng);
// Throws Errc::kAuthenticationFailure (wrong key, tampering) or DecodeError.
UsageRecord open_record(const crypto::PrivateKey& key, ByteView ciphertext);

}  // namespace p3::ledger
