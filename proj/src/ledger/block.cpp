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

#include "p3/ledger/block.hpp"

#include <bit>

#include "p3/crypto/envelope.hpp"
#include "p3/error.hpp"

namespace p3::ledger {

Bytes UsageRecord::encode() const {
  if (purpose.size() > kMaxPurposeBytes) {
    throw Error(Errc::kInvalidArgument, "purpose exceeds 1024 bytes");
  }
  ByteWriter w;
  w.raw(datum_id);
  w.u64(static_cast<std::uint64_t>(timestamp));
  w.var16(purpose);
  w.raw(label_t);
  w.raw(counterpart_pseudonym.digest);
  Bytes out = std::move(w).take();
  out.resize((out.size() + kRecordBucket - 1) / kRecordBucket * kRecordBucket, 0);
  return out;
}

UsageRecord UsageRecord::decode(ByteView data) {
  ByteReader r(data);
  UsageRecord u;
  u.datum_id = r.array<16>();
  u.timestamp = static_cast<std::int64_t>(r.u64());
  u.purpose = r.str16();
  if (u.purpose.size() > kMaxPurposeBytes) throw DecodeError("purpose too long");
  u.label_t = r.array<16>();
  u.counterpart_pseudonym.digest = r.array<32>();
  auto pad = r.raw(r.remaining());
  if (pad.size() >= kRecordBucket ||
      std::any_of(pad.begin(), pad.end(), [](auto b) { return b != 0; })) {
    throw DecodeError("bad record padding");
  }
  return u;
}

Bytes Block::serialize() const {
  ByteWriter w;
  w.raw(prev_hash);
  w.u64(nonce);
  w.raw(payload.consumer_pseudonym.digest);
  w.raw(payload.owner_pseudonym.digest);
  w.var32(payload.enc_consumer);
  w.var32(payload.enc_owner);
  return std::move(w).take();
}

Block Block::parse(ByteView data) {
  ByteReader r(data);
  Block b;
  b.prev_hash = r.array<32>();
  b.nonce = r.u64();
  b.payload.consumer_pseudonym.digest = r.array<32>();
  b.payload.owner_pseudonym.digest = r.array<32>();
  auto c = r.var32();
  auto o = r.var32();
  r.expect_done();
  b.payload.enc_consumer.assign(c.begin(), c.end());
  b.payload.enc_owner.assign(o.begin(), o.end());
  return b;
}

Digest block_hash_of_bytes(ByteView serialized) { return crypto::blake2s(serialized); }

Digest block_hash(const Block& b) { return block_hash_of_bytes(b.serialize()); }

const Block& genesis_block() {
  static const Block g{};
  return g;
}

const Digest& genesis_hash() {
  static const Digest h = block_hash(genesis_block());
  return h;
}

int leading_zero_bits(const Digest& d) {
  int bits = 0;
  for (auto byte : d) {
    if (byte == 0) {
      bits += 8;
      continue;
    }
    bits += std::countl_zero(byte);
    break;
  }
  return bits;
}

bool meets_difficulty(const Digest& d, int difficulty) {
  return leading_zero_bits(d) >= difficulty;
}

Block mine_block(const Digest& prev_hash, BlockPayload payload, int difficulty, Rng& rng,
                 MiningStats* stats) {
  if (difficulty < 0 || difficulty > kMaxDifficulty) {
    throw Error(Errc::kInvalidArgument, "difficulty out of range");
  }
  Block b{prev_hash, rng.next_u64(), std::move(payload)};
  Bytes buf = b.serialize();
  crypto::Blake2s h;
  std::uint64_t attempts = 0;
  for (;; ++b.nonce) {
    for (int i = 0; i < 8; ++i) {
      buf[kNonceOffset + static_cast<std::size_t>(i)] =
          static_cast<std::uint8_t>(b.nonce >> (56 - 8 * i));
    }
    ++attempts;
    if (meets_difficulty(h.update(buf).finish(), difficulty)) break;
  }
  if (stats) stats->attempts = attempts;
  return b;
}

Bytes seal_record(const crypto::PublicKey& key, const UsageRecord& record, Rng& rng) {
  return crypto::encrypt_record(key, record.encode(), rng);
}

UsageRecord open_record(const crypto::PrivateKey& key, ByteView ciphertext) {
  return UsageRecord::decode(crypto::decrypt_record(key, ciphertext));
}

}  // namespace p3::ledger
