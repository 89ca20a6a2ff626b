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

#include <algorithm>
#include <filesystem>

#include "doctest.h"
#include "p3/io.hpp"
#include "p3/ledger/chain.hpp"
#include "test_util.hpp"
#include "vectors.hpp"

using namespace p3;
using namespace p3::ledger;
using p3::test::require_errc;
using p3::test::test_key;
using Kind = ValidationError::Kind;

namespace {

UsageRecord sample_record(Rng& rng, const Pseudonym& counterpart) {
  UsageRecord u;
  u.datum_id = rng.array<16>();
  u.timestamp = 1700000000 + static_cast<std::int64_t>(rng.uniform(0, 1000));
  u.purpose = "billing";
  u.label_t = rng.array<16>();
  u.counterpart_pseudonym = counterpart;
  return u;
}

BlockPayload honest_payload(const crypto::KeyPair& consumer, const crypto::KeyPair& owner,
                            const UsageRecord& u, Rng& rng) {
  return {crypto::derive_pseudonym(consumer.public_key),
          crypto::derive_pseudonym(owner.public_key), seal_record(consumer.public_key, u, rng),
          seal_record(owner.public_key, u, rng)};
}

// Payloads with random pseudonyms and short opaque ciphertexts.
BlockPayload opaque_payload(Rng& rng) {
  BlockPayload p;
  p.consumer_pseudonym.digest = rng.array<32>();
  p.owner_pseudonym.digest = rng.array<32>();
  p.enc_consumer = rng.bytes(24);
  p.enc_owner = rng.bytes(24);
  return p;
}

Chain opaque_chain(std::size_t extra_blocks, int difficulty, Rng& rng) {
  Chain c(difficulty);
  for (std::size_t i = 0; i < extra_blocks; ++i) {
    c.append_block(mine_block(c.tip_hash(), opaque_payload(rng), difficulty, rng));
  }
  return c;
}

}  // namespace

TEST_CASE("block hashing") {
  CHECK(to_hex(genesis_hash()) == test_vectors::kGenesisHash);
  CHECK(genesis_block().serialize() == Bytes(112, 0));

  Block b;
  b.prev_hash.fill(0x11);
  b.nonce = 0x0102030405060708;
  b.payload.consumer_pseudonym.digest.fill(0x22);
  b.payload.owner_pseudonym.digest.fill(0x33);
  b.payload.enc_consumer = to_bytes("abc");
  CHECK(to_hex(block_hash(b)) == test_vectors::kFixedBlockHash);
  CHECK(Block::parse(b.serialize()) == b);

  Block copy = b;
  CHECK(block_hash(copy) == block_hash(b));
  copy.payload.enc_consumer[1] ^= 0x01;
  CHECK(block_hash(copy) != block_hash(b));
  CHECK_THROWS_AS(Block::parse(ByteView(b.serialize()).first(50)), DecodeError);
}

TEST_CASE("leading zero bits") {
  Digest d{};
  CHECK(leading_zero_bits(d) == 256);
  d[1] = 0x10;
  CHECK(leading_zero_bits(d) == 11);
  CHECK(meets_difficulty(d, 11));
  CHECK_FALSE(meets_difficulty(d, 12));
}

TEST_CASE("mining") {
  Rng rng(1);
  MiningStats stats;
  auto b0 = mine_block(genesis_hash(), opaque_payload(rng), 0, rng, &stats);
  CHECK(stats.attempts == 1);
  auto b12 = mine_block(genesis_hash(), opaque_payload(rng), 12, rng, &stats);
  CHECK(leading_zero_bits(block_hash(b12)) >= 12);
  require_errc(Errc::kInvalidArgument,
               [&] { mine_block(genesis_hash(), opaque_payload(rng), 33, rng); });
}

TEST_CASE("median mining effort at difficulty 12") {
  Rng rng(2);
  std::vector<std::uint64_t> attempts;
  for (int i = 0; i < 100; ++i) {
    MiningStats s;
    mine_block(genesis_hash(), opaque_payload(rng), 12, rng, &s);
    attempts.push_back(s.attempts);
  }
  std::nth_element(attempts.begin(), attempts.begin() + 50, attempts.end());
  const auto median = attempts[50];
  MESSAGE("median attempts " << median);
  CHECK(median >= (1u << 10));
  CHECK(median <= (1u << 14));
}

TEST_CASE("validation") {
  Rng rng(3);
  auto c = opaque_chain(5, 8, rng);
  REQUIRE(c.length() == 6);
  CHECK_FALSE(validate_chain(c).has_value());
  CHECK_FALSE(validate_chain(c, c.tip_hash()).has_value());

  SUBCASE("flipped byte in block 3") {
    auto blocks = c.blocks();
    blocks[3].payload.enc_owner[2] ^= 0x40;
    auto err = validate_chain(Chain::from_blocks(blocks, 8));
    REQUIRE(err.has_value());
    const bool expected = (err->index == 4 && err->kind == Kind::kBrokenLink) ||
                          (err->index == 3 && err->kind == Kind::kInsufficientWork);
    CHECK(expected);
  }
  SUBCASE("wrong genesis") {
    auto blocks = c.blocks();
    blocks[0].nonce = 1;
    auto err = validate_chain(Chain::from_blocks(blocks, 8));
    REQUIRE(err.has_value());
    CHECK(err->kind == Kind::kBadGenesis);
  }
  SUBCASE("wrong anchor") {
    Digest other{};
    auto err = validate_chain(c, other);
    REQUIRE(err.has_value());
    CHECK(err->kind == Kind::kTipMismatch);
  }
  SUBCASE("append rejects bad blocks") {
    auto copy = c;
    require_errc(Errc::kInvalidBlock,
                 [&] { copy.append_block(mine_block(genesis_hash(), opaque_payload(rng), 8, rng)); });
    Block lazy{c.tip_hash(), 0, opaque_payload(rng)};
    while (meets_difficulty(block_hash(lazy), 8)) ++lazy.nonce;
    require_errc(Errc::kInvalidBlock, [&] { copy.append_block(lazy); });
    CHECK(copy.length() == c.length());
  }
}

// Every single-byte mutation of every block. Links catch everything below
// the tip; at the tip only proof of work stands guard, so a mutation goes
// unnoticed exactly when the mutated hash happens to meet the difficulty.
// Checking against the tip agreed by peers closes that gap.
TEST_CASE("single-byte mutations") {
  Rng rng(4);
  const int difficulty = 8;
  auto c = opaque_chain(6, difficulty, rng);
  const auto& blocks = c.blocks();
  std::size_t total = 0, escaped = 0, escaped_expected = 0;
  for (std::size_t bi = 0; bi < blocks.size(); ++bi) {
    const auto bytes = blocks[bi].serialize();
    for (std::size_t pos = 0; pos < bytes.size(); ++pos) {
      auto mutated = bytes;
      mutated[pos] ^= static_cast<std::uint8_t>(rng.uniform(1, 255));
      Block mb;
      try {
        mb = Block::parse(mutated);
      } catch (const DecodeError&) {
        ++total;  // an unparseable block is a detected mutation
        continue;
      }
      auto copy = blocks;
      copy[bi] = mb;
      auto mc = Chain::from_blocks(copy, difficulty);
      ++total;
      const bool tip_pow_ok = bi == blocks.size() - 1 && pos >= kNonceOffset &&
                              meets_difficulty(block_hash_of_bytes(mutated), difficulty);
      if (!validate_chain(mc)) {
        ++escaped;
        CHECK_MESSAGE(tip_pow_ok, "undetected mutation at block " << bi << " byte " << pos);
      }
      if (tip_pow_ok) ++escaped_expected;
      CHECK(validate_chain(mc, c.tip_hash()).has_value());
    }
  }
  MESSAGE(total << " mutations, " << escaped << " escaped unanchored validation");
  CHECK(escaped == escaped_expected);
}

TEST_CASE("fork choice") {
  Rng rng(5);
  auto local = opaque_chain(3, 4, rng);
  Rng other(6);
  auto longer = opaque_chain(4, 4, other);
  auto same = opaque_chain(3, 4, other);
  CHECK(&choose_chain(local, longer) == &longer);
  CHECK(&choose_chain(local, same) == &local);
  auto broken_blocks = longer.blocks();
  broken_blocks[2].nonce ^= 1;
  auto broken = Chain::from_blocks(broken_blocks, 4);
  CHECK(&choose_chain(local, broken) == &local);
}

TEST_CASE("chain file") {
  Rng rng(7);
  auto c = opaque_chain(3, 4, rng);
  auto bytes = c.serialize();
  CHECK(std::equal(bytes.begin(), bytes.begin() + 4, as_bytes("P3LG").begin()));
  CHECK(bytes[6] == 4);
  auto back = Chain::parse(bytes);
  CHECK(back.serialize() == bytes);
  CHECK(back.tip_hash() == c.tip_hash());
  auto path = std::filesystem::temp_directory_path() / "p3_chain_test.p3lg";
  c.save(path);
  CHECK(read_file(path) == bytes);
  CHECK(Chain::load(path).blocks() == c.blocks());
  std::filesystem::remove(path);
  CHECK_THROWS_AS(Chain::parse(as_bytes("P3LX")), DecodeError);
}

TEST_CASE("query agrees with a linear scan") {
  Rng rng(8);
  Chain c(0);
  std::vector<Pseudonym> pool(6);
  for (auto& p : pool) p.digest = rng.array<32>();
  for (int i = 0; i < 40; ++i) {
    auto pl = opaque_payload(rng);
    pl.consumer_pseudonym = pool[rng.uniform(0, pool.size() - 1)];
    pl.owner_pseudonym = pool[rng.uniform(0, pool.size() - 1)];
    c.append_block(mine_block(c.tip_hash(), pl, 0, rng));
  }
  Pseudonym unused;
  unused.digest = rng.array<32>();
  CHECK(query_by_pseudonym(c, unused).empty());
  for (const auto& p : pool) {
    std::vector<std::size_t> expected;
    for (std::size_t i = 1; i < c.length(); ++i) {
      const auto& pl = c.blocks()[i].payload;
      if (pl.consumer_pseudonym == p || pl.owner_pseudonym == p) expected.push_back(i);
    }
    std::vector<std::size_t> got;
    for (const auto& [i, b] : query_by_pseudonym(c, p)) {
      got.push_back(i);
      CHECK(b == c.blocks()[i]);
    }
    CHECK(got == expected);
  }
}

TEST_CASE("records and dual copies") {
  Rng rng(9);
  const auto& consumer = test_key(0);
  const auto& owner = test_key(1);
  const auto& stranger = test_key(2);
  auto u = sample_record(rng, crypto::derive_pseudonym(consumer.public_key));
  CHECK(u.encode().size() == kRecordBucket);
  CHECK(UsageRecord::decode(u.encode()) == u);

  auto pl = honest_payload(consumer, owner, u, rng);
  CHECK(open_record(consumer.private_key, pl.enc_consumer) == u);
  CHECK(open_record(owner.private_key, pl.enc_owner) == u);
  CHECK(open_record(consumer.private_key, pl.enc_consumer).encode() ==
        open_record(owner.private_key, pl.enc_owner).encode());
  require_errc(Errc::kAuthenticationFailure,
               [&] { open_record(stranger.private_key, pl.enc_consumer); });
  require_errc(Errc::kAuthenticationFailure,
               [&] { open_record(stranger.private_key, pl.enc_owner); });

  auto long_purpose = u;
  long_purpose.purpose.assign(1025, 'x');
  require_errc(Errc::kInvalidArgument, [&] { long_purpose.encode(); });
  long_purpose.purpose.assign(1024, 'x');
  CHECK(UsageRecord::decode(long_purpose.encode()) == long_purpose);
}

TEST_CASE("reading own entries") {
  Rng rng(10);
  keystore::KeyStore owner_store(keystore::generate_master(rng, 0), 2048);
  Chain c(4);
  std::vector<UsageRecord> logged;
  std::vector<Pseudonym> owner_ps;
  for (int i = 0; i < 3; ++i) {
    std::uint64_t idx = 0;
    auto ok = owner_store.next_subkey(&idx);
    auto ck = test_key(i % 2 == 0 ? 0 : 2);
    auto u = sample_record(rng, crypto::derive_pseudonym(ck.public_key));
    auto block = mine_block(c.tip_hash(), honest_payload(ck, ok, u, rng), 4, rng);
    c.append_block(block);
    keystore::KeyStoreEntry e{crypto::derive_pseudonym(ok.public_key), ok, c.tip_hash(),
                              "consumer-x", keystore::Role::kOwner, {}, idx, false};
    owner_ps.push_back(e.pseudonym);
    owner_store.record_entry(e);
    logged.push_back(u);
  }
  // An unrelated block.
  c.append_block(mine_block(c.tip_hash(), opaque_payload(rng), 4, rng));

  auto entries = read_own_entries(c, owner_store);
  REQUIRE(entries.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(entries[i].status == OwnEntry::Status::kOk);
    CHECK(entries[i].block_index == i + 1);
    CHECK(entries[i].record == logged[i]);
  }

  owner_store.erase_link(owner_ps[1]);
  entries = read_own_entries(c, owner_store);
  REQUIRE(entries.size() == 3);
  CHECK(entries[1].status == OwnEntry::Status::kNoKey);
  CHECK_FALSE(entries[1].record.has_value());

  auto blocks = c.blocks();
  blocks[3].payload.enc_owner[40] ^= 0x01;
  entries = read_own_entries(Chain::from_blocks(blocks, 4), owner_store);
  CHECK(entries[2].status == OwnEntry::Status::kAuthenticationFailure);
  CHECK(entries[0].status == OwnEntry::Status::kOk);
}
