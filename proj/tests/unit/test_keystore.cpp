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

#include <bit>
#include <cmath>
#include <filesystem>
#include <set>

#include "doctest.h"
#include "p3/io.hpp"
#include "p3/keystore/keystore.hpp"
#include "test_util.hpp"

using namespace p3;
using namespace p3::keystore;
using p3::test::require_errc;

namespace {

MasterKey fixed_master(std::uint8_t tag = 1) {
  Seed s{};
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = static_cast<std::uint8_t>(tag + i);
  return make_master(s, 1700000000);
}

// Entries without key material, for the bookkeeping tests.
KeyStoreEntry bare_entry(std::uint8_t tag, Role role, std::string counterparty = "bob") {
  KeyStoreEntry e;
  e.pseudonym.digest.fill(tag);
  e.role = role;
  e.counterparty_identity = std::move(counterparty);
  e.evidence = Bytes(64, tag);
  return e;
}

int hamming(const Pseudonym& a, const Pseudonym& b) {
  int d = 0;
  for (std::size_t i = 0; i < a.digest.size(); ++i) {
    d += std::popcount(static_cast<unsigned>(a.digest[i] ^ b.digest[i]));
  }
  return d;
}

std::filesystem::path temp_path(const char* name) {
  return std::filesystem::temp_directory_path() / name;
}

}  // namespace

TEST_CASE("master key validation") {
  require_errc(Errc::kInvalidArgument, [] { make_master(Seed{}, 0); });
  Rng rng(1);
  auto m = generate_master(rng, 5);
  CHECK(m.creation_time == 5);
}

TEST_CASE("sub-key derivation") {
  KeyStore ks(fixed_master(), 2048);
  auto a = ks.derive_subkey(3);
  CHECK(derive_subkey(ks.master(), 3, 2048).public_key == a.public_key);
  require_errc(Errc::kIndexReuse, [&] { ks.derive_subkey(3); });
  std::uint64_t idx = 99;
  ks.next_subkey(&idx);
  CHECK(idx == 0);
  ks.next_subkey(&idx);
  CHECK(idx == 1);
  ks.next_subkey(&idx);
  CHECK(idx == 2);
  ks.next_subkey(&idx);
  CHECK(idx == 4);
  CHECK(subkey_seed(ks.master(), 0) != subkey_seed(ks.master(), 1));
}

TEST_CASE("indices 0..99 give pairwise distinct pseudonyms") {
  auto master = fixed_master(9);
  std::set<Pseudonym> seen;
  for (std::uint64_t i = 0; i < 100; ++i) {
    seen.insert(crypto::derive_pseudonym(derive_subkey(master, i, 2048).public_key));
  }
  CHECK(seen.size() == 100);
}

TEST_CASE("entries: record, lookup, list, erase") {
  KeyStore ks(fixed_master(), 2048);
  CHECK(ks.list_own_pseudonyms().empty());
  for (std::uint8_t t = 1; t <= 3; ++t) ks.record_entry(bare_entry(t, Role::kOwner));
  for (std::uint8_t t = 4; t <= 5; ++t) ks.record_entry(bare_entry(t, Role::kConsumer));

  Pseudonym p1;
  p1.digest.fill(1);
  CHECK(ks.lookup(p1).counterparty_identity == "bob");
  require_errc(Errc::kDuplicatePseudonym, [&] { ks.record_entry(bare_entry(1, Role::kOwner)); });
  Pseudonym absent;
  absent.digest.fill(77);
  require_errc(Errc::kNotFound, [&] { ks.lookup(absent); });
  CHECK(ks.find(absent) == nullptr);

  CHECK(ks.list_own_pseudonyms(Role::kOwner).size() == 3);
  CHECK(ks.list_own_pseudonyms(Role::kConsumer).size() == 2);
  CHECK(ks.list_own_pseudonyms().size() == 5);

  crypto::Digest block{};
  block.fill(0xB1);
  ks.set_block_ref(p1, block);
  CHECK(ks.find_by_block(block) == &ks.lookup(p1));

  ks.erase_link(p1);
  CHECK(ks.list_own_pseudonyms(Role::kOwner).size() == 2);
  CHECK_FALSE(ks.lookup(p1).counterparty_identity.has_value());
  CHECK_FALSE(ks.lookup(p1).evidence.has_value());
  require_errc(Errc::kUnknownPseudonym, [&] { ks.erase_link(p1); });
  require_errc(Errc::kUnknownPseudonym, [&] { ks.erase_link(absent); });
}

TEST_CASE("record_entry checks the key pair") {
  KeyStore ks(fixed_master(), 2048);
  KeyStoreEntry e;
  e.key_pair = p3::test::test_key(0);
  e.pseudonym.digest.fill(3);
  require_errc(Errc::kInvalidArgument, [&] { ks.record_entry(e); });
  e.pseudonym = crypto::derive_pseudonym(e.key_pair->public_key);
  ks.record_entry(e);
}

TEST_CASE("erase policy for keys") {
  KeyStore ks(fixed_master(), 2048);
  std::uint64_t i0 = 0, i1 = 0;
  auto k0 = ks.next_subkey(&i0);
  auto k1 = ks.next_subkey(&i1);
  KeyStoreEntry e0{crypto::derive_pseudonym(k0.public_key), k0, {}, "carol", Role::kOwner,
                   Bytes{1, 2}, i0, false};
  KeyStoreEntry e1{crypto::derive_pseudonym(k1.public_key), k1, {}, "carol", Role::kOwner,
                   Bytes{1, 2}, i1, false};
  ks.record_entry(e0);
  ks.record_entry(e1);
  ks.erase_link(e0.pseudonym);
  ks.erase_link(e1.pseudonym, /*keep_keys=*/true);
  CHECK_FALSE(ks.lookup(e0.pseudonym).key_pair.has_value());
  CHECK_FALSE(ks.lookup(e0.pseudonym).derivation_index.has_value());
  CHECK(ks.lookup(e1.pseudonym).key_pair.has_value());
  // The index stays reserved so the erased key is never handed out again.
  CHECK(ks.index_used(i0));
}

TEST_CASE("persisted store holds no trace of an erased identity") {
  KeyStore ks(fixed_master(), 2048);
  ks.record_entry(bare_entry(1, Role::kOwner, "erin-the-consumer"));
  ks.record_entry(bare_entry(2, Role::kConsumer, "frank-the-owner"));
  auto kp = ks.next_subkey();
  KeyStoreEntry keyed{crypto::derive_pseudonym(kp.public_key), kp, {}, "grace-the-peer",
                      Role::kOwner, to_bytes("evidence naming grace-the-peer"), 0, false};
  ks.record_entry(keyed);

  auto path = temp_path("p3_keystore_erase_test.p3ks");
  ks.save(path);
  auto before = read_file(path);
  CHECK(contains_subsequence(before, as_bytes("erin-the-consumer")));
  CHECK(contains_subsequence(before, as_bytes("grace-the-peer")));

  Pseudonym p1;
  p1.digest.fill(1);
  ks.erase_link(p1);
  ks.erase_link(keyed.pseudonym);
  ks.save(path);
  auto after = read_file(path);
  CHECK_FALSE(contains_subsequence(after, as_bytes("erin-the-consumer")));
  CHECK_FALSE(contains_subsequence(after, as_bytes("grace-the-peer")));
  CHECK_FALSE(contains_subsequence(after, Bytes(64, 1)));  // evidence of entry 1
  CHECK_FALSE(contains_subsequence(after, kp.private_key.components().d));
  CHECK(contains_subsequence(after, as_bytes("frank-the-owner")));
  CHECK_FALSE(std::filesystem::exists(path.string() + ".tmp"));

  auto loaded = KeyStore::load(path);
  CHECK(loaded.serialize() == after);
  CHECK(loaded.list_own_pseudonyms().size() == 1);
  std::filesystem::remove(path);
}

TEST_CASE("serialization round trip and determinism") {
  auto build = [] {
    KeyStore ks(fixed_master(), 2048);
    auto kp = ks.derive_subkey(7);
    KeyStoreEntry e{crypto::derive_pseudonym(kp.public_key), kp, {}, "heidi", Role::kConsumer,
                    Bytes{9, 9}, 7, false};
    crypto::Digest b{};
    b.fill(4);
    e.block_ref = b;
    ks.record_entry(e);
    ks.record_entry(bare_entry(5, Role::kOwner));
    return ks;
  };
  auto a = build().serialize();
  CHECK(a == build().serialize());
  auto back = KeyStore::deserialize(a);
  CHECK(back.serialize() == a);
  CHECK(back.index_used(7));
  CHECK(back.master() == build().master());
  CHECK_THROWS_AS(KeyStore::deserialize(as_bytes("P3KX")), DecodeError);
  auto trunc = a;
  trunc.resize(trunc.size() - 3);
  CHECK_THROWS_AS(KeyStore::deserialize(trunc), DecodeError);
}

TEST_CASE("master key shards") {
  KeyStore ks(fixed_master(3), 2048);
  auto original = ks.derive_subkey(5);
  Rng rng(7);
  auto shards = ks.export_shards(2, 3, rng);
  std::vector<crypto::KeyShard> pick{shards.shards[0], shards.shards[2]};
  auto restored = KeyStore::restore_from_shards(pick);
  CHECK(restored == ks.master());
  CHECK(derive_subkey(restored, 5, 2048).public_key == original.public_key);
  require_errc(Errc::kInsufficientShards,
               [&] { KeyStore::restore_from_shards(std::span(shards.shards).first(1)); });
}

// 10^3 key generations; registered under the "slow" label.
TEST_CASE("sub-key pseudonyms look like independent random strings" * doctest::skip(true)) {
  auto master = fixed_master(11);
  std::vector<Pseudonym> ps;
  for (std::uint64_t i = 0; i < 1000; ++i) {
    ps.push_back(crypto::derive_pseudonym(derive_subkey(master, i, 2048).public_key));
  }
  // Disjoint pairs are independent: each distance ~ Binomial(256, 1/2).
  double sum = 0;
  for (std::size_t i = 0; i + 1 < ps.size(); i += 2) sum += hamming(ps[i], ps[i + 1]);
  const double pairs = static_cast<double>(ps.size() / 2);
  const double mean = sum / pairs;
  const double sigma = 8.0 / std::sqrt(pairs);
  MESSAGE("disjoint-pair mean Hamming distance " << mean << " (3 sigma = " << 3 * sigma << ")");
  CHECK(std::abs(mean - 128.0) < 3 * sigma);

  double all = 0, all_sq = 0, n = 0;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    for (std::size_t j = i + 1; j < ps.size(); ++j) {
      const double d = hamming(ps[i], ps[j]);
      all += d;
      all_sq += d * d;
      n += 1;
    }
  }
  const double all_mean = all / n;
  const double var = all_sq / n - all_mean * all_mean;
  MESSAGE("all-pairs mean " << all_mean << " variance " << var);
  CHECK(std::abs(all_mean - 128.0) < 1.0);
  CHECK(std::abs(var - 64.0) < 6.4);
}
