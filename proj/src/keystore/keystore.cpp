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

#include "p3/keystore/keystore.hpp"

#include "p3/crypto/hash.hpp"
#include "p3/error.hpp"
#include "p3/io.hpp"

namespace p3::keystore {

namespace {

constexpr std::string_view kMagic = "P3KS";
constexpr std::uint16_t kVersion = 1;

constexpr std::uint8_t kRecordMaster = 1;
constexpr std::uint8_t kRecordEntry = 2;

enum : std::uint8_t {
  kHasBlock = 1 << 0,
  kHasCounterparty = 1 << 1,
  kHasEvidence = 1 << 2,
  kHasKeys = 1 << 3,
  kHasIndex = 1 << 4,
  kErased = 1 << 5,
};

Bytes master_secret(const MasterKey& m) {
  ByteWriter w;
  w.raw(m.seed);
  w.u64(static_cast<std::uint64_t>(m.creation_time));
  return std::move(w).take();
}

}  // namespace

std::string_view role_name(Role r) {
  return r == Role::kOwner ? "owner" : "consumer";
}

MasterKey make_master(const Seed& seed, std::int64_t creation_time) {
  if (std::all_of(seed.begin(), seed.end(), [](auto b) { return b == 0; })) {
    throw Error(Errc::kInvalidArgument, "master seed must be non-zero");
  }
  return {seed, creation_time};
}

MasterKey generate_master(Rng& rng, std::int64_t creation_time) {
  Seed s{};
  do {
    rng.fill(s);
  } while (std::all_of(s.begin(), s.end(), [](auto b) { return b == 0; }));
  return {s, creation_time};
}

Seed subkey_seed(const MasterKey& master, std::uint64_t index) {
  ByteWriter w;
  w.u64(index);
  return crypto::blake2s_keyed(master.seed, w.bytes());
}

KeyPair derive_subkey(const MasterKey& master, std::uint64_t index, int bits) {
  return crypto::generate_keypair(bits, subkey_seed(master, index));
}

KeyStore::KeyStore(MasterKey master, int key_bits)
    : master_(master), key_bits_(key_bits) {
  if (!crypto::is_supported_key_bits(key_bits)) {
    throw Error(Errc::kUnsupportedBits, std::to_string(key_bits));
  }
}

KeyPair KeyStore::derive_subkey(std::uint64_t index) {
  if (used_.contains(index)) {
    throw Error(Errc::kIndexReuse, "sub-key index " + std::to_string(index));
  }
  auto kp = keystore::derive_subkey(master_, index, key_bits_);
  used_.insert(index);
  return kp;
}

KeyPair KeyStore::next_subkey(std::uint64_t* index_out) {
  std::uint64_t index = 0;
  for (auto u : used_) {
    if (u != index) break;
    ++index;
  }
  if (index_out) *index_out = index;
  return derive_subkey(index);
}

void KeyStore::record_entry(KeyStoreEntry entry) {
  if (by_pseudonym_.contains(entry.pseudonym)) {
    throw Error(Errc::kDuplicatePseudonym, entry.pseudonym.hex());
  }
  if (entry.key_pair &&
      crypto::derive_pseudonym(entry.key_pair->public_key) != entry.pseudonym) {
    throw Error(Errc::kInvalidArgument, "pseudonym does not match key pair");
  }
  by_pseudonym_.emplace(entry.pseudonym, entries_.size());
  entries_.push_back(std::move(entry));
}

const KeyStoreEntry* KeyStore::find(const Pseudonym& p) const {
  auto it = by_pseudonym_.find(p);
  return it == by_pseudonym_.end() ? nullptr : &entries_[it->second];
}

const KeyStoreEntry& KeyStore::lookup(const Pseudonym& p) const {
  const auto* e = find(p);
  if (!e) throw Error(Errc::kNotFound, "pseudonym " + p.hex());
  return *e;
}

const KeyStoreEntry* KeyStore::find_by_block(const Digest& block_ref) const {
  for (const auto& e : entries_) {
    if (e.block_ref && *e.block_ref == block_ref) return &e;
  }
  return nullptr;
}

KeyStoreEntry& KeyStore::mutable_entry(const Pseudonym& p) {
  auto it = by_pseudonym_.find(p);
  if (it == by_pseudonym_.end()) throw Error(Errc::kNotFound, "pseudonym " + p.hex());
  return entries_[it->second];
}

void KeyStore::set_block_ref(const Pseudonym& p, const Digest& block_ref) {
  mutable_entry(p).block_ref = block_ref;
}

void KeyStore::set_evidence(const Pseudonym& p, Bytes evidence) {
  auto& e = mutable_entry(p);
  if (e.erased) throw Error(Errc::kUnknownPseudonym, "entry was erased");
  e.evidence = std::move(evidence);
}

std::vector<Pseudonym> KeyStore::list_own_pseudonyms(std::optional<Role> role) const {
  std::vector<Pseudonym> out;
  for (const auto& e : entries_) {
    if (e.erased) continue;
    if (role && e.role != *role) continue;
    out.push_back(e.pseudonym);
  }
  return out;
}

void KeyStore::erase_link(const Pseudonym& p, bool keep_keys) {
  auto it = by_pseudonym_.find(p);
  if (it == by_pseudonym_.end() || entries_[it->second].erased) {
    throw Error(Errc::kUnknownPseudonym, p.hex());
  }
  auto& e = entries_[it->second];
  e.counterparty_identity.reset();
  e.evidence.reset();
  if (!keep_keys) {
    e.key_pair.reset();
    e.derivation_index.reset();
  }
  e.erased = true;
}

crypto::KeyShards KeyStore::export_shards(int k, int m, Rng& rng) const {
  return crypto::split_master(master_secret(master_), k, m, rng);
}

MasterKey KeyStore::restore_from_shards(std::span<const crypto::KeyShard> shards) {
  auto secret = crypto::recover_master(shards);
  ByteReader r(secret);
  auto seed = r.array<32>();
  auto time = static_cast<std::int64_t>(r.u64());
  r.expect_done();
  return make_master(seed, time);
}

Bytes KeyStore::serialize() const {
  ByteWriter w;
  w.raw(kMagic);
  w.u16(kVersion);

  ByteWriter m;
  m.u8(kRecordMaster);
  m.raw(master_.seed);
  m.u64(static_cast<std::uint64_t>(master_.creation_time));
  m.u16(static_cast<std::uint16_t>(key_bits_));
  m.u32(static_cast<std::uint32_t>(used_.size()));
  for (auto i : used_) m.u64(i);
  w.var32(m.bytes());

  for (const auto& e : entries_) {
    ByteWriter r;
    r.u8(kRecordEntry);
    r.raw(e.pseudonym.digest);
    r.u8(static_cast<std::uint8_t>(e.role));
    std::uint8_t flags = 0;
    if (e.block_ref) flags |= kHasBlock;
    if (e.counterparty_identity) flags |= kHasCounterparty;
    if (e.evidence) flags |= kHasEvidence;
    if (e.key_pair) flags |= kHasKeys;
    if (e.derivation_index) flags |= kHasIndex;
    if (e.erased) flags |= kErased;
    r.u8(flags);
    if (e.block_ref) r.raw(*e.block_ref);
    if (e.counterparty_identity) r.var16(*e.counterparty_identity);
    if (e.evidence) r.var32(*e.evidence);
    if (e.key_pair) r.var32(e.key_pair->encode());
    if (e.derivation_index) r.u64(*e.derivation_index);
    w.var32(r.bytes());
  }
  return std::move(w).take();
}

KeyStore KeyStore::deserialize(ByteView data) {
  ByteReader r(data);
  if (r.remaining() < kMagic.size() ||
      !std::equal(kMagic.begin(), kMagic.end(), r.raw(kMagic.size()).begin())) {
    throw DecodeError("not a key store file");
  }
  if (r.u16() != kVersion) throw DecodeError("unsupported key store version");

  ByteReader m(r.var32());
  if (m.u8() != kRecordMaster) throw DecodeError("key store must start with the master");
  MasterKey master{m.array<32>(), static_cast<std::int64_t>(m.u64())};
  KeyStore store(master, m.u16());
  for (std::uint32_t n = m.u32(); n > 0; --n) store.used_.insert(m.u64());
  m.expect_done();

  while (!r.done()) {
    ByteReader e(r.var32());
    if (e.u8() != kRecordEntry) throw DecodeError("unknown key store record");
    KeyStoreEntry entry;
    entry.pseudonym.digest = e.array<32>();
    auto role = e.u8();
    if (role != 1 && role != 2) throw DecodeError("bad role");
    entry.role = static_cast<Role>(role);
    auto flags = e.u8();
    if (flags & kHasBlock) entry.block_ref = e.array<32>();
    if (flags & kHasCounterparty) entry.counterparty_identity = e.str16();
    if (flags & kHasEvidence) {
      auto v = e.var32();
      entry.evidence = Bytes(v.begin(), v.end());
    }
    if (flags & kHasKeys) entry.key_pair = KeyPair::decode(e.var32());
    if (flags & kHasIndex) entry.derivation_index = e.u64();
    entry.erased = (flags & kErased) != 0;
    e.expect_done();
    store.record_entry(std::move(entry));
  }
  return store;
}

void KeyStore::save(const std::filesystem::path& path, const StoreSealer* sealer) const {
  auto bytes = serialize();
  if (sealer && sealer->seal) bytes = sealer->seal(bytes);
  write_file_atomic(path, bytes);
}

KeyStore KeyStore::load(const std::filesystem::path& path, const StoreSealer* sealer) {
  auto bytes = read_file(path);
  if (sealer && sealer->open) bytes = sealer->open(bytes);
  return deserialize(bytes);
}

}  // namespace p3::keystore
