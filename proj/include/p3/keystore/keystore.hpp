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
#include <filesystem>
#include <functional>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "p3/bytes.hpp"
#include "p3/crypto/pseudonym.hpp"
#include "p3/crypto/rsa.hpp"
#include "p3/crypto/shamir.hpp"
#include "p3/rng.hpp"

namespace p3::keystore {

using crypto::Digest;
using crypto::KeyPair;
using crypto::Pseudonym;

enum class Role : std::uint8_t { kOwner = 1, kConsumer = 2 };

std::string_view role_name(Role r);

struct MasterKey {
  Seed seed{};
  std::int64_t creation_time = 0;

  friend bool operator==(const MasterKey&, const MasterKey&) = default;
};

// Throws Errc::kInvalidArgument for an all-zero seed.
MasterKey make_master(const Seed& seed, std::int64_t creation_time);
MasterKey generate_master(Rng& rng, std::int64_t creation_time);

// Generation seed for sub-key `index`: keyed BLAKE2s(master.seed, be64(index)).
Seed subkey_seed(const MasterKey& master, std::uint64_t index);

// Pure derivation; does not track index use (see KeyStore::derive_subkey).
KeyPair derive_subkey(const MasterKey& master, std::uint64_t index, int bits);

struct KeyStoreEntry {
  Pseudonym pseudonym;
  std::optional<KeyPair> key_pair;
  std::optional<Digest> block_ref;
  std::optional<std::string> counterparty_identity;
  Role role = Role::kOwner;
  // Opaque, encoded evidence owned by the protocol layer.
  std::optional<Bytes> evidence;
  std::optional<std::uint64_t> derivation_index;
  // Set by erase_link. What remains is {pseudonym, role, block_ref} plus the
  // key pair when the caller asked to keep it.
  bool erased = false;
};

// Optional transform applied to the serialized store before it reaches
// disk, e.g. password-based encryption. None is provided.
struct StoreSealer {
  std::function<Bytes(ByteView)> seal;
  std::function<Bytes(ByteView)> open;
};

// Per-node private key store. Single writer; the serialized form is a pure
// function of the operation sequence.
class KeyStore {
 public:
  KeyStore(MasterKey master, int key_bits);

  const MasterKey& master() const { return master_; }
  int key_bits() const { return key_bits_; }

  // Throws Errc::kIndexReuse if `index` was handed out before.
  KeyPair derive_subkey(std::uint64_t index);
  // Smallest unused index; written to *index_out when given.
  KeyPair next_subkey(std::uint64_t* index_out = nullptr);
  bool index_used(std::uint64_t index) const { return used_.contains(index); }
  const std::set<std::uint64_t>& used_indices() const { return used_; }

  // Throws Errc::kDuplicatePseudonym; the entry's pseudonym must match its
  // key pair when one is present (Errc::kInvalidArgument otherwise).
  void record_entry(KeyStoreEntry entry);

  // Throws Errc::kNotFound. Erased stubs are found too.
  const KeyStoreEntry& lookup(const Pseudonym& p) const;
  const KeyStoreEntry* find(const Pseudonym& p) const;
  const KeyStoreEntry* find_by_block(const Digest& block_ref) const;

  void set_block_ref(const Pseudonym& p, const Digest& block_ref);
  void set_evidence(const Pseudonym& p, Bytes evidence);

  // Non-erased pseudonyms in insertion order.
  std::vector<Pseudonym> list_own_pseudonyms(std::optional<Role> role = std::nullopt) const;

  // All entries including erased stubs, insertion order.
  const std::vector<KeyStoreEntry>& entries() const { return entries_; }

  // Removes the counterparty identity, the evidence and (unless keep_keys)
  // the key pair and its derivation index. Throws Errc::kUnknownPseudonym
  // for absent or already erased pseudonyms.
  void erase_link(const Pseudonym& p, bool keep_keys = false);

  crypto::KeyShards export_shards(int k, int m, Rng& rng) const;
  static MasterKey restore_from_shards(std::span<const crypto::KeyShard> shards);

  Bytes serialize() const;
  static KeyStore deserialize(ByteView data);

  // Write-new-then-rename.
  void save(const std::filesystem::path& path, const StoreSealer* sealer = nullptr) const;
  static KeyStore load(const std::filesystem::path& path,
                       const StoreSealer* sealer = nullptr);

 private:
  KeyStoreEntry& mutable_entry(const Pseudonym& p);

  MasterKey master_;
  int key_bits_;
  std::set<std::uint64_t> used_;
  std::vector<KeyStoreEntry> entries_;
  std::unordered_map<Pseudonym, std::size_t> by_pseudonym_;
};

}  // namespace p3::keystore
