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

#include <filesystem>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "p3/error.hpp"
#include "p3/keystore/keystore.hpp"
#include "p3/ledger/block.hpp"

namespace p3::ledger {

// A validated-on-append sequence of blocks starting at the genesis block.
// Copies are independent snapshots.
class Chain {
 public:
  explicit Chain(int difficulty = kDefaultDifficulty);

  // No validation; used for decoding and for building deliberately broken
  // chains in tests. The first block is taken as is.
  static Chain from_blocks(std::vector<Block> blocks, int difficulty);

  int difficulty() const { return difficulty_; }
  const std::vector<Block>& blocks() const { return blocks_; }
  const std::vector<Digest>& hashes() const { return hashes_; }
  // Block count including genesis.
  std::size_t length() const { return blocks_.size(); }
  const Digest& tip_hash() const { return hashes_.back(); }

  // Throws Errc::kInvalidBlock unless b links to the tip and meets the
  // difficulty.
  void append_block(Block b);

  // "P3LG" || u16 version || u8 difficulty || len32-prefixed blocks.
  Bytes serialize() const;
  static Chain parse(ByteView data);
  void save(const std::filesystem::path& path) const;
  static Chain load(const std::filesystem::path& path);

 private:
  int difficulty_;
  std::vector<Block> blocks_;
  std::vector<Digest> hashes_;
};

struct ValidationError {
  enum class Kind { kBadGenesis, kBrokenLink, kInsufficientWork, kTipMismatch };
  std::size_t index = 0;
  Kind kind = Kind::kBadGenesis;
};

std::string_view validation_kind_name(ValidationError::Kind k);

// Empty result means valid: the genesis block matches, each prev_hash links
// to its predecessor and every non-genesis hash meets the difficulty. With
// `anchor`, the tip hash must also equal it (kTipMismatch); this is how a
// node checks a stored copy against the tip its peers agree on.
std::optional<ValidationError> validate_chain(const Chain& c,
                                              const std::optional<Digest>& anchor = {});

// Longest valid chain wins; ties and invalid remotes keep local.
const Chain& choose_chain(const Chain& local, const Chain& remote);

// Blocks (with their index) naming p as consumer or owner pseudonym.
std::vector<std::pair<std::size_t, Block>> query_by_pseudonym(const Chain& c,
                                                              const Pseudonym& p);

struct OwnEntry {
  enum class Status { kOk, kNoKey, kAuthenticationFailure, kMalformed };
  std::size_t block_index = 0;
  Pseudonym pseudonym;
  keystore::Role role = keystore::Role::kOwner;
  Status status = Status::kOk;
  std::optional<UsageRecord> record;
};

std::string_view own_entry_status_name(OwnEntry::Status s);

// For every store entry (erased stubs included) whose pseudonym is on the
// chain, decrypts the copy meant for that role. Failures are reported per
// entry.
std::vector<OwnEntry> read_own_entries(const Chain& c, const keystore::KeyStore& store);

}  // namespace p3::ledger
