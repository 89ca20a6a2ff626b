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

#include "p3/ledger/chain.hpp"

#include "p3/io.hpp"

namespace p3::ledger {

namespace {
constexpr std::string_view kMagic = "P3LG";
constexpr std::uint16_t kVersion = 1;
}  // namespace

Chain::Chain(int difficulty) : difficulty_(difficulty) {
  if (difficulty < 0 || difficulty > kMaxDifficulty) {
    throw Error(Errc::kInvalidArgument, "difficulty out of range");
  }
  blocks_.push_back(genesis_block());
  hashes_.push_back(genesis_hash());
}

Chain Chain::from_blocks(std::vector<Block> blocks, int difficulty) {
  Chain c(difficulty);
  c.blocks_ = std::move(blocks);
  c.hashes_.clear();
  for (const auto& b : c.blocks_) c.hashes_.push_back(block_hash(b));
  if (c.blocks_.empty()) throw DecodeError("chain has no genesis block");
  return c;
}

void Chain::append_block(Block b) {
  if (b.prev_hash != tip_hash()) {
    throw Error(Errc::kInvalidBlock, "block does not extend the tip");
  }
  auto h = block_hash(b);
  if (!meets_difficulty(h, difficulty_)) {
    throw Error(Errc::kInvalidBlock, "insufficient work");
  }
  blocks_.push_back(std::move(b));
  hashes_.push_back(h);
}

Bytes Chain::serialize() const {
  ByteWriter w;
  w.raw(kMagic);
  w.u16(kVersion);
  w.u8(static_cast<std::uint8_t>(difficulty_));
  for (const auto& b : blocks_) w.var32(b.serialize());
  return std::move(w).take();
}

Chain Chain::parse(ByteView data) {
  ByteReader r(data);
  if (r.remaining() < kMagic.size() ||
      !std::equal(kMagic.begin(), kMagic.end(), r.raw(kMagic.size()).begin())) {
    throw DecodeError("not a chain file");
  }
  if (r.u16() != kVersion) throw DecodeError("unsupported chain version");
  int difficulty = r.u8();
  if (difficulty > kMaxDifficulty) throw DecodeError("difficulty out of range");
  std::vector<Block> blocks;
  while (!r.done()) blocks.push_back(Block::parse(r.var32()));
  return from_blocks(std::move(blocks), difficulty);
}

void Chain::save(const std::filesystem::path& path) const {
  write_file_atomic(path, serialize());
}

Chain Chain::load(const std::filesystem::path& path) { return parse(read_file(path)); }

std::string_view validation_kind_name(ValidationError::Kind k) {
  switch (k) {
    case ValidationError::Kind::kBadGenesis: return "bad-genesis";
    case ValidationError::Kind::kBrokenLink: return "broken-link";
    case ValidationError::Kind::kInsufficientWork: return "insufficient-work";
    case ValidationError::Kind::kTipMismatch: return "tip-mismatch";
  }
  return "unknown";
}

std::optional<ValidationError> validate_chain(const Chain& c,
                                              const std::optional<Digest>& anchor) {
  using Kind = ValidationError::Kind;
  const auto& blocks = c.blocks();
  if (blocks.empty() || !(blocks[0] == genesis_block())) {
    return ValidationError{0, Kind::kBadGenesis};
  }
  // Recompute rather than trust the cached hashes.
  Digest prev = genesis_hash();
  for (std::size_t i = 1; i < blocks.size(); ++i) {
    if (blocks[i].prev_hash != prev) return ValidationError{i, Kind::kBrokenLink};
    prev = block_hash(blocks[i]);
    if (!meets_difficulty(prev, c.difficulty())) {
      return ValidationError{i, Kind::kInsufficientWork};
    }
  }
  if (anchor && *anchor != prev) return ValidationError{blocks.size() - 1, Kind::kTipMismatch};
  return std::nullopt;
}

const Chain& choose_chain(const Chain& local, const Chain& remote) {
  if (remote.length() <= local.length()) return local;
  if (remote.difficulty() != local.difficulty()) return local;
  if (validate_chain(remote)) return local;
  return remote;
}

std::vector<std::pair<std::size_t, Block>> query_by_pseudonym(const Chain& c,
                                                              const Pseudonym& p) {
  std::vector<std::pair<std::size_t, Block>> out;
  const auto& blocks = c.blocks();
  for (std::size_t i = 1; i < blocks.size(); ++i) {
    const auto& pl = blocks[i].payload;
    if (pl.consumer_pseudonym == p || pl.owner_pseudonym == p) out.emplace_back(i, blocks[i]);
  }
  return out;
}

std::string_view own_entry_status_name(OwnEntry::Status s) {
  switch (s) {
    case OwnEntry::Status::kOk: return "ok";
    case OwnEntry::Status::kNoKey: return "undecryptable";
    case OwnEntry::Status::kAuthenticationFailure: return "authentication-failure";
    case OwnEntry::Status::kMalformed: return "malformed";
  }
  return "unknown";
}

std::vector<OwnEntry> read_own_entries(const Chain& c, const keystore::KeyStore& store) {
  std::vector<OwnEntry> out;
  for (const auto& e : store.entries()) {
    for (const auto& [index, block] : query_by_pseudonym(c, e.pseudonym)) {
      OwnEntry o;
      o.block_index = index;
      o.pseudonym = e.pseudonym;
      o.role = e.role;
      const bool owner_side = e.role == keystore::Role::kOwner;
      const auto& side_pseudonym = owner_side ? block.payload.owner_pseudonym
                                              : block.payload.consumer_pseudonym;
      const auto& ct = owner_side ? block.payload.enc_owner : block.payload.enc_consumer;
      if (side_pseudonym != e.pseudonym) {
        // The pseudonym sits on the other side of the block: not ours.
        o.status = OwnEntry::Status::kMalformed;
      } else if (!e.key_pair) {
        o.status = OwnEntry::Status::kNoKey;
      } else {
        try {
          o.record = open_record(e.key_pair->private_key, ct);
        } catch (const DecodeError&) {
          o.status = OwnEntry::Status::kMalformed;
        } catch (const Error& err) {
          if (err.code() != Errc::kAuthenticationFailure) throw;
          o.status = OwnEntry::Status::kAuthenticationFailure;
        }
      }
      out.push_back(std::move(o));
    }
  }
  return out;
}

}  // namespace p3::ledger
