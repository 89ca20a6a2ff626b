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
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "p3/keystore/keystore.hpp"
#include "p3/ledger/chain.hpp"
#include "p3/node/claim.hpp"
#include "p3/protocol/session.hpp"
#include "p3/protocol/wire.hpp"

namespace p3::node {

using crypto::Digest;
using crypto::Pseudonym;
using ledger::DatumId;
using protocol::SessionId;

struct NodeConfig {
  std::string identity_id;
  int key_bits = crypto::kDefaultKeyBits;
  std::uint32_t n_min = 4;
  std::uint32_t n_max = 12;
  int difficulty = ledger::kDefaultDifficulty;
  // Publication: a uniform delay in [0, delta_max] ticks, or, when
  // wait_for_k > 0, until that many foreign blocks were seen (bounded by
  // wait_timeout ticks).
  std::int64_t delta_max = 0;
  std::uint32_t wait_for_k = 0;
  std::int64_t wait_timeout = 200;
  // Decoy sessions per tick.
  double fake_rate = 0.0;
  std::uint32_t slow_iterations = crypto::kDefaultSlowIterations;
  std::size_t fake_datum_size = 256;
  // Acknowledges erasure requests without erasing.
  bool adversarial = false;
  bool erase_keep_keys = false;

  // Throws Errc::kScenario for unknown keys and malformed values.
  void set(std::string_view key, std::string_view value);
  // One `key = value` per line; '#' starts a comment.
  static NodeConfig parse(std::string_view text);
  protocol::OwnerPolicy owner_policy() const;
};

// What a node needs from its surroundings. Implemented by the simulator.
class Network {
 public:
  virtual ~Network() = default;
  virtual std::int64_t now() const = 0;
  virtual void send(const std::string& from, const std::string& to, Bytes wire) = 0;
  virtual void schedule(const std::string& node, std::int64_t delay, std::function<void()> fn) = 0;
};

// Result of a request this node made as consumer.
struct RequestOutcome {
  SessionId session_id{};
  std::string owner;
  DatumId datum_id{};
  bool fake = false;
  bool success = false;
  std::optional<Errc> error;
  std::string detail;
  Bytes datum;
  Pseudonym pseudonym;  // own one-time pseudonym
  std::int64_t started = 0;
  std::int64_t finished = 0;
};

// A session this node served as owner.
struct ServedSession {
  SessionId session_id{};
  std::string consumer;
  DatumId datum_id{};
  bool fake = false;
  bool completed = false;
  std::uint32_t n = 0;
  std::int64_t started = 0;
  std::int64_t finished = 0;
  std::optional<Pseudonym> consumer_pseudonym;
  std::optional<Pseudonym> owner_pseudonym;
};

// A block this node created, with its publication history.
struct OwnBlock {
  SessionId session_id{};
  ledger::BlockPayload payload;
  std::int64_t completed_at = 0;
  std::optional<std::int64_t> announced_at;
  std::vector<Digest> hashes;  // every mined version
  std::uint32_t foreign_seen = 0;
};

enum class ErasureStatus { kPending, kAcknowledged, kRefused };

struct ErasureRecord {
  std::string requester;
  std::string counterparty;
  Pseudonym pseudonym;
  ErasureStatus status = ErasureStatus::kPending;
  bool erased_locally = false;
  std::string detail;
};

class Node {
 public:
  // Generates the identity key and master seed from rng.
  Node(NodeConfig config, Rng rng, Network& net);
  Node(NodeConfig config, protocol::Identity identity, keystore::MasterKey master, Rng rng,
       Network& net);

  Node(const Node&) = delete;
  Node& operator=(const Node&) = delete;

  const std::string& id() const { return identity_.id; }
  const protocol::Identity& identity() const { return identity_; }
  const NodeConfig& config() const { return config_; }

  // Throws Errc::kInvalidArgument on a pin conflict. Gossip goes to every
  // pinned peer unless set_neighbors restricts it.
  void pin_peer(const std::string& id, const crypto::PublicKey& key);
  void set_neighbors(std::vector<std::string> neighbors);
  const protocol::PinnedKeys& trust() const { return trust_; }

  // Throws Errc::kInvalidArgument for the reserved decoy id.
  void put_datum(const DatumId& id, Bytes datum);
  std::optional<Bytes> datum(const DatumId& id) const;

  // Arms and disarms the decoy scheduler.
  void start();
  void stop() { started_ = false; }

  // Starts a consumer session; the result lands in outcomes(). Throws
  // Errc::kUnknownIdentity when the owner is not pinned.
  SessionId request_datum(const std::string& owner_id, const DatumId& datum_id,
                          std::string purpose);
  SessionId request_fake(const std::string& owner_id);

  // Asks the counterparty of one of this node's pseudonyms to drop its
  // link. Throws Errc::kUnknownPseudonym or Errc::kNoEvidence when no
  // counterparty is on record.
  void request_erasure(const Pseudonym& own_pseudonym);

  // Claim that the counterparty behind `counterparty_pseudonym` is a given
  // identity, backed by stored owner evidence. Throws Errc::kNoEvidence.
  IdentityClaim claim_identity_link(const Pseudonym& counterparty_pseudonym) const;

  void deliver(const std::string& from, ByteView wire);

  void crash();
  void restore();
  bool crashed() const { return crashed_; }

  const keystore::KeyStore& keystore() const { return store_; }
  ledger::Chain chain() const;
  Digest tip() const { return tip_; }
  std::size_t height() const;
  bool knows_block(const Digest& h) const { return tree_.contains(h); }

  Bytes store_file() const { return store_.serialize(); }
  Bytes chain_file() const { return chain().serialize(); }

  const std::vector<RequestOutcome>& outcomes() const { return outcomes_; }
  const std::vector<ServedSession>& served() const { return served_; }
  const std::vector<OwnBlock>& own_blocks() const { return own_blocks_; }
  const std::vector<ErasureRecord>& erasures() const { return erasures_; }
  std::size_t rejected_messages() const { return rejected_; }
  std::size_t open_sessions() const { return owner_sessions_.size() + consumer_sessions_.size(); }

  // Draws one publication delay under the delay policy.
  static std::int64_t draw_publish_delay(std::int64_t delta_max, Rng& rng);

 private:
  struct TreeNode {
    ledger::Block block;
    std::size_t height = 0;
  };
  struct ConsumerState {
    protocol::ConsumerSession session;
    std::uint64_t step = 0;  // bumps on every message, stale timers see a mismatch
    std::size_t outcome = 0;
  };
  struct OwnerState {
    protocol::OwnerSession session;
    std::size_t served = 0;
  };
  struct ErasureChallenge {
    Bytes nonce;
    std::string requester;
  };

  void init();
  void send(const std::string& to, protocol::MsgType type, const SessionId& sid, Bytes body);
  void after(std::int64_t delay, std::function<void()> fn);
  const std::vector<std::string>& gossip_targets() const;

  void on_request(const std::string& from, const protocol::Envelope& e);
  void on_accept(const std::string& from, const protocol::Envelope& e);
  void on_share(const std::string& from, const protocol::Envelope& e);
  void on_ack(const std::string& from, const protocol::Envelope& e);
  void on_end(const std::string& from, const protocol::Envelope& e);
  void on_block(const std::string& from, const protocol::Envelope& e);
  void on_erase_request(const std::string& from, const protocol::Envelope& e);
  void on_erase_ack(const std::string& from, const protocol::Envelope& e);

  SessionId start_session(const std::string& owner_id, const DatumId& datum_id,
                          std::string purpose);
  void consumer_fail(const SessionId& sid, Errc code);
  void arm_consumer_timer(const SessionId& sid);
  void arm_owner_timer(const SessionId& sid, std::uint32_t x);
  void owner_complete(OwnerState& st, const protocol::EndMessage& end);

  void schedule_publication(std::size_t own_index);
  void publish(std::size_t own_index);
  void enqueue_mining(std::size_t own_index);
  void drain_mining_queue();
  bool in_best_chain(std::size_t own_index) const;
  void mine_and_announce(std::size_t own_index);
  void schedule_next_fake();

  // Returns true when the block was new.
  bool add_block(const ledger::Block& b, const std::string& from);
  void adopt_best_tip();
  void on_tip_changed();
  void refresh_block_refs();
  void announce(const ledger::Block& b, const std::string& except);
  void request_block(const std::string& peer, const Digest& h);

  const keystore::KeyStoreEntry* entry_for_counterpart(const Pseudonym& counterpart) const;
  std::optional<Pseudonym> counterpart_of(const keystore::KeyStoreEntry& e) const;

  NodeConfig config_;
  protocol::Identity identity_;
  Rng rng_;
  Network& net_;
  keystore::KeyStore store_;
  protocol::PinnedKeys trust_;
  std::vector<std::string> peers_;
  std::optional<std::vector<std::string>> neighbors_;
  std::map<DatumId, Bytes> datums_;

  std::map<SessionId, ConsumerState> consumer_sessions_;
  std::map<SessionId, OwnerState> owner_sessions_;

  std::map<Digest, TreeNode> tree_;
  std::multimap<Digest, ledger::Block> orphans_;  // keyed by missing parent
  Digest tip_{};
  std::vector<Digest> best_path_;
  std::set<Digest> best_set_;

  std::vector<OwnBlock> own_blocks_;
  std::vector<std::size_t> waiting_publication_;
  std::deque<std::size_t> mining_queue_;
  std::set<Digest> own_hashes_;
  std::vector<RequestOutcome> outcomes_;
  std::vector<ServedSession> served_;
  std::vector<ErasureRecord> erasures_;
  std::map<Pseudonym, ErasureChallenge> erase_challenges_;
  std::map<Pseudonym, std::size_t> erase_pending_;  // own pseudonym -> erasures_ index
  std::string last_purpose_;

  bool crashed_ = false;
  bool started_ = false;
  std::uint64_t epoch_ = 0;
  std::size_t rejected_ = 0;
};

}  // namespace p3::node
