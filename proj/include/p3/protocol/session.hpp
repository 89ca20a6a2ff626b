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

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "p3/crypto/slow_transform.hpp"
#include "p3/ledger/block.hpp"
#include "p3/protocol/messages.hpp"

namespace p3::protocol {

// A participant's long-term identity.
struct Identity {
  std::string id;
  crypto::KeyPair keys;
};

// Maps identity ids to long-term public keys.
class TrustStore {
 public:
  virtual ~TrustStore() = default;
  virtual std::optional<crypto::PublicKey> key_for(const std::string& id) const = 0;
};

// Static key pinning. A pin, once made, cannot change.
class PinnedKeys : public TrustStore {
 public:
  // Throws Errc::kInvalidArgument when `id` is already pinned to another key.
  void pin(const std::string& id, const crypto::PublicKey& key);
  std::optional<crypto::PublicKey> key_for(const std::string& id) const override;
  std::vector<std::string> ids() const;

 private:
  std::map<std::string, crypto::PublicKey> keys_;
};

struct OwnerPolicy {
  std::uint32_t n_min = 4;
  std::uint32_t n_max = 12;
  std::uint32_t slow_iterations = crypto::kDefaultSlowIterations;
  // Size of the random payload served for the decoy datum; match the
  // typical real datum so share sizes do not tell the two apart.
  std::size_t fake_datum_size = 256;
};

// Simulated time units an owner waits for each acknowledgment.
inline constexpr std::int64_t kStepTimeout = 30;

// A one-time key as used by a session. Decoy sessions only carry a public
// key (no block will ever be encrypted to it).
struct OneTimeKey {
  crypto::PublicKey public_key;
  std::optional<crypto::KeyPair> key_pair;
  std::optional<std::uint64_t> derivation_index;

  static OneTimeKey real(crypto::KeyPair kp, std::optional<std::uint64_t> index = {});
  static OneTimeKey decoy(int bits, Rng& rng);
};

// Random odd modulus of the requested size with e = 65537. Wire-identical
// to a real public key; nobody holds a private key for it.
crypto::PublicKey decoy_public_key(int bits, Rng& rng);

enum class SessionState { kAwaitingAccept, kRunning, kCompleted, kAborted };

std::string_view session_state_name(SessionState s);

struct ConsumerSession {
  SessionMeta meta;  // meta.n stays 0 until the end marker arrives
  std::string purpose;
  OneTimeKey consumer_onetime;
  Bytes owner_onetime_key;  // canonical, from the accept message
  Request request;
  std::optional<Accept> accept;
  std::vector<ShareMessage> shares;
  std::optional<AckMessage> last_ack;
  SessionState state = SessionState::kAwaitingAccept;
  bool fake = false;

  Pseudonym consumer_pseudonym() const;
  Pseudonym owner_pseudonym() const;
};

struct OwnerSession {
  SessionMeta meta;
  Request request;
  Accept accept;
  OneTimeKey owner_onetime;
  std::vector<Bytes> shares;  // precomputed parts
  std::uint32_t x = 0;        // shares sent so far
  std::optional<ShareMessage> last_share;
  std::optional<AckMessage> ack_n;
  SessionState state = SessionState::kRunning;
  bool fake = false;

  Pseudonym consumer_pseudonym() const;
  Pseudonym owner_pseudonym() const;
};

struct Completed {
  EndMessage end;
};

using DatumLookup = std::function<std::optional<Bytes>(const DatumId&)>;

// Fresh session id and label_t; the request is signed with the consumer's
// identity key. A request for the decoy datum marks the session fake.
std::pair<Request, ConsumerSession> consumer_start(const Identity& consumer,
                                                   const std::string& owner_id,
                                                   const DatumId& datum_id,
                                                   std::string purpose, OneTimeKey onetime,
                                                   Rng& rng);

// Throws Errc::kUnknownIdentity (consumer not trusted or request addressed
// to someone else), Errc::kInvalidSignature or Errc::kUnknownDatum. For
// the decoy datum a random payload stands in and the session is fake.
std::pair<Accept, OwnerSession> owner_accept(const Identity& owner, const TrustStore& trust,
                                             const DatumLookup& datums, const Request& request,
                                             const OwnerPolicy& policy, OneTimeKey onetime,
                                             Rng& rng);

// With ack == nullptr emits share 1 (only valid before any share was sent).
// Otherwise checks the acknowledgment of the last share and emits the next
// share, or Completed after ack_n. Any failure aborts the session and
// throws Errc::kBadAckSignature, Errc::kWrongStep or Errc::kSessionState.
std::variant<ShareMessage, Completed> owner_step(OwnerSession& s, const AckMessage* ack,
                                                 const crypto::PublicKey& consumer_identity,
                                                 const Identity& owner, Rng& rng);

// Silent abort: no evidence for either side beyond shares already sent.
void owner_timeout(OwnerSession& s);

// Throws Errc::kInvalidSignature or Errc::kSessionState.
void consumer_accept(ConsumerSession& s, const Accept& accept,
                     const crypto::PublicKey& owner_identity);

// Throws Errc::kBadShareSignature (signature, identities or label do not
// match the session), Errc::kWrongStep (x not contiguous) or
// Errc::kSessionState.
AckMessage consumer_step(ConsumerSession& s, const ShareMessage& share,
                         const crypto::PublicKey& owner_identity, const Identity& consumer,
                         Rng& rng);

struct ConsumerResult {
  Bytes datum;
  EvidenceConsumer evidence;
};

// Throws Errc::kInvalidSignature for a bad end marker, Errc::kWrongStep if
// it does not match the shares received and Errc::kChecksumMismatch when
// the shares do not compose to a well-formed datum.
ConsumerResult consumer_finalize(ConsumerSession& s, const EndMessage& end,
                                 const crypto::PublicKey& owner_identity);

// Composition without an end marker; what a consumer that stops early gets.
// Throws Errc::kChecksumMismatch.
Bytes compose_datum(const SessionMeta& meta, const std::vector<ShareMessage>& shares);

// Owner evidence; throws Errc::kSessionState unless completed.
EvidenceOwner owner_evidence(const OwnerSession& s);

ledger::UsageRecord make_usage_record(const OwnerSession& s, std::int64_t timestamp);

// Both pseudonyms plus the record encrypted once to each one-time key.
// Throws Errc::kSessionState unless completed and real.
ledger::Block build_block(const OwnerSession& s, const ledger::UsageRecord& usage,
                          const ledger::Digest& prev_hash, int difficulty, Rng& rng);
ledger::BlockPayload build_payload(const OwnerSession& s, const ledger::UsageRecord& usage,
                                   Rng& rng);

// True iff ack_n verifies under the consumer key and binds the digest of
// share n and label_t, and the rest of the evidence is consistent with it.
bool verify_evidence_owner(const EvidenceOwner& e, const crypto::PublicKey& consumer_identity);

// True iff every share verifies under the owner key, steps run 1..n, ids
// and label match, and the shares compose to expected_datum.
bool verify_evidence_consumer(const EvidenceConsumer& e, const crypto::PublicKey& owner_identity,
                              ByteView expected_datum);

}  // namespace p3::protocol
