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

#include "p3/protocol/session.hpp"

#include "p3/crypto/splitting.hpp"
#include "p3/error.hpp"

namespace p3::protocol {

namespace {

constexpr std::size_t kChecksumSize = 32;

// checksum || datum, where the checksum is BLAKE2s keyed with label_t over
// datum_id || datum. Lets the consumer tell a complete share set from an
// incomplete one.
Bytes with_checksum(const SessionMeta& meta, ByteView datum) {
  ByteWriter w;
  w.raw(crypto::blake2s_keyed(meta.label_t, {meta.datum_id, datum}));
  w.raw(datum);
  return std::move(w).take();
}

[[noreturn]] void abort_with(OwnerSession& s, Errc code, const std::string& what) {
  s.state = SessionState::kAborted;
  throw Error(code, what);
}

void require_state(SessionState actual, SessionState wanted, const char* op) {
  if (actual != wanted) {
    throw Error(Errc::kSessionState, std::string(op) + " in state " +
                                         std::string(session_state_name(actual)));
  }
}

bool share_matches(const ShareMessage& m, const SessionMeta& meta) {
  return m.owner_id == meta.owner_id && m.consumer_id == meta.consumer_id &&
         m.label_t == meta.label_t;
}

}  // namespace

void PinnedKeys::pin(const std::string& id, const crypto::PublicKey& key) {
  auto [it, inserted] = keys_.emplace(id, key);
  if (!inserted && !(it->second == key)) {
    throw Error(Errc::kInvalidArgument, "identity " + id + " is already pinned");
  }
}

std::optional<crypto::PublicKey> PinnedKeys::key_for(const std::string& id) const {
  auto it = keys_.find(id);
  if (it == keys_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::string> PinnedKeys::ids() const {
  std::vector<std::string> out;
  for (const auto& [id, key] : keys_) out.push_back(id);
  return out;
}

OneTimeKey OneTimeKey::real(crypto::KeyPair kp, std::optional<std::uint64_t> index) {
  OneTimeKey k;
  k.public_key = kp.public_key;
  k.key_pair = std::move(kp);
  k.derivation_index = index;
  return k;
}

OneTimeKey OneTimeKey::decoy(int bits, Rng& rng) {
  OneTimeKey k;
  k.public_key = decoy_public_key(bits, rng);
  return k;
}

crypto::PublicKey decoy_public_key(int bits, Rng& rng) {
  if (!crypto::is_supported_key_bits(bits)) {
    throw Error(Errc::kUnsupportedBits, std::to_string(bits));
  }
  Bytes n = rng.bytes(static_cast<std::size_t>(bits / 8));
  n.front() |= 0xC0;
  n.back() |= 0x01;
  return crypto::PublicKey(std::move(n), Bytes{0x01, 0x00, 0x01});
}

std::string_view session_state_name(SessionState s) {
  switch (s) {
    case SessionState::kAwaitingAccept: return "awaiting-accept";
    case SessionState::kRunning: return "running";
    case SessionState::kCompleted: return "completed";
    case SessionState::kAborted: return "aborted";
  }
  return "unknown";
}

Pseudonym ConsumerSession::consumer_pseudonym() const {
  return crypto::derive_pseudonym(consumer_onetime.public_key);
}

Pseudonym ConsumerSession::owner_pseudonym() const {
  if (owner_onetime_key.empty()) throw Error(Errc::kSessionState, "no accept yet");
  return crypto::derive_pseudonym(owner_onetime_key);
}

Pseudonym OwnerSession::consumer_pseudonym() const {
  return crypto::derive_pseudonym(request.consumer_onetime_key);
}

Pseudonym OwnerSession::owner_pseudonym() const {
  return crypto::derive_pseudonym(owner_onetime.public_key);
}

std::pair<Request, ConsumerSession> consumer_start(const Identity& consumer,
                                                   const std::string& owner_id,
                                                   const DatumId& datum_id,
                                                   std::string purpose, OneTimeKey onetime,
                                                   Rng& rng) {
  ConsumerSession s;
  s.meta.session_id = rng.array<16>();
  s.meta.consumer_id = consumer.id;
  s.meta.owner_id = owner_id;
  s.meta.datum_id = datum_id;
  s.meta.label_t = rng.array<16>();
  s.purpose = std::move(purpose);
  s.fake = datum_id == ledger::kFakeDatum;
  s.consumer_onetime = std::move(onetime);

  Request req;
  req.session_id = s.meta.session_id;
  req.datum_id = datum_id;
  req.label_t = s.meta.label_t;
  req.purpose = s.purpose;
  req.consumer_onetime_key = s.consumer_onetime.public_key.canonical();
  req.consumer_id = consumer.id;
  req.owner_id = owner_id;
  sign_message(req, consumer.keys.private_key, rng);
  s.request = req;
  return {std::move(req), std::move(s)};
}

std::pair<Accept, OwnerSession> owner_accept(const Identity& owner, const TrustStore& trust,
                                             const DatumLookup& datums, const Request& request,
                                             const OwnerPolicy& policy, OneTimeKey onetime,
                                             Rng& rng) {
  if (request.owner_id != owner.id) {
    throw Error(Errc::kUnknownIdentity, "request is addressed to " + request.owner_id);
  }
  auto consumer_key = trust.key_for(request.consumer_id);
  if (!consumer_key) throw Error(Errc::kUnknownIdentity, request.consumer_id);
  if (!verify_message(request, *consumer_key)) {
    throw Error(Errc::kInvalidSignature, "request signature");
  }
  try {
    crypto::PublicKey::from_canonical(request.consumer_onetime_key);
  } catch (const DecodeError&) {
    throw Error(Errc::kInvalidArgument, "malformed one-time key in request");
  }
  if (policy.n_min < 1 || policy.n_min > policy.n_max || policy.slow_iterations < 1) {
    throw Error(Errc::kInvalidArgument, "bad owner policy");
  }

  OwnerSession s;
  s.fake = request.datum_id == ledger::kFakeDatum;
  Bytes datum;
  if (s.fake) {
    datum = rng.bytes(policy.fake_datum_size);
  } else {
    auto found = datums ? datums(request.datum_id) : std::nullopt;
    if (!found) throw Error(Errc::kUnknownDatum, to_hex(request.datum_id));
    datum = std::move(*found);
  }

  s.meta.session_id = request.session_id;
  s.meta.consumer_id = request.consumer_id;
  s.meta.owner_id = owner.id;
  s.meta.datum_id = request.datum_id;
  s.meta.label_t = request.label_t;
  s.meta.n = static_cast<std::uint32_t>(rng.uniform(policy.n_min, policy.n_max));
  s.meta.slow_iterations = policy.slow_iterations;
  s.request = request;
  s.owner_onetime = std::move(onetime);

  auto sealed = crypto::slow_transform(with_checksum(s.meta, datum), policy.slow_iterations);
  s.shares = crypto::split_secret(sealed, s.meta.n, rng).parts;

  Accept acc;
  acc.session_id = request.session_id;
  acc.label_t = request.label_t;
  acc.owner_onetime_key = s.owner_onetime.public_key.canonical();
  acc.owner_id = owner.id;
  acc.consumer_id = request.consumer_id;
  acc.slow_iterations = policy.slow_iterations;
  sign_message(acc, owner.keys.private_key, rng);
  s.accept = acc;
  return {std::move(acc), std::move(s)};
}

std::variant<ShareMessage, Completed> owner_step(OwnerSession& s, const AckMessage* ack,
                                                 const crypto::PublicKey& consumer_identity,
                                                 const Identity& owner, Rng& rng) {
  require_state(s.state, SessionState::kRunning, "owner_step");
  if (ack == nullptr) {
    if (s.x != 0) abort_with(s, Errc::kWrongStep, "missing acknowledgment");
  } else {
    if (s.x == 0) abort_with(s, Errc::kWrongStep, "acknowledgment before any share");
    if (ack->x != s.x) abort_with(s, Errc::kWrongStep, "acknowledgment for another step");
    if (ack->label_t != s.meta.label_t || ack->share_digest != s.last_share->digest()) {
      abort_with(s, Errc::kBadAckSignature, "acknowledgment does not bind the last share");
    }
    if (!verify_message(*ack, consumer_identity)) {
      abort_with(s, Errc::kBadAckSignature, "acknowledgment signature");
    }
    if (s.x == s.meta.n) {
      s.ack_n = *ack;
      s.state = SessionState::kCompleted;
      EndMessage end;
      end.label_t = s.meta.label_t;
      end.n = s.meta.n;
      end.ack_digest = crypto::blake2s(ack->encode());
      sign_message(end, owner.keys.private_key, rng);
      return Completed{std::move(end)};
    }
  }
  ShareMessage m;
  m.x = s.x + 1;
  m.share = s.shares[s.x];
  m.owner_id = s.meta.owner_id;
  m.consumer_id = s.meta.consumer_id;
  m.label_t = s.meta.label_t;
  sign_message(m, owner.keys.private_key, rng);
  s.x = m.x;
  s.last_share = m;
  return m;
}

void owner_timeout(OwnerSession& s) {
  if (s.state == SessionState::kRunning) s.state = SessionState::kAborted;
}

void consumer_accept(ConsumerSession& s, const Accept& accept,
                     const crypto::PublicKey& owner_identity) {
  require_state(s.state, SessionState::kAwaitingAccept, "consumer_accept");
  if (accept.session_id != s.meta.session_id || accept.label_t != s.meta.label_t ||
      accept.owner_id != s.meta.owner_id || accept.consumer_id != s.meta.consumer_id ||
      !verify_message(accept, owner_identity)) {
    throw Error(Errc::kInvalidSignature, "accept does not verify for this session");
  }
  try {
    crypto::PublicKey::from_canonical(accept.owner_onetime_key);
  } catch (const DecodeError&) {
    throw Error(Errc::kInvalidSignature, "malformed one-time key in accept");
  }
  s.owner_onetime_key = accept.owner_onetime_key;
  s.meta.slow_iterations = accept.slow_iterations;
  s.accept = accept;
  s.state = SessionState::kRunning;
}

AckMessage consumer_step(ConsumerSession& s, const ShareMessage& share,
                         const crypto::PublicKey& owner_identity, const Identity& consumer,
                         Rng& rng) {
  require_state(s.state, SessionState::kRunning, "consumer_step");
  if (!share_matches(share, s.meta) || !verify_message(share, owner_identity)) {
    throw Error(Errc::kBadShareSignature, "share does not verify for this session");
  }
  if (share.x != s.shares.size() + 1) {
    throw Error(Errc::kWrongStep, "expected share " + std::to_string(s.shares.size() + 1) +
                                      ", got " + std::to_string(share.x));
  }
  s.shares.push_back(share);
  AckMessage ack;
  ack.x = share.x;
  ack.share_digest = share.digest();
  ack.label_t = s.meta.label_t;
  sign_message(ack, consumer.keys.private_key, rng);
  s.last_ack = ack;
  return ack;
}

Bytes compose_datum(const SessionMeta& meta, const std::vector<ShareMessage>& shares) {
  if (shares.empty() || meta.slow_iterations < 1) {
    throw Error(Errc::kChecksumMismatch, "nothing to compose");
  }
  std::vector<Bytes> parts;
  parts.reserve(shares.size());
  for (const auto& s : shares) parts.push_back(s.share);
  Bytes sealed;
  try {
    sealed = crypto::compose_shares(parts);
  } catch (const Error&) {
    throw Error(Errc::kChecksumMismatch, "shares do not compose");
  }
  auto inner = crypto::slow_transform_inverse(sealed, meta.slow_iterations);
  if (inner.size() < kChecksumSize) throw Error(Errc::kChecksumMismatch, "short datum");
  ByteView datum = ByteView(inner).subspan(kChecksumSize);
  if (with_checksum(meta, datum) != inner) {
    throw Error(Errc::kChecksumMismatch, "datum checksum");
  }
  return {datum.begin(), datum.end()};
}

ConsumerResult consumer_finalize(ConsumerSession& s, const EndMessage& end,
                                 const crypto::PublicKey& owner_identity) {
  require_state(s.state, SessionState::kRunning, "consumer_finalize");
  if (end.label_t != s.meta.label_t || !verify_message(end, owner_identity)) {
    throw Error(Errc::kInvalidSignature, "end marker");
  }
  if (end.n != s.shares.size() || !s.last_ack ||
      end.ack_digest != crypto::blake2s(s.last_ack->encode())) {
    throw Error(Errc::kWrongStep, "end marker does not match the exchange");
  }
  s.meta.n = end.n;
  ConsumerResult r;
  r.datum = compose_datum(s.meta, s.shares);
  r.evidence.meta = s.meta;
  r.evidence.accept = *s.accept;
  r.evidence.shares = s.shares;
  r.evidence.end = end;
  s.state = SessionState::kCompleted;
  return r;
}

EvidenceOwner owner_evidence(const OwnerSession& s) {
  require_state(s.state, SessionState::kCompleted, "owner_evidence");
  return {s.meta, s.request, s.accept, *s.last_share, *s.ack_n};
}

ledger::UsageRecord make_usage_record(const OwnerSession& s, std::int64_t timestamp) {
  ledger::UsageRecord u;
  u.datum_id = s.meta.datum_id;
  u.timestamp = timestamp;
  u.purpose = s.request.purpose;
  u.label_t = s.meta.label_t;
  u.counterpart_pseudonym = s.consumer_pseudonym();
  return u;
}

ledger::BlockPayload build_payload(const OwnerSession& s, const ledger::UsageRecord& usage,
                                   Rng& rng) {
  require_state(s.state, SessionState::kCompleted, "build_block");
  if (s.fake || !s.owner_onetime.key_pair) {
    throw Error(Errc::kSessionState, "decoy sessions produce no block");
  }
  auto consumer_key = crypto::PublicKey::from_canonical(s.request.consumer_onetime_key);
  return {s.consumer_pseudonym(), s.owner_pseudonym(),
          ledger::seal_record(consumer_key, usage, rng),
          ledger::seal_record(s.owner_onetime.public_key, usage, rng)};
}

ledger::Block build_block(const OwnerSession& s, const ledger::UsageRecord& usage,
                          const ledger::Digest& prev_hash, int difficulty, Rng& rng) {
  return ledger::mine_block(prev_hash, build_payload(s, usage, rng), difficulty, rng);
}

bool verify_evidence_owner(const EvidenceOwner& e, const crypto::PublicKey& consumer_identity) {
  const auto& m = e.meta;
  if (m.n < 1) return false;
  const auto& r = e.request;
  if (r.session_id != m.session_id || r.datum_id != m.datum_id || r.label_t != m.label_t ||
      r.consumer_id != m.consumer_id || r.owner_id != m.owner_id) {
    return false;
  }
  const auto& a = e.accept;
  if (a.session_id != m.session_id || a.label_t != m.label_t || a.owner_id != m.owner_id ||
      a.consumer_id != m.consumer_id) {
    return false;
  }
  if (e.final_share.x != m.n || !share_matches(e.final_share, m)) return false;
  if (e.ack_n.x != m.n || e.ack_n.label_t != m.label_t ||
      e.ack_n.share_digest != e.final_share.digest()) {
    return false;
  }
  return verify_message(r, consumer_identity) && verify_message(e.ack_n, consumer_identity);
}

bool verify_evidence_consumer(const EvidenceConsumer& e, const crypto::PublicKey& owner_identity,
                              ByteView expected_datum) {
  const auto& m = e.meta;
  if (m.n < 1 || e.shares.size() != m.n || e.end.n != m.n || e.end.label_t != m.label_t) {
    return false;
  }
  const auto& a = e.accept;
  if (a.session_id != m.session_id || a.label_t != m.label_t || a.owner_id != m.owner_id ||
      a.consumer_id != m.consumer_id || a.slow_iterations != m.slow_iterations) {
    return false;
  }
  if (!verify_message(a, owner_identity) || !verify_message(e.end, owner_identity)) return false;
  for (std::size_t i = 0; i < e.shares.size(); ++i) {
    const auto& s = e.shares[i];
    if (s.x != i + 1 || !share_matches(s, m) || !verify_message(s, owner_identity)) return false;
  }
  try {
    auto d = compose_datum(m, e.shares);
    return std::equal(d.begin(), d.end(), expected_datum.begin(), expected_datum.end());
  } catch (const Error&) {
    return false;
  }
}

}  // namespace p3::protocol
