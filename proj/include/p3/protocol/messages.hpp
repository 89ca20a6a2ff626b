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
#include <string>
#include <vector>

#include "p3/bytes.hpp"
#include "p3/crypto/hash.hpp"
#include "p3/crypto/pseudonym.hpp"
#include "p3/crypto/rsa.hpp"
#include "p3/ledger/block.hpp"
#include "p3/rng.hpp"

namespace p3::protocol {

using crypto::Digest;
using crypto::Pseudonym;
using ledger::DatumId;
using ledger::Label;
using SessionId = ByteArray<16>;

// Every signed message signs a domain tag followed by its fields, so a
// signature from one message kind never verifies as another.

struct Request {
  SessionId session_id{};
  DatumId datum_id{};
  Label label_t{};
  std::string purpose;
  Bytes consumer_onetime_key;  // canonical public key
  std::string consumer_id;
  std::string owner_id;
  Bytes signature;  // consumer identity key

  Bytes signed_bytes() const;
  Bytes encode() const;
  static Request decode(ByteView data);
};

struct Accept {
  SessionId session_id{};
  Label label_t{};
  Bytes owner_onetime_key;  // canonical public key
  std::string owner_id;
  std::string consumer_id;
  std::uint32_t slow_iterations = 0;
  Bytes signature;  // owner identity key

  Bytes signed_bytes() const;
  Bytes encode() const;
  static Accept decode(ByteView data);
};

struct ShareMessage {
  std::uint32_t x = 0;
  Bytes share;
  std::string owner_id;
  std::string consumer_id;
  Label label_t{};
  Bytes signature;  // owner identity key

  Bytes signed_bytes() const;
  Bytes encode() const;
  static ShareMessage decode(ByteView data);
  // What acknowledgments commit to.
  Digest digest() const;
};

struct AckMessage {
  std::uint32_t x = 0;
  Digest share_digest{};
  Label label_t{};
  Bytes signature;  // consumer identity key

  Bytes signed_bytes() const;
  Bytes encode() const;
  static AckMessage decode(ByteView data);
};

// Sent by the owner after a valid ack_n.
struct EndMessage {
  Label label_t{};
  std::uint32_t n = 0;
  Digest ack_digest{};
  Bytes signature;  // owner identity key

  Bytes signed_bytes() const;
  Bytes encode() const;
  static EndMessage decode(ByteView data);
};

struct SessionMeta {
  SessionId session_id{};
  std::string consumer_id;
  std::string owner_id;
  DatumId datum_id{};
  Label label_t{};
  std::uint32_t n = 0;
  std::uint32_t slow_iterations = 0;

  Bytes encode() const;
  static SessionMeta decode(ByteView data);
  friend bool operator==(const SessionMeta&, const SessionMeta&) = default;
};

// Owner side: the consumer's signed request and its signed final
// acknowledgment, with the share it acknowledges. The accept message ties
// the owner's own pseudonym to the session.
struct EvidenceOwner {
  SessionMeta meta;
  Request request;
  Accept accept;
  ShareMessage final_share;
  AckMessage ack_n;

  Bytes encode() const;
  static EvidenceOwner decode(ByteView data);
};

// Consumer side: every owner-signed share plus the signed accept and end
// marker.
struct EvidenceConsumer {
  SessionMeta meta;
  Accept accept;
  std::vector<ShareMessage> shares;
  EndMessage end;

  Bytes encode() const;
  static EvidenceConsumer decode(ByteView data);
};

// Signs msg.signed_bytes() and stores the signature in msg.
template <typename M>
void sign_message(M& msg, const crypto::PrivateKey& key, Rng& rng) {
  msg.signature = crypto::sign(key, msg.signed_bytes(), rng);
}

template <typename M>
bool verify_message(const M& msg, const crypto::PublicKey& key) {
  return crypto::verify(key, msg.signed_bytes(), msg.signature);
}

}  // namespace p3::protocol
