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
#include <string_view>

#include "p3/bytes.hpp"
#include "p3/crypto/rsa.hpp"
#include "p3/protocol/messages.hpp"
#include "p3/rng.hpp"

namespace p3::protocol {

enum class MsgType : std::uint8_t {
  kRequest = 1,
  kAccept = 2,
  kShare = 3,
  kAck = 4,
  kEnd = 5,
  kBlock = 6,
  kEraseRequest = 7,
  kEraseAck = 8,
};

std::string_view msg_type_name(MsgType t);

// sender_id_len(2) || sender_id || type(1) || session_id(16) ||
// body_len(4) || body || sig_len(4) || sig
//
// The signature is made with the sender's identity key over every byte
// before sig_len.
struct Envelope {
  std::string sender;
  MsgType type = MsgType::kRequest;
  SessionId session_id{};
  Bytes body;
  Bytes signature;

  Bytes signed_bytes() const;
  Bytes encode() const;
  // Throws DecodeError, including for unknown message types.
  static Envelope decode(ByteView data);
};

Envelope seal_envelope(std::string sender, MsgType type, const SessionId& session_id,
                       Bytes body, const crypto::PrivateKey& key, Rng& rng);

bool verify_envelope(const Envelope& e, const crypto::PublicKey& sender_key);

}  // namespace p3::protocol
