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

#include "p3/protocol/wire.hpp"

#include "p3/error.hpp"

namespace p3::protocol {

std::string_view msg_type_name(MsgType t) {
  switch (t) {
    case MsgType::kRequest: return "REQ";
    case MsgType::kAccept: return "ACCEPT";
    case MsgType::kShare: return "SHARE";
    case MsgType::kAck: return "ACK";
    case MsgType::kEnd: return "END";
    case MsgType::kBlock: return "BLOCK";
    case MsgType::kEraseRequest: return "ERASE_REQ";
    case MsgType::kEraseAck: return "ERASE_ACK";
  }
  return "UNKNOWN";
}

Bytes Envelope::signed_bytes() const {
  ByteWriter w;
  w.var16(sender);
  w.u8(static_cast<std::uint8_t>(type));
  w.raw(session_id);
  w.var32(body);
  return std::move(w).take();
}

Bytes Envelope::encode() const {
  ByteWriter w;
  w.raw(signed_bytes());
  w.var32(signature);
  return std::move(w).take();
}

Envelope Envelope::decode(ByteView data) {
  ByteReader r(data);
  Envelope e;
  e.sender = r.str16();
  const auto type = r.u8();
  if (type < 1 || type > 8) throw DecodeError("unknown message type " + std::to_string(type));
  e.type = static_cast<MsgType>(type);
  e.session_id = r.array<16>();
  auto body = r.var32();
  e.body.assign(body.begin(), body.end());
  auto sig = r.var32();
  e.signature.assign(sig.begin(), sig.end());
  r.expect_done();
  return e;
}

Envelope seal_envelope(std::string sender, MsgType type, const SessionId& session_id,
                       Bytes body, const crypto::PrivateKey& key, Rng& rng) {
  Envelope e;
  e.sender = std::move(sender);
  e.type = type;
  e.session_id = session_id;
  e.body = std::move(body);
  e.signature = crypto::sign(key, e.signed_bytes(), rng);
  return e;
}

bool verify_envelope(const Envelope& e, const crypto::PublicKey& sender_key) {
  return crypto::verify(sender_key, e.signed_bytes(), e.signature);
}

}  // namespace p3::protocol
