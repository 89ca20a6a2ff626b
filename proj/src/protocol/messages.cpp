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

#include "p3/protocol/messages.hpp"

#include "p3/error.hpp"

namespace p3::protocol {

namespace {

Bytes copy(ByteView v) { return {v.begin(), v.end()}; }

}  // namespace

Bytes Request::signed_bytes() const {
  ByteWriter w;
  w.raw("p3/request/v1");
  w.raw(session_id);
  w.raw(datum_id);
  w.raw(label_t);
  w.var16(purpose);
  w.var32(consumer_onetime_key);
  w.var16(consumer_id);
  w.var16(owner_id);
  return std::move(w).take();
}

Bytes Request::encode() const {
  ByteWriter w;
  w.raw(session_id);
  w.raw(datum_id);
  w.raw(label_t);
  w.var16(purpose);
  w.var32(consumer_onetime_key);
  w.var16(consumer_id);
  w.var16(owner_id);
  w.var32(signature);
  return std::move(w).take();
}

Request Request::decode(ByteView data) {
  ByteReader r(data);
  Request m;
  m.session_id = r.array<16>();
  m.datum_id = r.array<16>();
  m.label_t = r.array<16>();
  m.purpose = r.str16();
  m.consumer_onetime_key = copy(r.var32());
  m.consumer_id = r.str16();
  m.owner_id = r.str16();
  m.signature = copy(r.var32());
  r.expect_done();
  return m;
}

Bytes Accept::signed_bytes() const {
  ByteWriter w;
  w.raw("p3/accept/v1");
  w.raw(session_id);
  w.raw(label_t);
  w.var32(owner_onetime_key);
  w.var16(owner_id);
  w.var16(consumer_id);
  w.u32(slow_iterations);
  return std::move(w).take();
}

Bytes Accept::encode() const {
  ByteWriter w;
  w.raw(session_id);
  w.raw(label_t);
  w.var32(owner_onetime_key);
  w.var16(owner_id);
  w.var16(consumer_id);
  w.u32(slow_iterations);
  w.var32(signature);
  return std::move(w).take();
}

Accept Accept::decode(ByteView data) {
  ByteReader r(data);
  Accept m;
  m.session_id = r.array<16>();
  m.label_t = r.array<16>();
  m.owner_onetime_key = copy(r.var32());
  m.owner_id = r.str16();
  m.consumer_id = r.str16();
  m.slow_iterations = r.u32();
  m.signature = copy(r.var32());
  r.expect_done();
  return m;
}

Bytes ShareMessage::signed_bytes() const {
  ByteWriter w;
  w.raw("p3/share/v1");
  w.u32(x);
  w.var32(share);
  w.var16(owner_id);
  w.var16(consumer_id);
  w.raw(label_t);
  return std::move(w).take();
}

Bytes ShareMessage::encode() const {
  ByteWriter w;
  w.u32(x);
  w.var32(share);
  w.var16(owner_id);
  w.var16(consumer_id);
  w.raw(label_t);
  w.var32(signature);
  return std::move(w).take();
}

ShareMessage ShareMessage::decode(ByteView data) {
  ByteReader r(data);
  ShareMessage m;
  m.x = r.u32();
  m.share = copy(r.var32());
  m.owner_id = r.str16();
  m.consumer_id = r.str16();
  m.label_t = r.array<16>();
  m.signature = copy(r.var32());
  r.expect_done();
  return m;
}

Digest ShareMessage::digest() const { return crypto::blake2s(encode()); }

Bytes AckMessage::signed_bytes() const {
  ByteWriter w;
  w.raw("p3/ack/v1");
  w.u32(x);
  w.raw(share_digest);
  w.raw(label_t);
  return std::move(w).take();
}

Bytes AckMessage::encode() const {
  ByteWriter w;
  w.u32(x);
  w.raw(share_digest);
  w.raw(label_t);
  w.var32(signature);
  return std::move(w).take();
}

AckMessage AckMessage::decode(ByteView data) {
  ByteReader r(data);
  AckMessage m;
  m.x = r.u32();
  m.share_digest = r.array<32>();
  m.label_t = r.array<16>();
  m.signature = copy(r.var32());
  r.expect_done();
  return m;
}

Bytes EndMessage::signed_bytes() const {
  ByteWriter w;
  w.raw("p3/end/v1");
  w.raw(label_t);
  w.u32(n);
  w.raw(ack_digest);
  return std::move(w).take();
}

Bytes EndMessage::encode() const {
  ByteWriter w;
  w.raw(label_t);
  w.u32(n);
  w.raw(ack_digest);
  w.var32(signature);
  return std::move(w).take();
}

EndMessage EndMessage::decode(ByteView data) {
  ByteReader r(data);
  EndMessage m;
  m.label_t = r.array<16>();
  m.n = r.u32();
  m.ack_digest = r.array<32>();
  m.signature = copy(r.var32());
  r.expect_done();
  return m;
}

Bytes SessionMeta::encode() const {
  ByteWriter w;
  w.raw(session_id);
  w.var16(consumer_id);
  w.var16(owner_id);
  w.raw(datum_id);
  w.raw(label_t);
  w.u32(n);
  w.u32(slow_iterations);
  return std::move(w).take();
}

SessionMeta SessionMeta::decode(ByteView data) {
  ByteReader r(data);
  SessionMeta m;
  m.session_id = r.array<16>();
  m.consumer_id = r.str16();
  m.owner_id = r.str16();
  m.datum_id = r.array<16>();
  m.label_t = r.array<16>();
  m.n = r.u32();
  m.slow_iterations = r.u32();
  r.expect_done();
  return m;
}

Bytes EvidenceOwner::encode() const {
  ByteWriter w;
  w.var32(meta.encode());
  w.var32(request.encode());
  w.var32(accept.encode());
  w.var32(final_share.encode());
  w.var32(ack_n.encode());
  return std::move(w).take();
}

EvidenceOwner EvidenceOwner::decode(ByteView data) {
  ByteReader r(data);
  EvidenceOwner e;
  e.meta = SessionMeta::decode(r.var32());
  e.request = Request::decode(r.var32());
  e.accept = Accept::decode(r.var32());
  e.final_share = ShareMessage::decode(r.var32());
  e.ack_n = AckMessage::decode(r.var32());
  r.expect_done();
  return e;
}

Bytes EvidenceConsumer::encode() const {
  ByteWriter w;
  w.var32(meta.encode());
  w.var32(accept.encode());
  w.u32(static_cast<std::uint32_t>(shares.size()));
  for (const auto& s : shares) w.var32(s.encode());
  w.var32(end.encode());
  return std::move(w).take();
}

EvidenceConsumer EvidenceConsumer::decode(ByteView data) {
  ByteReader r(data);
  EvidenceConsumer e;
  e.meta = SessionMeta::decode(r.var32());
  e.accept = Accept::decode(r.var32());
  const auto count = r.u32();
  if (count > r.remaining()) throw DecodeError("share count exceeds input");
  for (std::uint32_t i = 0; i < count; ++i) e.shares.push_back(ShareMessage::decode(r.var32()));
  e.end = EndMessage::decode(r.var32());
  r.expect_done();
  return e;
}

}  // namespace p3::protocol
