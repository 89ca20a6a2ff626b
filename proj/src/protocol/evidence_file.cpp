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

#include "p3/protocol/evidence_file.hpp"

#include <algorithm>

#include "p3/error.hpp"
#include "p3/protocol/session.hpp"

namespace p3::protocol {

namespace {
constexpr std::string_view kMagic = "P3EV";
constexpr std::uint8_t kVersion = 1;
}  // namespace

Bytes EvidenceFile::encode() const {
  ByteWriter w;
  w.raw(kMagic);
  w.u8(kVersion);
  w.u8(static_cast<std::uint8_t>(kind));
  w.var16(signer_id);
  w.var32(signer_key.canonical());
  w.var32(evidence);
  return std::move(w).take();
}

EvidenceFile EvidenceFile::decode(ByteView data) {
  ByteReader r(data);
  auto magic = r.raw(kMagic.size());
  if (!std::equal(magic.begin(), magic.end(), kMagic.begin(), kMagic.end(),
                  [](std::uint8_t a, char b) { return a == static_cast<std::uint8_t>(b); })) {
    throw DecodeError("not an evidence file");
  }
  if (r.u8() != kVersion) throw DecodeError("unsupported evidence file version");
  EvidenceFile f;
  const auto kind = r.u8();
  if (kind != 1 && kind != 2) throw DecodeError("unknown evidence kind");
  f.kind = static_cast<Kind>(kind);
  f.signer_id = r.str16();
  f.signer_key = crypto::PublicKey::from_canonical(r.var32());
  auto ev = r.var32();
  f.evidence.assign(ev.begin(), ev.end());
  r.expect_done();
  return f;
}

bool verify_evidence_file(const EvidenceFile& f) {
  try {
    if (f.kind == EvidenceFile::Kind::kOwner) {
      auto e = EvidenceOwner::decode(f.evidence);
      return e.meta.consumer_id == f.signer_id && verify_evidence_owner(e, f.signer_key);
    }
    auto e = EvidenceConsumer::decode(f.evidence);
    if (e.meta.owner_id != f.signer_id) return false;
    const auto datum = compose_datum(e.meta, e.shares);
    return verify_evidence_consumer(e, f.signer_key, datum);
  } catch (const Error&) {
    return false;
  }
}

bool verify_evidence_file(ByteView data) {
  try {
    return verify_evidence_file(EvidenceFile::decode(data));
  } catch (const Error&) {
    return false;
  }
}

}  // namespace p3::protocol
