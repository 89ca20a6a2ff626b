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

#include "p3/node/claim.hpp"

#include "p3/error.hpp"

namespace p3::node {

Bytes IdentityClaim::encode() const {
  ByteWriter w;
  w.var16(claimant);
  w.var16(subject);
  w.raw(pseudonym.digest);
  w.u8(evidence ? 1 : 0);
  if (evidence) w.var32(evidence->encode());
  return std::move(w).take();
}

IdentityClaim IdentityClaim::decode(ByteView data) {
  ByteReader r(data);
  IdentityClaim c;
  c.claimant = r.str16();
  c.subject = r.str16();
  c.pseudonym.digest = r.array<32>();
  const auto flag = r.u8();
  if (flag > 1) throw DecodeError("bad evidence flag");
  if (flag == 1) c.evidence = protocol::EvidenceOwner::decode(r.var32());
  r.expect_done();
  return c;
}

std::optional<std::string> claimant_identity(const IdentityClaim& claim,
                                             const protocol::TrustStore& trust) {
  if (!claim.evidence) return std::nullopt;
  const auto& e = *claim.evidence;
  const auto& owner = e.accept.owner_id;
  auto key = trust.key_for(owner);
  if (!key) return std::nullopt;
  if (!protocol::verify_message(e.accept, *key) ||
      !protocol::verify_message(e.final_share, *key)) {
    return std::nullopt;
  }
  return owner;
}

bool verify_identity_claim(const IdentityClaim& claim, const protocol::TrustStore& trust) {
  if (!claim.evidence) return false;
  const auto& e = *claim.evidence;
  if (e.meta.consumer_id != claim.subject || e.meta.owner_id != claim.claimant) return false;
  auto subject_key = trust.key_for(claim.subject);
  if (!subject_key || !protocol::verify_evidence_owner(e, *subject_key)) return false;
  try {
    if (crypto::derive_pseudonym(e.request.consumer_onetime_key) != claim.pseudonym) return false;
  } catch (const Error&) {
    return false;
  }
  auto who = claimant_identity(claim, trust);
  return who && *who == claim.claimant;
}

}  // namespace p3::node
