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

#include <optional>
#include <string>

#include "p3/protocol/messages.hpp"
#include "p3/protocol/session.hpp"

namespace p3::node {

// Public assertion that `pseudonym` on the chain belongs to `subject`.
// Only claims carrying owner evidence are worth anything, and that evidence
// is signed by the claimant as well.
struct IdentityClaim {
  std::string claimant;
  std::string subject;
  crypto::Pseudonym pseudonym;
  std::optional<protocol::EvidenceOwner> evidence;

  Bytes encode() const;
  static IdentityClaim decode(ByteView data);
};

// Accepts iff the claim embeds evidence that verifies under the subject's
// pinned key, the evidence names both parties, the subject's one-time key
// hashes to the claimed pseudonym, and the claimant's own accept and final
// share verify under the claimant's key. Bare claims are rejected.
bool verify_identity_claim(const IdentityClaim& claim, const protocol::TrustStore& trust);

// The identity whose signatures an accepted claim necessarily carries. Empty
// when the embedded owner signatures do not verify for any pinned identity
// named in the evidence.
std::optional<std::string> claimant_identity(const IdentityClaim& claim,
                                             const protocol::TrustStore& trust);

}  // namespace p3::node
