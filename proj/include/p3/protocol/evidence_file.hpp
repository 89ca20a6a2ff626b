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

#include <string>

#include "p3/crypto/rsa.hpp"
#include "p3/protocol/messages.hpp"

namespace p3::protocol {

// Portable evidence bundle:
//   "P3EV" || u8 version (1) || u8 kind || len16 signer_id
//   || len32 canonical signer key || len32 evidence
// The signer is the counterparty whose signatures the evidence carries: the
// consumer for owner evidence, the owner for consumer evidence. Verifiers
// that keep their own trust store should compare signer_key against it.
struct EvidenceFile {
  enum class Kind : std::uint8_t { kOwner = 1, kConsumer = 2 };

  Kind kind = Kind::kOwner;
  std::string signer_id;
  crypto::PublicKey signer_key;
  Bytes evidence;

  Bytes encode() const;
  // Throws DecodeError.
  static EvidenceFile decode(ByteView data);
};

// False for anything that does not decode or verify. Consumer evidence is
// checked against the datum its own shares compose to.
bool verify_evidence_file(const EvidenceFile& f);
bool verify_evidence_file(ByteView data);

}  // namespace p3::protocol
