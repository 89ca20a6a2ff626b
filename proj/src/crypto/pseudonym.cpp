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

#include "p3/crypto/pseudonym.hpp"

#include "p3/error.hpp"

namespace p3::crypto {

namespace {
constexpr std::string_view kOwnershipDomain = "p3/ownership-proof/v1";

Bytes ownership_message(ByteView challenge) {
  ByteWriter w;
  w.raw(kOwnershipDomain);
  w.var32(challenge);
  return std::move(w).take();
}
}  // namespace

Pseudonym derive_pseudonym(ByteView canonical_public_key) {
  if (canonical_public_key.empty()) {
    throw Error(Errc::kEmptyInput, "public key encoding is empty");
  }
  return {blake2s(canonical_public_key)};
}

Pseudonym derive_pseudonym(const PublicKey& key) {
  return derive_pseudonym(key.canonical());
}

Bytes OwnershipProof::encode() const {
  ByteWriter w;
  w.var32(public_key);
  w.var32(challenge);
  w.var32(signature);
  return std::move(w).take();
}

OwnershipProof OwnershipProof::decode(ByteView encoding) {
  ByteReader r(encoding);
  OwnershipProof p;
  auto pk = r.var32();
  auto ch = r.var32();
  auto sig = r.var32();
  r.expect_done();
  p.public_key.assign(pk.begin(), pk.end());
  p.challenge.assign(ch.begin(), ch.end());
  p.signature.assign(sig.begin(), sig.end());
  return p;
}

OwnershipProof prove_ownership(const KeyPair& key_pair, ByteView challenge, Rng& rng) {
  if (challenge.empty()) {
    throw Error(Errc::kEmptyInput, "ownership challenge is empty");
  }
  OwnershipProof proof;
  proof.public_key = key_pair.public_key.canonical();
  proof.challenge.assign(challenge.begin(), challenge.end());
  proof.signature = sign(key_pair.private_key, ownership_message(challenge), rng);
  return proof;
}

bool verify_ownership(const Pseudonym& pseudonym, const OwnershipProof& proof,
                      ByteView challenge) {
  if (proof.public_key.empty() || challenge.empty()) return false;
  if (derive_pseudonym(proof.public_key) != pseudonym) return false;
  if (!std::equal(proof.challenge.begin(), proof.challenge.end(), challenge.begin(),
                  challenge.end())) {
    return false;
  }
  try {
    auto key = PublicKey::from_canonical(proof.public_key);
    return verify(key, ownership_message(challenge), proof.signature);
  } catch (const Error&) {
    return false;
  }
}

}  // namespace p3::crypto
