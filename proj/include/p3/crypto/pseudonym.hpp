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

#include <compare>
#include <functional>
#include <string>

#include "p3/bytes.hpp"
#include "p3/crypto/hash.hpp"
#include "p3/crypto/rsa.hpp"

namespace p3::crypto {

// One-time transaction pseudonym: BLAKE2s-256 of a canonical public key.
struct Pseudonym {
  Digest digest{};

  std::string hex() const { return to_hex(digest); }
  static Pseudonym from_hex(std::string_view hex) {
    return {array_from_hex<kDigestSize>(hex)};
  }
  bool is_zero() const {
    return std::all_of(digest.begin(), digest.end(), [](auto b) { return b == 0; });
  }

  friend auto operator<=>(const Pseudonym&, const Pseudonym&) = default;
};

// Throws Errc::kEmptyInput for a zero-length encoding.
Pseudonym derive_pseudonym(ByteView canonical_public_key);
Pseudonym derive_pseudonym(const PublicKey& key);

// Evidence that the holder of a pseudonym controls the matching private key.
struct OwnershipProof {
  Bytes public_key;  // canonical encoding
  Bytes challenge;
  Bytes signature;

  Bytes encode() const;
  static OwnershipProof decode(ByteView encoding);
};

// Throws Errc::kEmptyInput for an empty challenge.
OwnershipProof prove_ownership(const KeyPair& key_pair, ByteView challenge, Rng& rng);

// True iff the proof's key hashes to the pseudonym, the proof answers this
// exact challenge and the signature verifies. Never throws.
bool verify_ownership(const Pseudonym& pseudonym, const OwnershipProof& proof,
                      ByteView challenge);

}  // namespace p3::crypto

template <>
struct std::hash<p3::crypto::Pseudonym> {
  std::size_t operator()(const p3::crypto::Pseudonym& p) const noexcept {
    std::size_t h = 0;
    for (int i = 0; i < 8; ++i) h = (h << 8) | p.digest[static_cast<std::size_t>(i)];
    return h;
  }
};
