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
#include <span>
#include <vector>

#include "p3/bytes.hpp"
#include "p3/rng.hpp"

namespace p3::crypto {

// n-out-of-n XOR splitting. The secret is first encoded as
// len32(secret) || secret || zero padding up to a multiple of 32 bytes, so
// every part has the same length for any n and parts leak only the padded
// size.
inline constexpr std::size_t kSharePadding = 32;

struct Shares {
  std::vector<Bytes> parts;

  std::size_t n() const { return parts.size(); }
};

Bytes encode_secret(ByteView secret);
// Throws DecodeError if the buffer is not a valid encoding.
Bytes decode_secret(ByteView encoded);

// Parts 1..n-1 are uniformly random; part n closes the XOR to the encoded
// secret. Throws Errc::kInvalidArgument if n < 1.
Shares split_secret(ByteView secret, std::size_t n, Rng& rng);

// XOR of all parts, decoded. Throws Errc::kMismatchedShares for an empty
// set or unequal part lengths and DecodeError when the XOR is not a valid
// encoding (typically a missing or foreign part).
Bytes compose_shares(std::span<const Bytes> parts);
inline Bytes compose_shares(const Shares& s) { return compose_shares(s.parts); }

}  // namespace p3::crypto
