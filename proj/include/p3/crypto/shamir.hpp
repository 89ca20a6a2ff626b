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

// Threshold sharing over GF(2^8) (AES polynomial), one independent random
// polynomial of degree k-1 per secret byte, evaluated at x = index.
struct KeyShard {
  std::uint8_t index = 0;  // 1..255
  std::uint8_t threshold = 0;
  std::uint8_t total = 0;
  Bytes payload;

  Bytes encode() const;
  static KeyShard decode(ByteView encoding);
};

struct KeyShards {
  std::vector<KeyShard> shards;
  int threshold = 0;
  int total = 0;
};

// Requires 1 <= k <= m <= 255 and a non-empty secret.
KeyShards split_master(ByteView secret, int k, int m, Rng& rng);

// Any k shards with distinct indices reconstruct the secret. Throws
// Errc::kInsufficientShards, Errc::kDuplicateShard or
// Errc::kInvalidArgument (inconsistent parameters or lengths).
Bytes recover_master(std::span<const KeyShard> shards);

namespace gf256 {
std::uint8_t mul(std::uint8_t a, std::uint8_t b);
std::uint8_t inv(std::uint8_t a);
}  // namespace gf256

}  // namespace p3::crypto
