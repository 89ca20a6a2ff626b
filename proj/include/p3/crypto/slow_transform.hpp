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

#include "p3/bytes.hpp"
#include "p3/crypto/hash.hpp"

namespace p3::crypto {

inline constexpr std::uint32_t kDefaultSlowIterations = 1u << 16;

// Length-preserving permutation whose evaluation in either direction needs
// a strictly sequential chain of `iterations` BLAKE2s rounds.
//
// The input is split into a head H (first min(32, len) bytes) and a tail T
// and run through a three-step Feistel network:
//
//   T1 = T  ^ stream1(H)
//   H1 = H  ^ chain(T1, iterations)
//   T2 = T1 ^ stream2(H1)
//
// stream1/stream2 are domain-separated BLAKE2s counter-mode keystreams;
// chain() absorbs T1 once and then applies `iterations` rounds
// state = BLAKE2s(state || be32(round)).
Bytes slow_transform(ByteView data, std::uint32_t iterations = kDefaultSlowIterations);
Bytes slow_transform_inverse(ByteView data,
                             std::uint32_t iterations = kDefaultSlowIterations);

// Exposed for tests: the sequential chain output for a given tail.
Digest slow_chain(ByteView tail, std::uint32_t iterations);

}  // namespace p3::crypto
