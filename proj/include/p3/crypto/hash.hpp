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

#include <initializer_list>
#include <memory>

#include "p3/bytes.hpp"

namespace p3::crypto {

inline constexpr std::size_t kDigestSize = 32;
using Digest = ByteArray<kDigestSize>;

// BLAKE2s-256.
Digest blake2s(ByteView data);
Digest blake2s(std::initializer_list<ByteView> parts);

// BLAKE2s-256 in keyed (MAC) mode; key is 1..32 bytes.
Digest blake2s_keyed(ByteView key, ByteView data);
Digest blake2s_keyed(ByteView key, std::initializer_list<ByteView> parts);

Digest sha256(ByteView data);

// Reusable BLAKE2s-256 context for hot loops (mining, sequential chains).
class Blake2s {
 public:
  Blake2s();
  ~Blake2s();
  Blake2s(const Blake2s&) = delete;
  Blake2s& operator=(const Blake2s&) = delete;

  Blake2s& reset();
  Blake2s& update(ByteView data);
  Digest finish();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace p3::crypto
