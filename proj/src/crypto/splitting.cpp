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

#include "p3/crypto/splitting.hpp"

#include "p3/error.hpp"

namespace p3::crypto {

Bytes encode_secret(ByteView secret) {
  ByteWriter w;
  w.var32(secret);
  Bytes out = std::move(w).take();
  out.resize((out.size() + kSharePadding - 1) / kSharePadding * kSharePadding, 0);
  return out;
}

Bytes decode_secret(ByteView encoded) {
  ByteReader r(encoded);
  auto secret = r.var32();
  auto padding = r.raw(r.remaining());
  if (padding.size() >= kSharePadding ||
      std::any_of(padding.begin(), padding.end(), [](auto b) { return b != 0; })) {
    throw DecodeError("invalid secret padding");
  }
  return {secret.begin(), secret.end()};
}

Shares split_secret(ByteView secret, std::size_t n, Rng& rng) {
  if (n < 1) throw Error(Errc::kInvalidArgument, "split_secret needs n >= 1");
  Bytes last = encode_secret(secret);
  Shares out;
  out.parts.reserve(n);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    out.parts.push_back(rng.bytes(last.size()));
    xor_into(last, out.parts.back());
  }
  out.parts.push_back(std::move(last));
  return out;
}

Bytes compose_shares(std::span<const Bytes> parts) {
  if (parts.empty()) throw Error(Errc::kMismatchedShares, "no parts to compose");
  Bytes acc = parts.front();
  for (std::size_t i = 1; i < parts.size(); ++i) {
    if (parts[i].size() != acc.size()) {
      throw Error(Errc::kMismatchedShares, "parts differ in length");
    }
    xor_into(acc, parts[i]);
  }
  return decode_secret(acc);
}

}  // namespace p3::crypto
