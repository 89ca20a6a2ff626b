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

#include "p3/crypto/shamir.hpp"

#include <array>
#include <set>

#include "p3/error.hpp"

namespace p3::crypto {

namespace gf256 {
namespace {
struct Tables {
  std::array<std::uint8_t, 512> exp{};
  std::array<std::uint8_t, 256> log{};
  Tables() {
    // 0x03 generates the multiplicative group modulo x^8+x^4+x^3+x+1.
    std::uint8_t x = 1;
    for (int i = 0; i < 255; ++i) {
      exp[static_cast<std::size_t>(i)] = x;
      log[x] = static_cast<std::uint8_t>(i);
      std::uint8_t hi = x & 0x80;
      std::uint8_t x2 = static_cast<std::uint8_t>(x << 1);
      if (hi) x2 ^= 0x1B;
      x = static_cast<std::uint8_t>(x2 ^ x);
    }
    for (int i = 255; i < 512; ++i) {
      exp[static_cast<std::size_t>(i)] = exp[static_cast<std::size_t>(i - 255)];
    }
  }
};
const Tables& tables() {
  static const Tables t;
  return t;
}
}  // namespace

std::uint8_t mul(std::uint8_t a, std::uint8_t b) {
  if (a == 0 || b == 0) return 0;
  const auto& t = tables();
  return t.exp[static_cast<std::size_t>(t.log[a]) + t.log[b]];
}

std::uint8_t inv(std::uint8_t a) {
  if (a == 0) throw Error(Errc::kInvalidArgument, "zero has no inverse in GF(256)");
  const auto& t = tables();
  return t.exp[static_cast<std::size_t>(255 - t.log[a])];
}
}  // namespace gf256

Bytes KeyShard::encode() const {
  ByteWriter w;
  w.u8(index);
  w.u8(threshold);
  w.u8(total);
  w.var32(payload);
  return std::move(w).take();
}

KeyShard KeyShard::decode(ByteView encoding) {
  ByteReader r(encoding);
  KeyShard s;
  s.index = r.u8();
  s.threshold = r.u8();
  s.total = r.u8();
  auto p = r.var32();
  r.expect_done();
  s.payload.assign(p.begin(), p.end());
  return s;
}

KeyShards split_master(ByteView secret, int k, int m, Rng& rng) {
  if (k < 1 || k > m || m > 255) {
    throw Error(Errc::kInvalidArgument, "split_master needs 1 <= k <= m <= 255");
  }
  if (secret.empty()) throw Error(Errc::kEmptyInput, "secret is empty");

  KeyShards out;
  out.threshold = k;
  out.total = m;
  for (int i = 1; i <= m; ++i) {
    out.shards.push_back({static_cast<std::uint8_t>(i), static_cast<std::uint8_t>(k),
                          static_cast<std::uint8_t>(m), Bytes(secret.size(), 0)});
  }
  Bytes coeffs(static_cast<std::size_t>(k));
  for (std::size_t pos = 0; pos < secret.size(); ++pos) {
    coeffs[0] = secret[pos];
    if (k > 1) rng.fill(std::span(coeffs).subspan(1));
    for (auto& shard : out.shards) {
      // Horner evaluation at x = index.
      std::uint8_t y = 0;
      for (std::size_t c = coeffs.size(); c-- > 0;) {
        y = static_cast<std::uint8_t>(gf256::mul(y, shard.index) ^ coeffs[c]);
      }
      shard.payload[pos] = y;
    }
  }
  return out;
}

Bytes recover_master(std::span<const KeyShard> shards) {
  if (shards.empty()) throw Error(Errc::kInsufficientShards, "no shards");
  const auto k = shards.front().threshold;
  const auto len = shards.front().payload.size();
  std::set<std::uint8_t> seen;
  for (const auto& s : shards) {
    if (s.threshold != k || s.payload.size() != len || s.index == 0 || k == 0) {
      throw Error(Errc::kInvalidArgument, "inconsistent shard set");
    }
    if (!seen.insert(s.index).second) {
      throw Error(Errc::kDuplicateShard, "duplicate shard index " + std::to_string(s.index));
    }
  }
  if (shards.size() < k) {
    throw Error(Errc::kInsufficientShards,
                std::to_string(shards.size()) + " of " + std::to_string(k) + " shards");
  }
  auto used = shards.first(k);
  // Lagrange basis at x = 0: l_i = prod_{j != i} x_j / (x_j - x_i).
  std::vector<std::uint8_t> basis(k);
  for (std::size_t i = 0; i < k; ++i) {
    std::uint8_t num = 1, den = 1;
    for (std::size_t j = 0; j < k; ++j) {
      if (i == j) continue;
      num = gf256::mul(num, used[j].index);
      den = gf256::mul(den, static_cast<std::uint8_t>(used[j].index ^ used[i].index));
    }
    basis[i] = gf256::mul(num, gf256::inv(den));
  }
  Bytes out(len, 0);
  for (std::size_t pos = 0; pos < len; ++pos) {
    std::uint8_t acc = 0;
    for (std::size_t i = 0; i < k; ++i) acc ^= gf256::mul(basis[i], used[i].payload[pos]);
    out[pos] = acc;
  }
  return out;
}

}  // namespace p3::crypto
