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

#include "p3/rng.hpp"

#include <openssl/evp.h>
#include <openssl/rand.h>

#include <cmath>

#include "openssl_util.hpp"
#include "p3/crypto/hash.hpp"

namespace p3 {

namespace {
constexpr std::size_t kBufferSize = 1024;
}

struct Rng::Impl {
  crypto::detail::CipherCtxPtr ctx{EVP_CIPHER_CTX_new()};
  ByteArray<kBufferSize> buffer{};
  std::size_t pos = kBufferSize;
};

Rng::Rng(const Seed& seed) : impl_(std::make_unique<Impl>()) {
  crypto::detail::check(impl_->ctx != nullptr, "EVP_CIPHER_CTX_new");
  ByteArray<16> iv{};  // 32-bit block counter followed by a zero nonce
  crypto::detail::check(EVP_EncryptInit_ex(impl_->ctx.get(), EVP_chacha20(),
                                           nullptr, seed.data(),
                                           iv.data()) == 1,
                        "chacha20 init");
}

Rng::Rng(std::uint64_t seed)
    : Rng([seed] {
        ByteWriter w;
        w.raw("p3/rng/u64-seed");
        w.u64(seed);
        return crypto::blake2s(w.bytes());
      }()) {}

Rng Rng::from_os() {
  Seed seed{};
  crypto::detail::check(RAND_bytes(seed.data(), static_cast<int>(seed.size())) == 1,
                        "RAND_bytes");
  return Rng(seed);
}

Rng::Rng(Rng&&) noexcept = default;
Rng& Rng::operator=(Rng&&) noexcept = default;
Rng::~Rng() = default;

void Rng::refill() {
  static const ByteArray<kBufferSize> kZeros{};
  int len = 0;
  crypto::detail::check(
      EVP_EncryptUpdate(impl_->ctx.get(), impl_->buffer.data(), &len,
                        kZeros.data(), static_cast<int>(kZeros.size())) == 1,
      "chacha20 keystream");
  impl_->pos = 0;
}

void Rng::fill(std::span<std::uint8_t> out) {
  std::size_t done = 0;
  while (done < out.size()) {
    if (impl_->pos == kBufferSize) refill();
    std::size_t n = std::min(out.size() - done, kBufferSize - impl_->pos);
    std::copy_n(impl_->buffer.begin() + static_cast<std::ptrdiff_t>(impl_->pos),
                n, out.begin() + static_cast<std::ptrdiff_t>(done));
    impl_->pos += n;
    done += n;
  }
}

Bytes Rng::bytes(std::size_t n) {
  Bytes out(n);
  fill(out);
  return out;
}

std::uint64_t Rng::next_u64() {
  ByteArray<8> b{};
  fill(b);
  std::uint64_t v = 0;
  for (auto x : b) v = (v << 8) | x;
  return v;
}

std::uint64_t Rng::uniform(std::uint64_t lo, std::uint64_t hi) {
  if (hi < lo) throw Error(Errc::kInvalidArgument, "uniform: empty range");
  std::uint64_t span = hi - lo;
  if (span == UINT64_MAX) return next_u64();
  std::uint64_t range = span + 1;
  // Rejection sampling removes modulo bias: threshold = 2^64 mod range.
  std::uint64_t threshold = (0 - range) % range;
  std::uint64_t v = 0;
  do {
    v = next_u64();
  } while (v < threshold);
  return lo + v % range;
}

double Rng::unit() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::exponential(double rate) {
  if (!(rate > 0.0)) throw Error(Errc::kInvalidArgument, "exponential rate");
  return -std::log1p(-unit()) / rate;
}

Rng Rng::fork(std::string_view label) {
  auto material = array<32>();
  return Rng(crypto::blake2s({ByteView(material), as_bytes(label)}));
}

}  // namespace p3
