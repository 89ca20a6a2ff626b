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

#include "p3/crypto/slow_transform.hpp"

#include "p3/error.hpp"

namespace p3::crypto {

namespace {
constexpr std::string_view kInnerStream = "p3/slow/stream-1";
constexpr std::string_view kOuterStream = "p3/slow/stream-2";
constexpr std::string_view kChainDomain = "p3/slow/chain";

void apply_stream(std::string_view domain, std::span<std::uint8_t> tail,
                  ByteView head) {
  Blake2s h;
  std::size_t off = 0;
  for (std::uint32_t counter = 0; off < tail.size(); ++counter) {
    ByteWriter ctr;
    ctr.u32(counter);
    auto block = h.update(as_bytes(domain)).update(head).update(ctr.bytes()).finish();
    for (std::size_t i = 0; i < block.size() && off < tail.size(); ++i, ++off) {
      tail[off] ^= block[i];
    }
  }
}

void check_iterations(std::uint32_t iterations) {
  if (iterations < 1) {
    throw Error(Errc::kInvalidArgument, "slow transform needs iterations >= 1");
  }
}
}  // namespace

Digest slow_chain(ByteView tail, std::uint32_t iterations) {
  check_iterations(iterations);
  Blake2s h;
  ByteWriter len;
  len.u64(tail.size());
  Digest state = h.update(as_bytes(kChainDomain)).update(len.bytes()).update(tail).finish();
  ByteArray<kDigestSize + 4> buf{};
  for (std::uint32_t round = 0; round < iterations; ++round) {
    std::copy(state.begin(), state.end(), buf.begin());
    buf[32] = static_cast<std::uint8_t>(round >> 24);
    buf[33] = static_cast<std::uint8_t>(round >> 16);
    buf[34] = static_cast<std::uint8_t>(round >> 8);
    buf[35] = static_cast<std::uint8_t>(round);
    state = h.update(buf).finish();
  }
  return state;
}

Bytes slow_transform(ByteView data, std::uint32_t iterations) {
  check_iterations(iterations);
  Bytes out(data.begin(), data.end());
  const std::size_t head_len = std::min<std::size_t>(kDigestSize, out.size());
  std::span<std::uint8_t> head(out.data(), head_len);
  std::span<std::uint8_t> tail(out.data() + head_len, out.size() - head_len);

  apply_stream(kInnerStream, tail, head);
  auto mask = slow_chain(tail, iterations);
  xor_into(head, ByteView(mask).first(head_len));
  apply_stream(kOuterStream, tail, head);
  return out;
}

Bytes slow_transform_inverse(ByteView data, std::uint32_t iterations) {
  check_iterations(iterations);
  Bytes out(data.begin(), data.end());
  const std::size_t head_len = std::min<std::size_t>(kDigestSize, out.size());
  std::span<std::uint8_t> head(out.data(), head_len);
  std::span<std::uint8_t> tail(out.data() + head_len, out.size() - head_len);

  apply_stream(kOuterStream, tail, head);
  auto mask = slow_chain(tail, iterations);
  xor_into(head, ByteView(mask).first(head_len));
  apply_stream(kInnerStream, tail, head);
  return out;
}

}  // namespace p3::crypto
