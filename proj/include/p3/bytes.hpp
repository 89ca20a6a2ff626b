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

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace p3 {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

template <std::size_t N>
using ByteArray = std::array<std::uint8_t, N>;

inline ByteView as_bytes(std::string_view s) {
  return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

inline Bytes to_bytes(std::string_view s) {
  auto v = as_bytes(s);
  return {v.begin(), v.end()};
}

std::string to_hex(ByteView data);
Bytes from_hex(std::string_view hex);

template <std::size_t N>
ByteArray<N> array_from_hex(std::string_view hex);

// Appends big-endian integers and length-prefixed fields to a growing buffer.
class ByteWriter {
 public:
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u16(std::uint16_t v);
  void u32(std::uint32_t v);
  void u64(std::uint64_t v);
  void raw(ByteView v) { out_.insert(out_.end(), v.begin(), v.end()); }
  void raw(std::string_view v) { raw(as_bytes(v)); }

  void var16(ByteView v);
  void var16(std::string_view v) { var16(as_bytes(v)); }
  void var32(ByteView v);

  const Bytes& bytes() const& { return out_; }
  Bytes take() && { return std::move(out_); }
  std::size_t size() const { return out_.size(); }

 private:
  Bytes out_;
};

// Cursor over an immutable buffer; every read throws DecodeError when the
// buffer is too short.
class ByteReader {
 public:
  explicit ByteReader(ByteView in) : in_(in) {}

  std::uint8_t u8();
  std::uint16_t u16();
  std::uint32_t u32();
  std::uint64_t u64();
  ByteView raw(std::size_t n);
  Bytes raw_copy(std::size_t n);
  template <std::size_t N>
  ByteArray<N> array() {
    ByteArray<N> out{};
    auto v = raw(N);
    std::copy(v.begin(), v.end(), out.begin());
    return out;
  }

  ByteView var16();
  ByteView var32();
  std::string str16();

  std::size_t remaining() const { return in_.size() - pos_; }
  std::size_t position() const { return pos_; }
  bool done() const { return pos_ == in_.size(); }
  // Throws DecodeError unless the whole buffer was consumed.
  void expect_done() const;

 private:
  ByteView in_;
  std::size_t pos_ = 0;
};

void xor_into(std::span<std::uint8_t> dst, ByteView src);

bool contains_subsequence(ByteView haystack, ByteView needle);

template <std::size_t N>
ByteArray<N> array_from_hex(std::string_view hex) {
  auto v = from_hex(hex);
  ByteArray<N> out{};
  if (v.size() != N) {
    throw std::invalid_argument("hex string has wrong length");
  }
  std::copy(v.begin(), v.end(), out.begin());
  return out;
}

}  // namespace p3
