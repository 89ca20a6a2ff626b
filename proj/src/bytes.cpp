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

#include "p3/bytes.hpp"

#include <algorithm>
#include <limits>

#include "p3/error.hpp"

namespace p3 {

std::string to_hex(ByteView data) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(data.size() * 2);
  for (auto b : data) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 0x0f]);
  }
  return out;
}

namespace {
int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}
}  // namespace

Bytes from_hex(std::string_view hex) {
  if (hex.size() % 2 != 0) {
    throw DecodeError("hex string has odd length");
  }
  Bytes out;
  out.reserve(hex.size() / 2);
  for (std::size_t i = 0; i < hex.size(); i += 2) {
    int hi = hex_value(hex[i]);
    int lo = hex_value(hex[i + 1]);
    if (hi < 0 || lo < 0) {
      throw DecodeError("invalid hex digit");
    }
    out.push_back(static_cast<std::uint8_t>((hi << 4) | lo));
  }
  return out;
}

void ByteWriter::u16(std::uint16_t v) {
  out_.push_back(static_cast<std::uint8_t>(v >> 8));
  out_.push_back(static_cast<std::uint8_t>(v));
}

void ByteWriter::u32(std::uint32_t v) {
  for (int shift = 24; shift >= 0; shift -= 8) {
    out_.push_back(static_cast<std::uint8_t>(v >> shift));
  }
}

void ByteWriter::u64(std::uint64_t v) {
  for (int shift = 56; shift >= 0; shift -= 8) {
    out_.push_back(static_cast<std::uint8_t>(v >> shift));
  }
}

void ByteWriter::var16(ByteView v) {
  if (v.size() > std::numeric_limits<std::uint16_t>::max()) {
    throw Error(Errc::kInvalidArgument, "field exceeds 16-bit length prefix");
  }
  u16(static_cast<std::uint16_t>(v.size()));
  raw(v);
}

void ByteWriter::var32(ByteView v) {
  if (v.size() > std::numeric_limits<std::uint32_t>::max()) {
    throw Error(Errc::kInvalidArgument, "field exceeds 32-bit length prefix");
  }
  u32(static_cast<std::uint32_t>(v.size()));
  raw(v);
}

ByteView ByteReader::raw(std::size_t n) {
  if (remaining() < n) {
    throw DecodeError("truncated input");
  }
  auto v = in_.subspan(pos_, n);
  pos_ += n;
  return v;
}

Bytes ByteReader::raw_copy(std::size_t n) {
  auto v = raw(n);
  return {v.begin(), v.end()};
}

std::uint8_t ByteReader::u8() { return raw(1)[0]; }

std::uint16_t ByteReader::u16() {
  auto v = raw(2);
  return static_cast<std::uint16_t>((v[0] << 8) | v[1]);
}

std::uint32_t ByteReader::u32() {
  auto v = raw(4);
  std::uint32_t out = 0;
  for (auto b : v) out = (out << 8) | b;
  return out;
}

std::uint64_t ByteReader::u64() {
  auto v = raw(8);
  std::uint64_t out = 0;
  for (auto b : v) out = (out << 8) | b;
  return out;
}

ByteView ByteReader::var16() { return raw(u16()); }

ByteView ByteReader::var32() { return raw(u32()); }

std::string ByteReader::str16() {
  auto v = var16();
  return {v.begin(), v.end()};
}

void ByteReader::expect_done() const {
  if (!done()) {
    throw DecodeError("trailing bytes");
  }
}

void xor_into(std::span<std::uint8_t> dst, ByteView src) {
  if (dst.size() != src.size()) {
    throw Error(Errc::kInvalidArgument, "xor of unequal lengths");
  }
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] ^= src[i];
}

bool contains_subsequence(ByteView haystack, ByteView needle) {
  if (needle.empty()) return true;
  return std::search(haystack.begin(), haystack.end(), needle.begin(),
                     needle.end()) != haystack.end();
}

std::string_view errc_name(Errc code) {
  switch (code) {
    case Errc::kDecode: return "decode";
    case Errc::kUnsupportedBits: return "unsupported-bits";
    case Errc::kEmptyInput: return "empty-input";
    case Errc::kAuthenticationFailure: return "authentication-failure";
    case Errc::kInvalidArgument: return "invalid-argument";
    case Errc::kMismatchedShares: return "mismatched-shares";
    case Errc::kInsufficientShards: return "insufficient-shards";
    case Errc::kDuplicateShard: return "duplicate-shard";
    case Errc::kIndexReuse: return "index-reuse";
    case Errc::kDuplicatePseudonym: return "duplicate-pseudonym";
    case Errc::kUnknownPseudonym: return "unknown-pseudonym";
    case Errc::kNotFound: return "not-found";
    case Errc::kInvalidBlock: return "invalid-block";
    case Errc::kUnknownIdentity: return "unknown-identity";
    case Errc::kUnknownDatum: return "unknown-datum";
    case Errc::kInvalidSignature: return "invalid-signature";
    case Errc::kBadAckSignature: return "bad-ack-signature";
    case Errc::kBadShareSignature: return "bad-share-signature";
    case Errc::kWrongStep: return "wrong-step";
    case Errc::kTimeout: return "timeout";
    case Errc::kAborted: return "aborted";
    case Errc::kChecksumMismatch: return "checksum-mismatch";
    case Errc::kSessionState: return "session-state";
    case Errc::kNoEvidence: return "no-evidence";
    case Errc::kProtocolFailure: return "protocol-failure";
    case Errc::kIo: return "io";
    case Errc::kScenario: return "scenario";
    case Errc::kCrypto: return "crypto";
  }
  return "unknown";
}

}  // namespace p3
