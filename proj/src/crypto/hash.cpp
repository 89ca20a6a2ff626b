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

#include "p3/crypto/hash.hpp"

#include <openssl/core_names.h>
#include <openssl/evp.h>

#include "openssl_util.hpp"
#include "p3/error.hpp"

namespace p3::crypto {

namespace {

const EVP_MD* blake2s_md() {
  static EVP_MD* md = [] {
    EVP_MD* m = EVP_MD_fetch(nullptr, "BLAKE2S-256", nullptr);
    detail::check(m != nullptr, "fetch BLAKE2S-256");
    return m;
  }();
  return md;
}

const EVP_MD* sha256_md() {
  static EVP_MD* md = [] {
    EVP_MD* m = EVP_MD_fetch(nullptr, "SHA256", nullptr);
    detail::check(m != nullptr, "fetch SHA256");
    return m;
  }();
  return md;
}

EVP_MAC* blake2s_mac() {
  static EVP_MAC* mac = [] {
    EVP_MAC* m = EVP_MAC_fetch(nullptr, "BLAKE2SMAC", nullptr);
    detail::check(m != nullptr, "fetch BLAKE2SMAC");
    return m;
  }();
  return mac;
}

Digest digest_parts(const EVP_MD* md, std::initializer_list<ByteView> parts) {
  detail::MdCtxPtr ctx(EVP_MD_CTX_new());
  detail::check(ctx != nullptr, "EVP_MD_CTX_new");
  detail::check(EVP_DigestInit_ex2(ctx.get(), md, nullptr) == 1, "DigestInit");
  for (auto p : parts) {
    detail::check(EVP_DigestUpdate(ctx.get(), p.data(), p.size()) == 1,
                  "DigestUpdate");
  }
  Digest out{};
  unsigned int len = 0;
  detail::check(EVP_DigestFinal_ex(ctx.get(), out.data(), &len) == 1 &&
                    len == out.size(),
                "DigestFinal");
  return out;
}

}  // namespace

Digest blake2s(ByteView data) { return digest_parts(blake2s_md(), {data}); }

Digest blake2s(std::initializer_list<ByteView> parts) {
  return digest_parts(blake2s_md(), parts);
}

Digest blake2s_keyed(ByteView key, ByteView data) {
  return blake2s_keyed(key, {data});
}

Digest blake2s_keyed(ByteView key, std::initializer_list<ByteView> parts) {
  if (key.empty() || key.size() > 32) {
    throw Error(Errc::kInvalidArgument, "BLAKE2s key must be 1..32 bytes");
  }
  detail::MacCtxPtr ctx(EVP_MAC_CTX_new(blake2s_mac()));
  detail::check(ctx != nullptr, "EVP_MAC_CTX_new");
  detail::check(EVP_MAC_init(ctx.get(), key.data(), key.size(), nullptr) == 1,
                "MAC init");
  for (auto p : parts) {
    detail::check(EVP_MAC_update(ctx.get(), p.data(), p.size()) == 1,
                  "MAC update");
  }
  Digest out{};
  std::size_t len = 0;
  detail::check(EVP_MAC_final(ctx.get(), out.data(), &len, out.size()) == 1 &&
                    len == out.size(),
                "MAC final");
  return out;
}

Digest sha256(ByteView data) { return digest_parts(sha256_md(), {data}); }

struct Blake2s::Impl {
  detail::MdCtxPtr ctx{EVP_MD_CTX_new()};
};

Blake2s::Blake2s() : impl_(std::make_unique<Impl>()) {
  detail::check(impl_->ctx != nullptr, "EVP_MD_CTX_new");
  reset();
}

Blake2s::~Blake2s() = default;

Blake2s& Blake2s::reset() {
  detail::check(EVP_DigestInit_ex2(impl_->ctx.get(), blake2s_md(), nullptr) == 1,
                "DigestInit");
  return *this;
}

Blake2s& Blake2s::update(ByteView data) {
  detail::check(
      EVP_DigestUpdate(impl_->ctx.get(), data.data(), data.size()) == 1,
      "DigestUpdate");
  return *this;
}

Digest Blake2s::finish() {
  Digest out{};
  unsigned int len = 0;
  detail::check(EVP_DigestFinal_ex(impl_->ctx.get(), out.data(), &len) == 1,
                "DigestFinal");
  reset();
  return out;
}

}  // namespace p3::crypto
