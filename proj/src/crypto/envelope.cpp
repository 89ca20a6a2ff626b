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

#include "p3/crypto/envelope.hpp"

#include <openssl/evp.h>

#include "openssl_util.hpp"
#include "p3/error.hpp"

namespace p3::crypto {

namespace {
constexpr std::uint8_t kVersion = 0x01;
constexpr std::size_t kKeyLen = 32;
constexpr std::size_t kNonceLen = 12;
constexpr std::size_t kTagLen = 16;

[[noreturn]] void auth_failure(const char* what) {
  throw Error(Errc::kAuthenticationFailure, what);
}
}  // namespace

Bytes encrypt_record(const PublicKey& key, ByteView plaintext, Rng& rng) {
  auto sym_key = rng.array<kKeyLen>();
  auto nonce = rng.array<kNonceLen>();
  Bytes wrapped = oaep_encrypt(key, sym_key, rng);

  detail::CipherCtxPtr ctx(EVP_CIPHER_CTX_new());
  detail::check(ctx != nullptr, "EVP_CIPHER_CTX_new");
  detail::check(EVP_EncryptInit_ex(ctx.get(), EVP_aes_256_gcm(), nullptr, nullptr,
                                   nullptr) == 1 &&
                    EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_SET_IVLEN,
                                        static_cast<int>(kNonceLen), nullptr) == 1 &&
                    EVP_EncryptInit_ex(ctx.get(), nullptr, nullptr, sym_key.data(),
                                       nonce.data()) == 1,
                "GCM init");
  int len = 0;
  detail::check(EVP_EncryptUpdate(ctx.get(), nullptr, &len, wrapped.data(),
                                  static_cast<int>(wrapped.size())) == 1,
                "GCM aad");
  Bytes ct(plaintext.size());
  if (!plaintext.empty()) {
    detail::check(EVP_EncryptUpdate(ctx.get(), ct.data(), &len, plaintext.data(),
                                    static_cast<int>(plaintext.size())) == 1,
                  "GCM update");
  }
  int final_len = 0;
  detail::check(EVP_EncryptFinal_ex(ctx.get(), ct.data() + len, &final_len) == 1,
                "GCM final");
  ByteArray<kTagLen> tag{};
  detail::check(EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_GET_TAG,
                                    static_cast<int>(kTagLen), tag.data()) == 1,
                "GCM tag");

  ByteWriter w;
  w.u8(kVersion);
  w.var16(wrapped);
  w.raw(nonce);
  w.raw(ct);
  w.raw(tag);
  return std::move(w).take();
}

Bytes decrypt_record(const PrivateKey& key, ByteView envelope) {
  ByteView wrapped, nonce, ct, tag;
  try {
    ByteReader r(envelope);
    if (r.u8() != kVersion) auth_failure("unknown envelope version");
    wrapped = r.var16();
    nonce = r.raw(kNonceLen);
    if (r.remaining() < kTagLen) auth_failure("truncated envelope");
    ct = r.raw(r.remaining() - kTagLen);
    tag = r.raw(kTagLen);
  } catch (const DecodeError&) {
    auth_failure("malformed envelope");
  }

  Bytes sym_key = oaep_decrypt(key, wrapped);  // throws authentication-failure
  if (sym_key.size() != kKeyLen) auth_failure("wrapped key has wrong size");

  detail::CipherCtxPtr ctx(EVP_CIPHER_CTX_new());
  detail::check(ctx != nullptr, "EVP_CIPHER_CTX_new");
  detail::check(EVP_DecryptInit_ex(ctx.get(), EVP_aes_256_gcm(), nullptr, nullptr,
                                   nullptr) == 1 &&
                    EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_SET_IVLEN,
                                        static_cast<int>(kNonceLen), nullptr) == 1 &&
                    EVP_DecryptInit_ex(ctx.get(), nullptr, nullptr, sym_key.data(),
                                       nonce.data()) == 1,
                "GCM init");
  int len = 0;
  detail::check(EVP_DecryptUpdate(ctx.get(), nullptr, &len, wrapped.data(),
                                  static_cast<int>(wrapped.size())) == 1,
                "GCM aad");
  Bytes pt(ct.size());
  if (!ct.empty()) {
    detail::check(EVP_DecryptUpdate(ctx.get(), pt.data(), &len, ct.data(),
                                    static_cast<int>(ct.size())) == 1,
                  "GCM update");
  }
  Bytes tag_copy(tag.begin(), tag.end());
  detail::check(EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_SET_TAG,
                                    static_cast<int>(kTagLen), tag_copy.data()) == 1,
                "GCM set tag");
  int final_len = 0;
  if (EVP_DecryptFinal_ex(ctx.get(), pt.data() + len, &final_len) != 1) {
    ERR_clear_error();
    auth_failure("GCM tag mismatch");
  }
  return pt;
}

}  // namespace p3::crypto
