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

#include <memory>
#include <optional>

#include "p3/bytes.hpp"
#include "p3/rng.hpp"

struct evp_pkey_st;

namespace p3::crypto {

inline constexpr int kDefaultKeyBits = 3072;

bool is_supported_key_bits(int bits);

// RSA public key. Copies share one immutable OpenSSL key object.
class PublicKey {
 public:
  PublicKey() = default;
  PublicKey(Bytes modulus, Bytes exponent);

  // len32(modulus) || modulus || len32(exponent) || exponent, big-endian,
  // no leading zero bytes. Pseudonyms hash exactly these bytes.
  Bytes canonical() const;
  static PublicKey from_canonical(ByteView encoding);

  const Bytes& modulus() const { return modulus_; }
  const Bytes& exponent() const { return exponent_; }
  int bits() const;
  std::size_t modulus_bytes() const { return modulus_.size(); }
  bool empty() const { return modulus_.empty(); }

  evp_pkey_st* evp() const { return pkey_.get(); }

  friend bool operator==(const PublicKey& a, const PublicKey& b) {
    return a.modulus_ == b.modulus_ && a.exponent_ == b.exponent_;
  }

 private:
  Bytes modulus_;
  Bytes exponent_;
  std::shared_ptr<evp_pkey_st> pkey_;
};

class PrivateKey {
 public:
  struct Components {
    Bytes n, e, d, p, q, dp, dq, qinv;
  };

  PrivateKey() = default;
  explicit PrivateKey(Components c);

  Bytes encode() const;
  static PrivateKey decode(ByteView encoding);

  PublicKey public_key() const { return PublicKey(c_.n, c_.e); }
  const Components& components() const { return c_; }
  bool empty() const { return c_.n.empty(); }

  evp_pkey_st* evp() const { return pkey_.get(); }

 private:
  Components c_;
  std::shared_ptr<evp_pkey_st> pkey_;
};

struct KeyPair {
  PublicKey public_key;
  PrivateKey private_key;
  int bits = 0;

  Bytes encode() const { return private_key.encode(); }
  static KeyPair decode(ByteView encoding);
};

// One key pair per block side; the type is the same as a long-term identity
// key pair, the name documents intent at call sites.
using OneTimeKeyPair = KeyPair;

// Generates an RSA key pair with e = 65537. With a seed the result is a pure
// function of (bits, seed). Throws Errc::kUnsupportedBits unless bits is
// 2048, 3072 or 4096.
KeyPair generate_keypair(int bits = kDefaultKeyBits,
                         const std::optional<Seed>& seed = std::nullopt);
KeyPair generate_keypair(int bits, Rng& rng);

// RSASSA-PSS over SHA-256, MGF1-SHA-256, 32-byte salt drawn from rng.
Bytes sign(const PrivateKey& key, ByteView message, Rng& rng);
bool verify(const PublicKey& key, ByteView message, ByteView signature);

// RSAES-OAEP with SHA-256 / MGF1-SHA-256 and an empty label. The payload
// limit is modulus_bytes - 66.
Bytes oaep_encrypt(const PublicKey& key, ByteView message, Rng& rng);
Bytes oaep_decrypt(const PrivateKey& key, ByteView ciphertext);
std::size_t oaep_max_message(const PublicKey& key);

}  // namespace p3::crypto
