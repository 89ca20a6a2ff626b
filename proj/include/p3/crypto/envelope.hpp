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

#include "p3/bytes.hpp"
#include "p3/crypto/rsa.hpp"
#include "p3/rng.hpp"

namespace p3::crypto {

// Hybrid record envelope:
//
//   0x01 || len16(wrapped_key) || wrapped_key || nonce(12) || ciphertext || tag(16)
//
// wrapped_key is a fresh AES-256 key under RSA-OAEP; the record is sealed
// with AES-256-GCM using wrapped_key as associated data. Every call draws a
// fresh key and nonce, so equal plaintexts never produce equal envelopes.
Bytes encrypt_record(const PublicKey& key, ByteView plaintext, Rng& rng);

// Throws Errc::kAuthenticationFailure on a wrong key, any tampering or a
// malformed envelope.
Bytes decrypt_record(const PrivateKey& key, ByteView envelope);

}  // namespace p3::crypto
