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

#include "p3/crypto/rsa.hpp"

#include <openssl/core_names.h>
#include <openssl/rsa.h>

#include <vector>

#include "openssl_util.hpp"
#include "p3/crypto/hash.hpp"
#include "p3/error.hpp"

namespace p3::crypto {

using detail::BnCtxPtr;
using detail::BnPtr;
using detail::check;

namespace {

constexpr std::uint32_t kPublicExponent = 65537;
constexpr std::size_t kHashLen = 32;
constexpr std::size_t kSaltLen = 32;
constexpr std::size_t kSieveWindow = 1 << 14;

std::shared_ptr<EVP_PKEY> wrap(EVP_PKEY* p) {
  return {p, detail::PkeyFree{}};
}

// Builds an EVP_PKEY from big-endian components via the provider API.
std::shared_ptr<EVP_PKEY> build_pkey(
    std::initializer_list<std::pair<const char*, const Bytes*>> fields,
    int selection) {
  detail::ParamBldPtr bld(OSSL_PARAM_BLD_new());
  check(bld != nullptr, "OSSL_PARAM_BLD_new");
  std::vector<BnPtr> keep;
  for (const auto& [name, value] : fields) {
    keep.push_back(detail::bn_from_bytes(*value));
    check(OSSL_PARAM_BLD_push_BN(bld.get(), name, keep.back().get()) == 1,
          "OSSL_PARAM_BLD_push_BN");
  }
  detail::ParamPtr params(OSSL_PARAM_BLD_to_param(bld.get()));
  check(params != nullptr, "OSSL_PARAM_BLD_to_param");
  detail::PkeyCtxPtr ctx(EVP_PKEY_CTX_new_from_name(nullptr, "RSA", nullptr));
  check(ctx != nullptr, "EVP_PKEY_CTX_new_from_name");
  check(EVP_PKEY_fromdata_init(ctx.get()) == 1, "EVP_PKEY_fromdata_init");
  EVP_PKEY* pkey = nullptr;
  check(EVP_PKEY_fromdata(ctx.get(), &pkey, selection, params.get()) == 1,
        "EVP_PKEY_fromdata");
  return wrap(pkey);
}

Bytes strip_leading_zeros(ByteView v) {
  std::size_t i = 0;
  while (i < v.size() && v[i] == 0) ++i;
  return {v.begin() + static_cast<std::ptrdiff_t>(i), v.end()};
}

const std::vector<std::uint32_t>& small_primes() {
  static const std::vector<std::uint32_t> primes = [] {
    constexpr std::uint32_t kLimit = 17864;  // first 2048 primes
    std::vector<bool> composite(kLimit, false);
    std::vector<std::uint32_t> out;
    for (std::uint32_t i = 3; i < kLimit; i += 2) {
      if (composite[i]) continue;
      out.push_back(i);
      for (std::uint64_t j = std::uint64_t{i} * i; j < kLimit; j += 2 * i) {
        composite[j] = true;
      }
    }
    return out;
  }();
  return primes;
}

// FIPS 186-4 Table C.2 round counts for auxiliary-free probable primes
// (error probability at most 2^-100 for the corresponding modulus size).
int mr_rounds(int prime_bits) { return prime_bits >= 1536 ? 4 : 5; }

// Miller-Rabin with bases drawn from rng, so seeded generation stays a pure
// function of the seed.
bool miller_rabin(const BIGNUM* n, int rounds, Rng& rng, BN_CTX* ctx) {
  BnPtr n1(BN_dup(n)), d(BN_new()), a(BN_new()), x(BN_new()), range(BN_new());
  check(n1 && d && a && x && range, "BN alloc");
  check(BN_sub_word(n1.get(), 1) == 1, "BN_sub_word");
  int s = 0;
  while (!BN_is_bit_set(n1.get(), s)) ++s;
  check(BN_rshift(d.get(), n1.get(), s) == 1, "BN_rshift");
  check(BN_copy(range.get(), n1.get()) != nullptr && BN_sub_word(range.get(), 2) == 1,
        "BN range");
  std::unique_ptr<BN_MONT_CTX, decltype(&BN_MONT_CTX_free)> mont(BN_MONT_CTX_new(),
                                                                 &BN_MONT_CTX_free);
  check(mont && BN_MONT_CTX_set(mont.get(), n, ctx) == 1, "BN_MONT_CTX_set");
  const std::size_t nbytes = static_cast<std::size_t>(BN_num_bytes(n));
  for (int round = 0; round < rounds; ++round) {
    // a uniform in [2, n - 2]: reduce 64 extra bits of randomness mod (n - 3).
    Bytes raw = rng.bytes(nbytes + 8);
    BnPtr wide = detail::bn_from_bytes(raw);
    check(BN_mod(a.get(), wide.get(), range.get(), ctx) == 1, "BN_mod");
    check(BN_add_word(a.get(), 2) == 1, "BN_add_word");
    check(BN_mod_exp_mont(x.get(), a.get(), d.get(), n, ctx, mont.get()) == 1,
          "BN_mod_exp_mont");
    if (BN_is_one(x.get()) || BN_cmp(x.get(), n1.get()) == 0) continue;
    bool reached_minus_one = false;
    for (int i = 1; i < s && !reached_minus_one; ++i) {
      check(BN_mod_mul(x.get(), x.get(), x.get(), n, ctx) == 1, "BN_mod_mul");
      if (BN_is_one(x.get())) return false;
      reached_minus_one = BN_cmp(x.get(), n1.get()) == 0;
    }
    if (!reached_minus_one) return false;
  }
  return true;
}

// Incremental sieve search from a random odd start with the two top bits
// set, so the product of two such primes has exactly 2*bits bits.
BnPtr generate_prime(int bits, Rng& rng, BN_CTX* ctx) {
  const auto& primes = small_primes();
  std::vector<std::uint32_t> residues(primes.size());
  for (;;) {
    Bytes start = rng.bytes(static_cast<std::size_t>(bits) / 8);
    start.front() |= 0xC0;
    start.back() |= 0x01;
    BnPtr base = detail::bn_from_bytes(start);
    for (std::size_t i = 0; i < primes.size(); ++i) {
      residues[i] = static_cast<std::uint32_t>(BN_mod_word(base.get(), primes[i]));
    }
    BnPtr candidate(BN_new());
    check(candidate != nullptr, "BN_new");
    for (std::uint32_t delta = 0; delta < kSieveWindow; delta += 2) {
      bool sieved = false;
      for (std::size_t i = 0; i < primes.size(); ++i) {
        if ((residues[i] + delta) % primes[i] == 0) {
          sieved = true;
          break;
        }
      }
      if (sieved) continue;
      check(BN_copy(candidate.get(), base.get()) != nullptr, "BN_copy");
      check(BN_add_word(candidate.get(), delta) == 1, "BN_add_word");
      if (BN_num_bits(candidate.get()) != bits) break;
      // gcd(p - 1, e) must be 1; e is prime.
      if (BN_mod_word(candidate.get(), kPublicExponent) == 1) continue;
      if (miller_rabin(candidate.get(), mr_rounds(bits), rng, ctx)) {
        return candidate;
      }
    }
  }
}

Bytes mgf1(ByteView seed, std::size_t len) {
  Bytes out;
  out.reserve(len + kHashLen);
  for (std::uint32_t counter = 0; out.size() < len; ++counter) {
    ByteWriter w;
    w.raw(seed);
    w.u32(counter);
    auto block = sha256(w.bytes());
    out.insert(out.end(), block.begin(), block.end());
  }
  out.resize(len);
  return out;
}

Bytes raw_public(const PublicKey& key, ByteView block) {
  detail::PkeyCtxPtr ctx(EVP_PKEY_CTX_new_from_pkey(nullptr, key.evp(), nullptr));
  check(ctx != nullptr, "EVP_PKEY_CTX_new_from_pkey");
  check(EVP_PKEY_encrypt_init(ctx.get()) == 1, "encrypt_init");
  check(EVP_PKEY_CTX_set_rsa_padding(ctx.get(), RSA_NO_PADDING) == 1,
        "set padding");
  std::size_t len = 0;
  check(EVP_PKEY_encrypt(ctx.get(), nullptr, &len, block.data(), block.size()) == 1,
        "encrypt size");
  Bytes out(len);
  check(EVP_PKEY_encrypt(ctx.get(), out.data(), &len, block.data(),
                         block.size()) == 1,
        "raw public operation");
  out.resize(len);
  return out;
}

Bytes raw_private(const PrivateKey& key, ByteView block) {
  detail::PkeyCtxPtr ctx(EVP_PKEY_CTX_new_from_pkey(nullptr, key.evp(), nullptr));
  check(ctx != nullptr, "EVP_PKEY_CTX_new_from_pkey");
  check(EVP_PKEY_decrypt_init(ctx.get()) == 1, "decrypt_init");
  check(EVP_PKEY_CTX_set_rsa_padding(ctx.get(), RSA_NO_PADDING) == 1,
        "set padding");
  std::size_t len = 0;
  check(EVP_PKEY_decrypt(ctx.get(), nullptr, &len, block.data(), block.size()) == 1,
        "decrypt size");
  Bytes out(len);
  check(EVP_PKEY_decrypt(ctx.get(), out.data(), &len, block.data(),
                         block.size()) == 1,
        "raw private operation");
  out.resize(len);
  return out;
}

}  // namespace

bool is_supported_key_bits(int bits) {
  return bits == 2048 || bits == 3072 || bits == 4096;
}

PublicKey::PublicKey(Bytes modulus, Bytes exponent)
    : modulus_(strip_leading_zeros(modulus)),
      exponent_(strip_leading_zeros(exponent)) {
  if (modulus_.empty() || exponent_.empty() || (modulus_.back() & 1) == 0) {
    throw Error(Errc::kInvalidArgument, "malformed RSA public key");
  }
  pkey_ = build_pkey({{OSSL_PKEY_PARAM_RSA_N, &modulus_},
                      {OSSL_PKEY_PARAM_RSA_E, &exponent_}},
                     EVP_PKEY_PUBLIC_KEY);
}

Bytes PublicKey::canonical() const {
  ByteWriter w;
  w.var32(modulus_);
  w.var32(exponent_);
  return std::move(w).take();
}

PublicKey PublicKey::from_canonical(ByteView encoding) {
  ByteReader r(encoding);
  auto n = r.var32();
  auto e = r.var32();
  r.expect_done();
  if (n.empty() || n[0] == 0 || e.empty() || e[0] == 0) {
    throw DecodeError("non-canonical public key encoding");
  }
  try {
    return PublicKey(Bytes(n.begin(), n.end()), Bytes(e.begin(), e.end()));
  } catch (const Error& err) {
    throw DecodeError(err.what());
  }
}

int PublicKey::bits() const {
  if (modulus_.empty()) return 0;
  int top = 0;
  for (auto b = modulus_.front(); b != 0; b >>= 1) ++top;
  return static_cast<int>((modulus_.size() - 1) * 8) + top;
}

PrivateKey::PrivateKey(Components c) : c_(std::move(c)) {
  for (Bytes* field : {&c_.n, &c_.e, &c_.d, &c_.p, &c_.q, &c_.dp, &c_.dq, &c_.qinv}) {
    *field = strip_leading_zeros(*field);
    if (field->empty()) {
      throw Error(Errc::kInvalidArgument, "malformed RSA private key");
    }
  }
  pkey_ = build_pkey({{OSSL_PKEY_PARAM_RSA_N, &c_.n},
                      {OSSL_PKEY_PARAM_RSA_E, &c_.e},
                      {OSSL_PKEY_PARAM_RSA_D, &c_.d},
                      {OSSL_PKEY_PARAM_RSA_FACTOR1, &c_.p},
                      {OSSL_PKEY_PARAM_RSA_FACTOR2, &c_.q},
                      {OSSL_PKEY_PARAM_RSA_EXPONENT1, &c_.dp},
                      {OSSL_PKEY_PARAM_RSA_EXPONENT2, &c_.dq},
                      {OSSL_PKEY_PARAM_RSA_COEFFICIENT1, &c_.qinv}},
                     EVP_PKEY_KEYPAIR);
}

Bytes PrivateKey::encode() const {
  ByteWriter w;
  for (const Bytes* field : {&c_.n, &c_.e, &c_.d, &c_.p, &c_.q, &c_.dp, &c_.dq, &c_.qinv}) {
    w.var32(*field);
  }
  return std::move(w).take();
}

PrivateKey PrivateKey::decode(ByteView encoding) {
  ByteReader r(encoding);
  Components c;
  for (Bytes* field : {&c.n, &c.e, &c.d, &c.p, &c.q, &c.dp, &c.dq, &c.qinv}) {
    auto v = r.var32();
    *field = Bytes(v.begin(), v.end());
  }
  r.expect_done();
  try {
    return PrivateKey(std::move(c));
  } catch (const Error& err) {
    throw DecodeError(err.what());
  }
}

KeyPair KeyPair::decode(ByteView encoding) {
  KeyPair kp;
  kp.private_key = PrivateKey::decode(encoding);
  kp.public_key = kp.private_key.public_key();
  kp.bits = kp.public_key.bits();
  return kp;
}

KeyPair generate_keypair(int bits, const std::optional<Seed>& seed) {
  if (!is_supported_key_bits(bits)) {
    throw Error(Errc::kUnsupportedBits, std::to_string(bits));
  }
  Rng rng = seed ? Rng(*seed) : Rng::from_os();
  return generate_keypair(bits, rng);
}

KeyPair generate_keypair(int bits, Rng& rng) {
  if (!is_supported_key_bits(bits)) {
    throw Error(Errc::kUnsupportedBits, std::to_string(bits));
  }
  BnCtxPtr ctx(BN_CTX_new());
  check(ctx != nullptr, "BN_CTX_new");
  const int half = bits / 2;
  BnPtr p = generate_prime(half, rng, ctx.get());
  BnPtr q;
  BnPtr diff(BN_new());
  for (;;) {
    q = generate_prime(half, rng, ctx.get());
    check(BN_sub(diff.get(), p.get(), q.get()) == 1, "BN_sub");
    // |p - q| must not be tiny (FIPS 186-4 B.3.3 uses 2^(half - 100)).
    if (BN_num_bits(diff.get()) > half - 100) break;
  }
  BnPtr n(BN_new()), e(BN_new()), d(BN_new()), p1(BN_new()), q1(BN_new()),
      phi(BN_new()), g(BN_new()), lambda(BN_new()), dp(BN_new()), dq(BN_new()),
      qinv(BN_new()), rem(BN_new());
  check(BN_mul(n.get(), p.get(), q.get(), ctx.get()) == 1, "BN_mul");
  check(BN_set_word(e.get(), kPublicExponent) == 1, "BN_set_word");
  check(BN_sub(p1.get(), p.get(), BN_value_one()) == 1, "BN_sub");
  check(BN_sub(q1.get(), q.get(), BN_value_one()) == 1, "BN_sub");
  check(BN_mul(phi.get(), p1.get(), q1.get(), ctx.get()) == 1, "BN_mul");
  check(BN_gcd(g.get(), p1.get(), q1.get(), ctx.get()) == 1, "BN_gcd");
  check(BN_div(lambda.get(), rem.get(), phi.get(), g.get(), ctx.get()) == 1, "BN_div");
  check(BN_mod_inverse(d.get(), e.get(), lambda.get(), ctx.get()) != nullptr,
        "BN_mod_inverse(d)");
  check(BN_mod(dp.get(), d.get(), p1.get(), ctx.get()) == 1, "BN_mod");
  check(BN_mod(dq.get(), d.get(), q1.get(), ctx.get()) == 1, "BN_mod");
  check(BN_mod_inverse(qinv.get(), q.get(), p.get(), ctx.get()) != nullptr,
        "BN_mod_inverse(qinv)");

  PrivateKey::Components c{detail::bn_to_bytes(n.get()), detail::bn_to_bytes(e.get()),
                           detail::bn_to_bytes(d.get()), detail::bn_to_bytes(p.get()),
                           detail::bn_to_bytes(q.get()), detail::bn_to_bytes(dp.get()),
                           detail::bn_to_bytes(dq.get()), detail::bn_to_bytes(qinv.get())};
  KeyPair kp;
  kp.private_key = PrivateKey(std::move(c));
  kp.public_key = kp.private_key.public_key();
  kp.bits = bits;
  return kp;
}

// EMSA-PSS-ENCODE (RFC 8017 9.1.1) with emBits = modBits - 1, then the raw
// private-key operation. Verification goes through OpenSSL's own PSS code.
Bytes sign(const PrivateKey& key, ByteView message, Rng& rng) {
  if (key.empty()) throw Error(Errc::kInvalidArgument, "empty private key");
  const PublicKey pub = key.public_key();
  const std::size_t mod_bits = static_cast<std::size_t>(pub.bits());
  const std::size_t em_bits = mod_bits - 1;
  const std::size_t em_len = (em_bits + 7) / 8;
  const std::size_t k = pub.modulus_bytes();

  auto m_hash = sha256(message);
  Bytes salt = rng.bytes(kSaltLen);
  ByteWriter m_prime;
  m_prime.raw(Bytes(8, 0));
  m_prime.raw(m_hash);
  m_prime.raw(salt);
  auto h = sha256(m_prime.bytes());

  const std::size_t db_len = em_len - kHashLen - 1;
  Bytes db(db_len, 0);
  db[db_len - kSaltLen - 1] = 0x01;
  std::copy(salt.begin(), salt.end(), db.end() - static_cast<std::ptrdiff_t>(kSaltLen));
  xor_into(db, mgf1(h, db_len));
  db[0] &= static_cast<std::uint8_t>(0xFF >> (8 * em_len - em_bits));

  Bytes em(k - em_len, 0);  // leading zero when modBits % 8 == 1
  em.insert(em.end(), db.begin(), db.end());
  em.insert(em.end(), h.begin(), h.end());
  em.push_back(0xBC);
  return detail::bn_to_padded(
      detail::bn_from_bytes(raw_private(key, em)).get(), k);
}

bool verify(const PublicKey& key, ByteView message, ByteView signature) {
  if (key.empty() || signature.size() != key.modulus_bytes()) return false;
  detail::MdCtxPtr md(EVP_MD_CTX_new());
  if (!md) return false;
  EVP_PKEY_CTX* pctx = nullptr;
  bool ok = EVP_DigestVerifyInit_ex(md.get(), &pctx, "SHA256", nullptr, nullptr,
                                    key.evp(), nullptr) == 1 &&
            EVP_PKEY_CTX_set_rsa_padding(pctx, RSA_PKCS1_PSS_PADDING) == 1 &&
            EVP_PKEY_CTX_set_rsa_pss_saltlen(pctx, static_cast<int>(kSaltLen)) == 1 &&
            EVP_PKEY_CTX_set_rsa_mgf1_md_name(pctx, "SHA256", nullptr) == 1 &&
            EVP_DigestVerify(md.get(), signature.data(), signature.size(),
                             message.data(), message.size()) == 1;
  ERR_clear_error();
  return ok;
}

std::size_t oaep_max_message(const PublicKey& key) {
  return key.modulus_bytes() - 2 * kHashLen - 2;
}

// EME-OAEP encoding (RFC 8017 7.1.1) with caller-supplied seed randomness,
// then the raw public-key operation. Decryption uses OpenSSL's OAEP.
Bytes oaep_encrypt(const PublicKey& key, ByteView message, Rng& rng) {
  const std::size_t k = key.modulus_bytes();
  if (message.size() > oaep_max_message(key)) {
    throw Error(Errc::kInvalidArgument, "OAEP message too long");
  }
  static const Digest kEmptyLabelHash = sha256({});
  Bytes db;
  db.reserve(k - kHashLen - 1);
  db.insert(db.end(), kEmptyLabelHash.begin(), kEmptyLabelHash.end());
  db.resize(k - message.size() - kHashLen - 2, 0);
  db.push_back(0x01);
  db.insert(db.end(), message.begin(), message.end());

  Bytes seed = rng.bytes(kHashLen);
  xor_into(db, mgf1(seed, db.size()));
  xor_into(seed, mgf1(db, kHashLen));

  Bytes em;
  em.reserve(k);
  em.push_back(0x00);
  em.insert(em.end(), seed.begin(), seed.end());
  em.insert(em.end(), db.begin(), db.end());
  return detail::bn_to_padded(detail::bn_from_bytes(raw_public(key, em)).get(), k);
}

Bytes oaep_decrypt(const PrivateKey& key, ByteView ciphertext) {
  if (key.empty()) throw Error(Errc::kInvalidArgument, "empty private key");
  detail::PkeyCtxPtr ctx(EVP_PKEY_CTX_new_from_pkey(nullptr, key.evp(), nullptr));
  check(ctx != nullptr, "EVP_PKEY_CTX_new_from_pkey");
  std::size_t len = 0;
  bool ok = EVP_PKEY_decrypt_init(ctx.get()) == 1 &&
            EVP_PKEY_CTX_set_rsa_padding(ctx.get(), RSA_PKCS1_OAEP_PADDING) == 1 &&
            EVP_PKEY_CTX_set_rsa_oaep_md_name(ctx.get(), "SHA256", nullptr) == 1 &&
            EVP_PKEY_CTX_set_rsa_mgf1_md_name(ctx.get(), "SHA256", nullptr) == 1 &&
            EVP_PKEY_decrypt(ctx.get(), nullptr, &len, ciphertext.data(),
                             ciphertext.size()) == 1;
  Bytes out(len);
  ok = ok && EVP_PKEY_decrypt(ctx.get(), out.data(), &len, ciphertext.data(),
                              ciphertext.size()) == 1;
  ERR_clear_error();
  if (!ok) {
    throw Error(Errc::kAuthenticationFailure, "OAEP decryption failed");
  }
  out.resize(len);
  return out;
}

}  // namespace p3::crypto
