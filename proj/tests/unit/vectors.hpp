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

// Reference values produced by tests/oracles/gen_vectors.py (hashlib and
// the Python `cryptography` package). Do not regenerate casually: the
// interop key and envelope are random and frozen here.

namespace p3::test_vectors {

inline constexpr const char* kBlake2sAbc =
    "508c5e8c327c14e2e1a72ba34eeb452f37458b209ed63a294d999b4c86675982";

inline constexpr const char* kBlake2sEmpty =
    "69217a3079908094e11121d042354a7c1f55b6482ca1a51e1b250dfd1ed0eef9";

inline constexpr const char* kBlake2sKeyed =
    "5211d1aefc0025be7f85c06b3e14e0fc645ae12bd41746485ea6d8a364a2eaee";

inline constexpr const char* kCanonicalKey =
    "00000020c5171717171717171717171717171717171717171717171717171717"
    "1717173b00000003010001";

inline constexpr const char* kCanonicalPseudonym =
    "e22e9f320855f1de118b4a86f1318f6969a4a7eefb04f1d04aa9a3abc2d74184";

inline constexpr const char* kSlowChainOne =
    "d6b59ee1a83dc495bc72bb8544e3cf79a6adffc43f2db1d8ba2b7f344b79ecc7";

inline constexpr const char* kSlowOne =
    "42d30a8cd25ace9f3517dfc6e438471e5d579a3defd880455f3d8a46e1ed14e0"
    "f24406b30de335602c1999c8c31810cdca8c8311692fe25d3f6355cc478ee852"
    "61140e5bca8d1bf69a948d9919715f7a";

inline constexpr const char* kSlowThousand =
    "6bb541ff17efd668ddde5ad349b3d7659a91de93fe2510fb7b6b2afa82d95425"
    "8f13856910c9b50b265ad5facd10b7f2cc75edcc2b398646f703bea40d9c6f07"
    "3a48dec39b566a1ef36924678c81b317";

inline constexpr const char* kSlowShort =
    "ee605caf93c9dfe8526e";

inline constexpr const char* kShard2 =
    "b6f9c03f7aeea75875da0e51b49bb276";

inline constexpr const char* kShard5 =
    "f0a06537495b35679269c5d1e93aa48a";

inline constexpr const char* kShard9 =
    "f7174bdcaacc9a0d310cf20d13b14ca0";

inline constexpr const char* kInteropN =
    "c720988bf9536cf0e7f1004a4d8ab54aeecad2f8cdde54bfe0001889a4a0d849"
    "154d18d8a8cb5f2a161614eb2ade833f95d2061e3a0e22b19d842478f66bac09"
    "80cbbcbcbc909d6b47959ba87dbd1dad72fb4c8992e28a4d51a3884bcf6b8c96"
    "610b60a2c6ac6ddb7e65c56e5af6d5bf00282ca0c51f8d5ac999a4841b286e7d"
    "f01201e7f2cd015023e48343d4d4640445c892ad0e65b0820006975fb913fedd"
    "d4f20427545c6f62c74f88630a419017a10d1e20e349c3762c1b27fd2db1a955"
    "c8288cda2e292a2ea4892fe15f4fb2589c320a1718a300ec7917741bf2bfa5d4"
    "a9077d7892ae6f167da12d65e69b02c7cd79e42b71a09f29b7865332777b2401";

inline constexpr const char* kInteropE =
    "010001";

inline constexpr const char* kInteropD =
    "3cd1cee609dc1a4d267aacbd051c15ad726c0eae21ab03b5ab443c3a66471e68"
    "8c120541bfa486478381711836fac999b537f5d86ba0ffa5c257a7102f2bc9db"
    "0934b14bf048375c99fbaf14727b3dc2497949f24723dc5c2b504883e731913a"
    "291fe17f36315a488d3da664c371daed40ae049b8239d5e1e1eb849d38f24b74"
    "afaa7304de8cf38fe5652934f3a72940180b61632e1b363bef108d5eed4c0f02"
    "aacce03996175893eb24cc4ef1461242f33a837877ad8334758cea922af4e24c"
    "2a804e69de75561e346c230b192d29cd459265da7284d06cdeb72bbc6d330f63"
    "1996bf271052fb80f0c86b58bfe2f8eef9451f6af423e9a2dc52712459eeb705";

inline constexpr const char* kInteropP =
    "ee84b83ddd27814805dbf36918b047e028046bee1ffe1d80d5ffb95003732e93"
    "38179d633a5170ef64717882e1cee3440e1d385a9f030063f7ec7029fa197eb7"
    "0438ee42b7273721515381a8d5813b58b38fb92c9d7c0ce3822850d8a375c370"
    "dcf90c1dbfc15e63c2bf2a2255fafdbd0caa4a3a6885cdb89c8cda1505f11b87";

inline constexpr const char* kInteropQ =
    "d5b8c9a0db371a58e823aaccb846fcb3bf496f234e8c59f6922998ddb54f02ab"
    "dd1949067fb4609de01057d4a0a71dd171d87f4ee763a42f8b941f1be3615ca0"
    "022cb6d9b38fbf77713bf43d02fe31b3dc1adc68b1355e090d642d96c27616bf"
    "1957d482e6227cd4cbed19699c0fe6bb8255b64e8e2a212c11f7930a8d927637";

inline constexpr const char* kInteropDp =
    "59b74c41e0ccba41280b0aacae5fa8397573ec50fe71ac1148ed4e7bfd4036f5"
    "a334a6bbab34f500e6cc13a34f626d73acc76aea1343a2c2f77f54d545408fbc"
    "3177648f6daaef7eb5c36e52de3424e98168ff22fbfdac2f6b46d4da17e9f4e0"
    "a00d8174332b7de092612b6d0ce042cef85399660ce8bf6fc05aeeb0d7b25043";

inline constexpr const char* kInteropDq =
    "85bb0aef4c3c3e9043318e3e6b507fef395289e85dce14bce4d8827eb864a817"
    "4252000fc0f8ed3bdc685d8cfeb9933eeb2dbcfb726e36de494875eecd68aebc"
    "b09faa0aaf00d39db98cfa56f2f87bc13f88cf41f320a1a6a86a76dc4ef1f569"
    "be41e707c158f3237436f81fcd3765f90ea4f35e5436a86b1b12ff3f2b36ea21";

inline constexpr const char* kInteropQinv =
    "65b881530bb43dee3c05ed0fc11dd33bc963e079792b93107c36ea2862bc99c1"
    "16d7a4742f54124771f061fe6fa79dea810639175799e5087033f118f115195b"
    "3c16f96713add5cb024408a835450e847d1b516c03bf3a83ece02bde16c70085"
    "c7bac8d7c45071b985f42fb3b352a3da1f0d2cc92a7565de2441909459243f57";

inline constexpr const char* kInteropEnvelope =
    "01010014e13c370d18ebc5f3867036641d0c25060f1a7962732280ef3174de06"
    "7a54560a96a4c48e9fa130f6d6fa8e877b839f70d8c553d6ede4c324207918f3"
    "4cb8aa82674d70acf2a12bf52397e4f1ef9308f3d146412a105bda4f5f046920"
    "64593e8f9e2435ac5dc217977706a389088075d82f589b8e7199ddc6d46dd313"
    "a0999539160b48de6e5f16a65e372f8be3dafda68bac1f97920d47fbeb726c32"
    "620f17c9b6987e39d26d64314c047e56704d0e90c1b98495fda5af479366700b"
    "8b7e00c370d5886c91b3fc84d47b5a466a549fa050397ef1b547f268966be30a"
    "012c1d12772a1162708c6b0acf9eff46d174dca4a3e59ed1f63c21b5f9e10669"
    "44e5fb18cec79ce82550ed39139db6cb9a724b9ad06d9d93790952b911276198"
    "d398922bdb7b9ca7fc295dac8c463392d52887f719";

inline constexpr const char* kInteropSignature =
    "1a326199f4b94c215e35783090edb0bd29e919babf90c9214b0a414096fe7ff6"
    "ed40737981fe63f40cefd3b9a7413e412b512a750803fd74f944a3c562a4f455"
    "ef3a3423f8072ac808eeb8a657e6d144454d32c33c5d0e7b34675fe96af96f0b"
    "1bae74c76f879dea8928ea4f4d5285a19d3276266565ac8b688ec145950ccdad"
    "79e89b3b1ae67b5d9ec6a309a59b7841dabf91547b1320376e8fe54e2b0bbec6"
    "3655ab7cfa12c832acfcaf7f69533176704503aa3e2872cdb1a7463000d87cb3"
    "63a7e50c9b9235618b678d40eb220a8435ce9cb74d53ef068ec0dda91322242a"
    "28a9006c5c8c4677d69e063f5b85d3067771ddbe1e68aa269f5a82af7ef28154";

inline constexpr const char* kGenesisHash =
    "943a8ed79fd61f4027f19c70342d0fd55986602a8d449c43a9424b1eec8b6579";

// prev = 0x11 x32, nonce 0x0102030405060708, p(c) = 0x22 x32,
// p(o) = 0x33 x32, enc_c = "abc", enc_o empty.
inline constexpr const char* kFixedBlockHash =
    "a720d0a781fbc355cb340a6ab63b89d22f40a95e7a9bb4f430382281018458a5";

}  // namespace p3::test_vectors
