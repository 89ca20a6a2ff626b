#!/usr/bin/env python3
# Copyright 2026 The P3 Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#   http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Independent reference values for the C++ unit tests.

Written against hashlib and the `cryptography` package only, never against
the C++ sources. Run once; the output is pasted into tests/unit/vectors.hpp.
"""

import hashlib
import os
import struct

from cryptography.hazmat.primitives import hashes
from cryptography.hazmat.primitives.asymmetric import padding, rsa
from cryptography.hazmat.primitives.ciphers.aead import AESGCM


def b2s(*parts):
    h = hashlib.blake2s()
    for p in parts:
        h.update(p)
    return h.digest()


def be32(v):
    return struct.pack(">I", v)


def be64(v):
    return struct.pack(">Q", v)


def strip(b):
    return b.lstrip(b"\x00") or b"\x00"


def canonical(n, e):
    nb = strip(n.to_bytes((n.bit_length() + 7) // 8, "big"))
    eb = strip(e.to_bytes((e.bit_length() + 7) // 8, "big"))
    return be32(len(nb)) + nb + be32(len(eb)) + eb


def stream(domain, head, buf):
    out = bytearray(buf)
    off, ctr = 0, 0
    while off < len(out):
        block = b2s(domain, head, be32(ctr))
        for x in block:
            if off >= len(out):
                break
            out[off] ^= x
            off += 1
        ctr += 1
    return bytes(out)


def chain(tail, iters):
    state = b2s(b"p3/slow/chain", be64(len(tail)), tail)
    for r in range(iters):
        state = b2s(state, be32(r))
    return state


def slow(data, iters):
    hl = min(32, len(data))
    h, t = data[:hl], data[hl:]
    t = stream(b"p3/slow/stream-1", h, t)
    m = chain(t, iters)
    h = bytes(a ^ b for a, b in zip(h, m))
    t = stream(b"p3/slow/stream-2", h, t)
    return h + t


def gf_mul(a, b):
    r = 0
    while b:
        if b & 1:
            r ^= a
        a <<= 1
        if a & 0x100:
            a ^= 0x11B
        b >>= 1
    return r


def shamir_eval(coeffs, x):
    y = 0
    for c in reversed(coeffs):
        y = gf_mul(y, x) ^ c
    return y


def h(b):
    return b.hex()


def main():
    print("blake2s(abc)", h(b2s(b"abc")))
    print("blake2s(empty)", h(b2s(b"")))
    print("blake2s_keyed(key=000102..1f, data=00..ff)",
          h(hashlib.blake2s(bytes(range(256)), key=bytes(range(32))).digest()))

    # Canonical encoding and pseudonym of a small fixed key.
    n = int("c5" + "17" * 30 + "3b", 16)
    c = canonical(n, 65537)
    print("canonical", h(c))
    print("pseudonym", h(b2s(c)))

    # Slow transform.
    d = bytes(range(80))
    print("slow chain(tail=00..2f, 1)", h(chain(bytes(range(48)), 1)))
    print("slow(00..4f, 1)", h(slow(d, 1)))
    print("slow(00..4f, 1000)", h(slow(d, 1000)))
    print("slow(00..09, 3)", h(slow(bytes(range(10)), 3)))

    # GF(256) and threshold shares for a fixed polynomial per byte.
    print("gf 57*83", hex(gf_mul(0x57, 0x83)))
    secret = bytes(range(0xA0, 0xA0 + 16))
    k = 3
    coeffs = [[secret[i], (7 * i + 1) & 0xFF, (13 * i + 5) & 0xFF] for i in range(16)]
    for x in (2, 5, 9):
        print(f"shard {x}", h(bytes(shamir_eval(coeffs[i], x) for i in range(16))))

    # Block hashing: the all-zero genesis block (112 bytes) and a fixed block.
    print("genesis", h(b2s(bytes(112))))
    blk = (b"\x11" * 32 + be64(0x0102030405060708) + b"\x22" * 32 + b"\x33" * 32
           + be32(3) + b"abc" + be32(0))
    print("block", h(b2s(blk)))

    # Interop: an OAEP/GCM envelope and a PSS signature made by a third-party
    # implementation, for the C++ side to open and verify.
    key = rsa.generate_private_key(public_exponent=65537, key_size=2048)
    nums = key.private_numbers()
    pub = nums.public_numbers
    for name, v in (("n", pub.n), ("e", pub.e), ("d", nums.d), ("p", nums.p),
                    ("q", nums.q), ("dp", nums.dmp1), ("dq", nums.dmq1),
                    ("qinv", nums.iqmp)):
        print(f"key.{name}", format(v, "x") if len(format(v, "x")) % 2 == 0 else "0" + format(v, "x"))
    sym = os.urandom(32)
    wrapped = key.public_key().encrypt(
        sym, padding.OAEP(mgf=padding.MGF1(hashes.SHA256()), algorithm=hashes.SHA256(), label=None))
    nonce = os.urandom(12)
    pt = b"interop record payload"
    sealed = AESGCM(sym).encrypt(nonce, pt, wrapped)
    env = b"\x01" + struct.pack(">H", len(wrapped)) + wrapped + nonce + sealed
    print("envelope", h(env))
    msg = b"interop signed message"
    sig = key.sign(msg, padding.PSS(mgf=padding.MGF1(hashes.SHA256()), salt_length=32),
                   hashes.SHA256())
    print("pss.sig", h(sig))


if __name__ == "__main__":
    main()
