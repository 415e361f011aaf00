#!/usr/bin/env python3
"""Independent reference values frozen into the C++ tests.

Written from the definitions only (hashlib, the `cryptography` package, brute
force enumeration); shares no code with the library. Re-run and diff when a
fixture is in doubt.
"""
import hashlib
import itertools
import math

from cryptography.hazmat.primitives.ciphers import Cipher, algorithms, modes


def H(b):
    return hashlib.sha256(b).digest()


def flip(x):
    return bytes(255 - c for c in x)


def combine(a, b):
    if a is None and b is None:
        return None
    if b is None:
        return H(a + flip(a))
    if a is None:
        return H(flip(b) + b)
    return H(a + b)


def rec(value):
    return H(len(value).to_bytes(4, "big") + value)


def truncated_root(leaves):
    h = 0
    while (1 << h) < len(leaves):
        h += 1
    level = list(leaves) + [None] * ((1 << h) - len(leaves))
    while len(level) > 1:
        level = [combine(level[i], level[i + 1]) for i in range(0, len(level), 2)]
    return level[0]


def section(name):
    print(f"\n== {name}")


section("digest / combine")
x, y = H(b"a"), H(b"b")
print("H(abc)      ", H(b"abc").hex())
print("comb(x,y)   ", combine(x, y).hex())
print("comb(x,NULL)", combine(x, None).hex())
print("comb(NULL,y)", combine(None, y).hex())

section("truncated roots over rec('r0'..)")
for m in (1, 2, 3, 5, 8):
    leaves = [rec(f"r{i}".encode()) for i in range(m)]
    print(m, truncated_root(leaves).hex())

section("pathstats enumeration, sparse tree, leaf 0")


def weight_pdf(k, p):
    n = 1 << k
    out = [0.0] * (k + 1)
    for occ in itertools.product((0, 1), repeat=n):
        pr = 1.0
        for o in occ:
            pr *= p if o else 1 - p
        w = 0
        for lvl in range(k):
            sib = 1 << lvl  # sibling subtree of leaf 0 at level lvl
            if any(occ[sib:2 * sib]):
                w += 1
        out[w] += pr
    return out


for k, p in ((1, 0.1), (2, 0.1), (3, 0.1), (3, 0.5), (4, 0.1)):
    print(k, p, ["%.15g" % v for v in weight_pdf(k, p)])

section("truncated mean weight, n=1024")


def shape_weight(m, i):
    h = 0
    while (1 << h) < m:
        h += 1
    return sum(1 for lvl in range(h) if (((i >> lvl) ^ 1) << lvl) < m)


for p in (0.05, 0.1, 0.5):
    m = round(1024 * p)
    h = 0
    while (1 << h) < m:
        h += 1
    print(p, m, "%.15g" % (sum(shape_weight(m, i) for i in range(1 << h)) / (1 << h)))

section("tunstall (split most likely leaf; ties to earliest created)")


def tunstall(p, w):
    leaves = [("0", 0), ("1", 1)]  # (chunk, creation seq)
    seq = 2

    def lik(c):
        return (p ** c.count("1")) * ((1 - p) ** c.count("0"))

    while len(leaves) < (1 << w):
        best = max(leaves, key=lambda t: (lik(t[0]), -t[1]))
        leaves.remove(best)
        leaves += [(best[0] + "0", seq), (best[0] + "1", seq + 1)]
        seq += 2
    return sorted(c for c, _ in leaves)


book = tunstall(0.15, 4)
for i, c in enumerate(book):
    print(f"{i:04b}", c, "%.4f" % (-math.log2(0.15) * c.count("1") - math.log2(0.85) * c.count("0")))

section("shuffle-shift permute, d=10, block=269, rounds=203")


def permute(i, d, block, rounds):
    n = 1 << d
    v = block % n
    for _ in range(rounds):
        i = (i + v) % n
        i = ((i << 1) | (i >> (d - 1))) & (n - 1)
        v = (0x5EED * v + 1) % n
    return i


print([permute(i, 10, 269, 203) for i in (0, 1, 45, 512, 1023)])
print("d=4 block=3 rounds=5:", [permute(i, 4, 3, 5) for i in range(16)])

section("root of trust golden messages")


class BW:
    def __init__(self):
        self.bits = []

    def w(self, v, width):
        self.bits += [(v >> (width - 1 - i)) & 1 for i in range(width)]

    def bytes(self):
        b = self.bits + [0] * (-len(self.bits) % 8)
        return bytes(int("".join(map(str, b[i:i + 8])), 2) for i in range(0, len(b), 8))


def rot(T, n, m, mode, wide, extra, payload_bits):
    bw = BW()
    for c in T:
        bw.w(c, 8)
    bw.w(n - 1, 12)
    bw.w(0 if mode == 3 else m - 1, 12)
    bw.w(mode | (wide << 2) | (extra << 3), 8)
    bw.bits += payload_bits
    bw.w(0, 32)
    return bw.bytes()


T = H(b"T")
print("empty n=64     ", rot(bytes(32), 64, 0, 3, 0, 0, []).hex())
ones = [3, 17, 18, 40, 63]
plain = [1 if i in ones else 0 for i in range(64)]
print("plain n=64     ", rot(T, 64, 5, 0, 0, 0, plain).hex())
lst = []
for pos in ones:
    lst += [(pos >> (5 - i)) & 1 for i in range(6)]
print("list n=64 x7   ", rot(T, 64, 5, 2, 0, 7, lst).hex())

# compressed, n=64, m=8 (p = 1/8), w = 4, ones at 5, 9, 20, 21, 33, 50, 51, 62
ones8 = [5, 9, 20, 21, 33, 50, 51, 62]
bits = "".join("1" if i in ones8 else "0" for i in range(64))
book8 = tunstall(8 / 64, 4)
cws, i = [], 0
while i < len(bits):
    for idx, c in enumerate(book8):
        seg = bits[i:i + len(c)]
        if len(seg) < len(c):
            seg = seg + "0" * (len(c) - len(seg))
        if seg == c:
            cws.append(idx)
            i += len(c)
            break
pl = []
for cw in cws:
    pl += [(cw >> (3 - j)) & 1 for j in range(4)]
print("compressed cws ", cws)
print("compressed n=64", rot(T, 64, 8, 1, 0, 0, pl).hex())

section("AES-256 / PCBC")


def aes_ecb(key, block):
    e = Cipher(algorithms.AES(key), modes.ECB()).encryptor()
    return e.update(block) + e.finalize()


def pcbc(key, pt):
    out, chain = b"", bytes(16)
    for i in range(0, len(pt), 16):
        p = pt[i:i + 16]
        c = aes_ecb(key, bytes(a ^ b for a, b in zip(p, chain)))
        out += c
        chain = bytes(a ^ b for a, b in zip(p, c))
    return out


key = bytes(range(32))
print("FIPS-197 C.3   ", aes_ecb(key, bytes.fromhex("00112233445566778899aabbccddeeff")).hex())
print("pcbc 48 bytes  ", pcbc(key, bytes(range(48))).hex())

n0, n1 = H(b"N0"), H(b"N1")
J = bytes(range(1, 41))
pad = H(n1)
x = J + bytes(-len(J) % 16)
x = bytes(c ^ pad[i % 32] for i, c in enumerate(x))
print("L ", bytes(a ^ b for a, b in zip(pad, n0)).hex())
print("S ", pcbc(n0, x).hex())
print("P ", H(n0).hex())
