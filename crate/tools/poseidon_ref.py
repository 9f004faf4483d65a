#!/usr/bin/env python3
"""Stand-alone reference for the hash layer, used to produce the pinned
values in the Rust tests. Constants come from the Grain LFSR directly.

    python3 tools/poseidon_ref.py
"""

P = 0x30644E72E131A029B85045B68181585D2833E84879B9709143E1F593F0000001
T, R_F, R_P, N = 3, 8, 57, 254


def grain():
    init = [0, 1] + [0, 0, 0, 0]
    init += [int(b) for b in format(N, "012b")]
    init += [int(b) for b in format(T, "012b")]
    init += [int(b) for b in format(R_F, "010b")]
    init += [int(b) for b in format(R_P, "010b")]
    init += [1] * 30
    s = list(init)

    def step():
        b = s[62] ^ s[51] ^ s[38] ^ s[23] ^ s[13] ^ s[0]
        s.pop(0)
        s.append(b)
        return b

    for _ in range(160):
        step()

    def bits():
        while True:
            a = step()
            b = step()
            if a:
                yield b

    return bits()


def take(g, n):
    v = 0
    for _ in range(n):
        v = (v << 1) | next(g)
    return v


def constants():
    g = grain()
    rc = []
    while len(rc) < (R_F + R_P) * T:
        v = take(g, N)
        if v < P:
            rc.append(v)
    while True:
        vals = [take(g, N) % P for _ in range(2 * T)]
        if len(set(vals)) == 2 * T:
            break
    xs, ys = vals[:T], vals[T:]
    mds = [[pow(xs[i] + ys[j], P - 2, P) for j in range(T)] for i in range(T)]
    return [rc[i * T:(i + 1) * T] for i in range(R_F + R_P)], mds


RC, MDS = constants()


def permute(st):
    st = list(st)
    for r in range(R_F + R_P):
        st = [(x + c) % P for x, c in zip(st, RC[r])]
        if r < R_F // 2 or r >= R_F // 2 + R_P:
            st = [pow(x, 5, P) for x in st]
        else:
            st[0] = pow(st[0], 5, P)
        st = [sum(MDS[i][j] * st[j] for j in range(T)) % P for i in range(T)]
    return st


def compress(tag, a, b):
    return permute([tag, a, b])[1]


def sponge(inputs):
    st = [1 << 64, 0, 0]
    chunks = [inputs[i:i + 2] for i in range(0, len(inputs), 2)]
    if len(inputs) % 2 == 0:
        chunks.append([])
    for ch in chunks:
        for i, x in enumerate(ch):
            st[1 + i] = (st[1 + i] + x) % P
        if len(ch) < 2:
            st[1 + len(ch)] = (st[1 + len(ch)] + 1) % P
        st = permute(st)
    return st[1]


def hash_to_field(data):
    rnd = 0
    while True:
        v = [3, len(data)] + [int.from_bytes(data[i:i + 31], "little") for i in range(0, len(data), 31)]
        if rnd:
            v.append(rnd)
        h = sponge(v)
        if h not in (0, P - 1):
            return h
        rnd += 1


def merkle_root(leaves):
    while len(leaves) > 1:
        leaves = [compress(5, leaves[i], leaves[i + 1]) for i in range(0, len(leaves), 2)]
    return leaves[0]


def hx(v):
    return "0x%064x" % v


if __name__ == "__main__":
    assert permute([0, 1, 2])[0] == 0x115CC0F5E7D690413DF64C6B9662E9CF2A3617F2743245519E19607A4417189A
    print("hash2(0,0)          ", hx(compress(5, 0, 0)))
    print("hash2(1,2)          ", hx(compress(5, 1, 2)))
    print("attr_leaf(1,30)     ", hx(compress(1, 1, 30)))
    print("issuer_leaf(7,9)    ", hx(compress(2, 7, 9)))
    print("sponge([])          ", hx(sponge([])))
    print("sponge([1,2,3])     ", hx(sponge([1, 2, 3])))
    print("hash_to_field(b'')  ", hx(hash_to_field(b"")))
    print("hash_to_field(abc)  ", hx(hash_to_field(b"abc")))
    print("hash_to_field(70x07)", hx(hash_to_field(bytes([7] * 70))))
    for n in (2, 8, 32768):
        print("empty rl root n=%-5d" % n, hx(merkle_root([0] + [P - 1] * (n - 1))))
