"""Univariate polynomial arithmetic and factorization over GF(2^e), e <= 8.

Polynomials are numpy uint8 coefficient arrays, index = degree, no trailing
zeros (the zero polynomial is the empty array).  Used for minimal-polynomial
splitting in the decomposition engine and for block idempotent extraction.
"""

from __future__ import annotations

import numpy as np

from . import _kernels as K
from .ffield import FieldSpec


def norm(c) -> np.ndarray:
    c = np.asarray(c, dtype=np.uint8)
    nz = np.nonzero(c)[0]
    if nz.size == 0:
        return np.zeros(0, dtype=np.uint8)
    return np.ascontiguousarray(c[: nz[-1] + 1])


def deg(c) -> int:
    return len(c) - 1


def is_zero(c) -> bool:
    return len(c) == 0


def padd(a, b):
    if len(a) < len(b):
        a, b = b, a
    out = a.copy()
    out[: len(b)] ^= b
    return norm(out)


def pmul(f: FieldSpec, a, b):
    if is_zero(a) or is_zero(b):
        return np.zeros(0, dtype=np.uint8)
    out = np.zeros(len(a) + len(b) - 1, dtype=np.uint8)
    for i in range(len(a)):
        if a[i]:
            out[i : i + len(b)] ^= f.MUL[a[i], b]
    return norm(out)


def pscale(f: FieldSpec, a, c: int):
    if c == 0 or is_zero(a):
        return np.zeros(0, dtype=np.uint8)
    return f.MUL[c][a]


def monic(f: FieldSpec, a):
    if is_zero(a):
        return a
    lead = int(a[-1])
    if lead == 1:
        return a
    return pscale(f, a, f.inv(lead))


def pdivmod(f: FieldSpec, a, b):
    if is_zero(b):
        raise ZeroDivisionError("polynomial division by zero")
    a = a.copy()
    db, dbl = deg(b), int(b[-1])
    ib = f.inv(dbl)
    if deg(a) < db:
        return np.zeros(0, dtype=np.uint8), norm(a)
    q = np.zeros(deg(a) - db + 1, dtype=np.uint8)
    for i in range(deg(a), db - 1, -1):
        c = a[i]
        if c:
            coef = f.mul(int(c), ib)
            q[i - db] = coef
            a[i - db : i + 1] ^= f.MUL[coef, b]
    return norm(q), norm(a)


def pmod(f: FieldSpec, a, b):
    return pdivmod(f, a, b)[1]


def pgcd(f: FieldSpec, a, b):
    a, b = norm(a), norm(b)
    while not is_zero(b):
        a, b = b, pmod(f, a, b)
    return monic(f, a)


def pxgcd(f: FieldSpec, a, b):
    """(g, u, v) with u*a + v*b = g = monic gcd."""
    r0, r1 = norm(a), norm(b)
    u0, u1 = np.array([1], dtype=np.uint8), np.zeros(0, dtype=np.uint8)
    v0, v1 = np.zeros(0, dtype=np.uint8), np.array([1], dtype=np.uint8)
    while not is_zero(r1):
        q, r = pdivmod(f, r0, r1)
        r0, r1 = r1, r
        u0, u1 = u1, padd(u0, pmul(f, q, u1))
        v0, v1 = v1, padd(v0, pmul(f, q, v1))
    if is_zero(r0):
        return r0, u0, v0
    c = f.inv(int(r0[-1]))
    return pscale(f, r0, c), pscale(f, u0, c), pscale(f, v0, c)


def pmulmod(f: FieldSpec, a, b, m):
    a, b = norm(a), norm(b)
    if is_zero(a) or is_zero(b):
        return np.zeros(0, dtype=np.uint8)
    m = monic(f, norm(m))
    out = K.poly_mulmod_u8(
        np.ascontiguousarray(a),
        np.ascontiguousarray(b),
        np.ascontiguousarray(m),
        f.MUL,
        f.INV,
    )
    return norm(out)


def ppowmod(f: FieldSpec, a, n: int, m):
    result = np.array([1], dtype=np.uint8)
    base = pmod(f, norm(a), m)
    while n:
        if n & 1:
            result = pmulmod(f, result, base, m)
        base = pmulmod(f, base, base, m)
        n >>= 1
    return result


def deriv(c):
    """Formal derivative in characteristic 2: odd-degree terms shift down."""
    if len(c) <= 1:
        return np.zeros(0, dtype=np.uint8)
    out = c[1:].copy()
    out[1::2] = 0
    return norm(out)


def psqrt(f: FieldSpec, c):
    """Square root of a polynomial of the form g(x^2) over GF(2^e)."""
    if np.any(c[1::2]):
        raise ValueError("polynomial is not a square in characteristic 2")
    half = c[0::2].copy()
    # coefficient-wise square root: a -> a^(2^(e-1))
    for i in range(len(half)):
        v = int(half[i])
        for _ in range(f.e - 1):
            v = f.mul(v, v)
        half[i] = v
    return norm(half)


def squarefree_decomposition(f: FieldSpec, a):
    """{squarefree monic part: multiplicity} for monic a (char-2 variant)."""
    a = monic(f, norm(a))
    out: dict = {}

    def merge(part, mult):
        if deg(part) < 1:
            return
        key = part.tobytes()
        if key in out:
            out[key] = (part, out[key][1] + mult)
        else:
            out[key] = (part, mult)

    def rec(g, scale):
        if deg(g) < 1:
            return
        dg = deriv(g)
        if is_zero(dg):
            rec(psqrt(f, g), 2 * scale)
            return
        c = pgcd(f, g, dg)
        w = pdivmod(f, g, c)[0]
        i = 1
        while deg(w) >= 1:
            y = pgcd(f, w, c)
            z = pdivmod(f, w, y)[0]
            merge(monic(f, z), i * scale)
            w = y
            c = pdivmod(f, c, y)[0]
            i += 1
        if deg(c) >= 1:
            rec(psqrt(f, c), 2 * scale)

    rec(a, 1)
    return [v for v in out.values()]


def _ddf(f: FieldSpec, a):
    """Distinct-degree split of squarefree monic a: list of (product, degree)."""
    out = []
    x = np.array([0, 1], dtype=np.uint8)
    h = x.copy()
    v = a.copy()
    d = 0
    while deg(v) >= 2 * (d + 1):
        d += 1
        for _ in range(f.e):
            h = pmulmod(f, h, h, v)
        g = pgcd(f, padd(h, pmod(f, x, v)), v)
        if deg(g) >= 1:
            out.append((g, d))
            v = pdivmod(f, v, g)[0]
            h = pmod(f, h, v)
    if deg(v) >= 1:
        out.append((v, deg(v)))
    return out


def _edf(f: FieldSpec, a, d, rng):
    """Equal-degree factorization (Cantor-Zassenhaus, char-2 trace variant)."""
    n = deg(a)
    if n == d:
        return [a]
    while True:
        h = np.array([rng.randint(f.q) for _ in range(n)], dtype=np.uint8)
        h = norm(h)
        if deg(h) < 1:
            continue
        # trace map over GF(2): h + h^2 + h^4 + ... (e*d squarings)
        t = pmod(f, h, a)
        acc = t
        for _ in range(f.e * d - 1):
            t = pmulmod(f, t, t, a)
            acc = padd(acc, t)
        g = pgcd(f, acc, a)
        if 1 <= deg(g) < n:
            left = _edf(f, monic(f, g), d, rng)
            right = _edf(f, monic(f, pdivmod(f, a, g)[0]), d, rng)
            return left + right


def factor(f: FieldSpec, a, rng):
    """Full factorization of monic a: list of (irreducible monic, multiplicity)."""
    if f.e > 8:
        raise ValueError("polynomial factorization implemented for e <= 8")
    a = monic(f, norm(a))
    if deg(a) < 1:
        return []
    out = []
    for part, mult in squarefree_decomposition(f, a):
        for prod, d in _ddf(f, part):
            for irr in _edf(f, prod, d, rng):
                out.append((monic(f, irr), mult))
    out.sort(key=lambda t: (deg(t[0]), t[0].tobytes()))
    return out


def is_irreducible(f: FieldSpec, a, rng) -> bool:
    a = norm(a)
    if deg(a) < 1:
        return False
    fs = factor(f, a, rng)
    return len(fs) == 1 and fs[0][1] == 1


def crt_idempotent_polys(f: FieldSpec, moduli):
    """p_i with p_i = 1 mod m_i and 0 mod m_j (j != i); moduli pairwise coprime."""
    total = np.array([1], dtype=np.uint8)
    for m in moduli:
        total = pmul(f, total, m)
    out = []
    for m in moduli:
        rest = pdivmod(f, total, m)[0]
        g, u, _ = pxgcd(f, rest, m)
        if deg(g) != 0:
            raise ValueError("moduli are not pairwise coprime")
        p = pmod(f, pmul(f, u, rest), total)
        out.append(pscale(f, p, f.inv(int(g[0]))) if g[0] != 1 else p)
    return out


def peval_scalar(f: FieldSpec, a, x: int) -> int:
    acc = 0
    for c in reversed(a):
        acc = f.mul(acc, x) ^ int(c)
    return acc
