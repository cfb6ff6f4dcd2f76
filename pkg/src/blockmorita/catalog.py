"""The group catalog: named constructions accepted by the CLI.

Names: C<m>, D<2^n>, Q<2^n>, SD<2^n>, A<n>, S<n>, SL2_<q>, PSL2_<q>,
PGL2_<q>, 2PGL2_<q>, 2A7, and products `X*Y`.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

from .groups import (
    FiniteGroup,
    MatOps,
    PermOps,
    QuadExt,
    Subgroup,
    direct_product,
    small_field,
)

_CACHE: dict = {}


def _perm_group(n, gen_perms, name, expect=None):
    dt = np.uint16 if n > 255 else np.uint8
    g = FiniteGroup(PermOps(n), [np.array(p, dtype=dt) for p in gen_perms], name=name)
    if expect is not None and g.order != expect:
        raise AssertionError(f"{name}: closure has order {g.order}, expected {expect}")
    return g


def _regular_group(n, mult, gen_vals, name):
    """Right-regular permutation realization of a normal-form multiplication."""
    dt = np.uint16 if n > 255 else np.uint8
    perms = [np.array([mult(x, g) for x in range(n)], dtype=dt) for g in gen_vals]
    g = FiniteGroup(PermOps(n), perms, name=name)
    if g.order != n:
        raise AssertionError(f"{name}: normal form is not a group table")
    return g


def cyclic_group(m):
    if m == 1:
        return _perm_group(1, [[0]], "C1", expect=1)
    cyc = list(range(1, m)) + [0]
    return _perm_group(m, [cyc], f"C{m}", expect=m)


def dihedral_group(order):
    """D_{2^n} of the stated order; order 4 is the Klein four group."""
    if order == 4:
        return _perm_group(4, [[1, 0, 2, 3], [0, 1, 3, 2]], "D4", expect=4)
    m = order // 2
    rot = [(i + 1) % m for i in range(m)]
    ref = [(-i) % m for i in range(m)]
    return _perm_group(m, [rot, ref], f"D{order}", expect=order)


def quaternion_group(order):
    h = order // 2
    if order < 8 or order & (order - 1):
        raise ValueError("quaternion groups need 2-power order >= 8")

    def mult(x, y):
        i, j = x % h, x // h
        i2, j2 = y % h, y // h
        if j == 0:
            return (i + i2) % h + h * j2
        if j2 == 0:
            return (i - i2) % h + h
        return (i - i2 + h // 2) % h

    return _regular_group(order, mult, [1, h], f"Q{order}")


def semidihedral_group(order):
    h = order // 2
    if order < 16 or order & (order - 1):
        raise ValueError("semidihedral groups need 2-power order >= 16")
    r = h // 2 - 1

    def mult(x, y):
        i, j = x % h, x // h
        i2, j2 = y % h, y // h
        if j == 0:
            return (i + i2) % h + h * j2
        return (i + r * i2) % h + h * ((1 + j2) % 2)

    return _regular_group(order, mult, [1, h], f"SD{order}")


def mod_max_cyclic_group(order):
    """C_{order/4} : C_4 with the C_4 inverting (paper case (v) shape)."""
    m = order // 4

    def mult(x, y):
        i, j = x % m, x // m
        i2, j2 = y % m, y // m
        s = i2 if j % 2 == 0 else -i2
        return (i + s) % m + m * ((j + j2) % 4)

    return _regular_group(order, mult, [1, m], f"C{m}:C4")


def twisted_c2_extension_group(order):
    """(C_{order/4} x C_2) : C_2 with s x s = x^-1 t (paper case (iii) shape)."""
    m = order // 4

    def mult(x, y):
        i, t, j = x % m, (x // m) % 2, x // (2 * m)
        i2, t2, j2 = y % m, (y // m) % 2, y // (2 * m)
        if j == 0:
            return (i + i2) % m + m * ((t + t2) % 2) + 2 * m * j2
        return (i - i2) % m + m * ((t + t2 + i2) % 2) + 2 * m * ((1 + j2) % 2)

    return _regular_group(order, mult, [1, 2 * m], f"(C{m}xC2):C2")


def alternating_group(n):
    pts = list(range(n))

    def cycle(c):
        p = pts.copy()
        for a, b in zip(c, c[1:] + c[:1]):
            p[a] = b
        return p

    if n <= 3:
        return _perm_group(n, [cycle(list(range(n)))], f"A{n}", expect=math.factorial(n) // 2)
    g1 = cycle([0, 1, 2])
    g2 = cycle(list(range(n))) if n % 2 == 1 else cycle(list(range(1, n)))
    return _perm_group(n, [g1, g2], f"A{n}", expect=math.factorial(n) // 2)


def symmetric_group(n):
    pts = list(range(n))
    t = pts.copy()
    t[0], t[1] = 1, 0
    c = [(i + 1) % n for i in range(n)]
    return _perm_group(n, [t, c], f"S{n}", expect=math.factorial(n))


def _sl2_gens(f):
    gens = [
        np.array([[1, 1], [0, 1]], dtype=np.uint8),
        np.array([[1, 0], [1, 1]], dtype=np.uint8),
    ]
    if f.k == 2:
        t = f.gen
        gens.append(np.array([[1, t], [0, 1]], dtype=np.uint8))
        gens.append(np.array([[1, 0], [t, 1]], dtype=np.uint8))
    return gens


def sl2_group(q):
    f = small_field(q)
    g = FiniteGroup(MatOps(f, 2), _sl2_gens(f), name=f"SL2_{q}")
    if g.order != q * (q - 1) * (q + 1):
        raise AssertionError("SL2 order mismatch")
    return g


def _proj_line_perm(f, m):
    """Permutation of the projective line under row-vector action by m."""
    q = f.q
    a, b, c, d = int(m[0, 0]), int(m[0, 1]), int(m[1, 0]), int(m[1, 1])
    out = np.zeros(q + 1, dtype=np.uint8 if q + 1 <= 255 else np.uint16)
    MUL, ADD, INV = f.MUL, f.ADD, f.INV
    for x in range(q):
        # [x : 1] -> [xa + c : xb + d]
        u = ADD[MUL[x, a], c]
        v = ADD[MUL[x, b], d]
        out[x] = MUL[u, INV[v]] if v else q
    # [1 : 0] -> [a : b]
    out[q] = MUL[a, INV[b]] if b else q
    return out


def psl2_group(q):
    f = small_field(q)
    perms = [_proj_line_perm(f, m) for m in _sl2_gens(f)]
    g = _perm_group(q + 1, perms, f"PSL2_{q}", expect=q * (q - 1) * (q + 1) // 2)
    return g


def pgl2_group(q):
    f = small_field(q)
    nu = f.nonsquare()
    mats = _sl2_gens(f) + [np.array([[nu, 0], [0, 1]], dtype=np.uint8)]
    perms = [_proj_line_perm(f, m) for m in mats]
    return _perm_group(q + 1, perms, f"PGL2_{q}", expect=q * (q - 1) * (q + 1))


def two_pgl2_group(q):
    """The double cover of PGL_2(q) with generalised quaternion Sylow.

    Realized as <SL_2(q), diag(mu, mu^-1)> inside SL_2(q^2) where mu^2 is a
    fixed non-square of GF(q).  Construction-time checks: order, a unique
    involution, central involution, quotient-by-center order statistics
    matching PGL_2(q).
    """
    base = small_field(q)
    ext = QuadExt(base)
    gens = []
    for m in _sl2_gens(base):
        gens.append(ext.embed[m])
    mu = ext.mu
    d = np.array([[mu, 0], [0, ext.INV[mu]]], dtype=np.uint8)
    gens.append(d)
    g = FiniteGroup(MatOps(ext, 2), gens, name=f"2PGL2_{q}")
    n_sl2 = q * (q - 1) * (q + 1)
    if g.order != 2 * n_sl2:
        raise AssertionError("2PGL2 closure has wrong order")
    invs = [i for i in range(1, g.order) if g.mul(i, i) == 0]
    if len(invs) != 1:
        raise AssertionError("2PGL2 does not have a unique involution")
    z = g.center()
    if z.order != 2:
        raise AssertionError("2PGL2 center is not of order 2")
    from .groups import QuotientMap
    bar = QuotientMap(g, z).target
    ref = pgl2_group(q)
    if sorted(bar.element_orders()) != sorted(ref.element_orders()):
        raise AssertionError("2PGL2/Z order statistics do not match PGL2")
    return g


def _clifford_words():
    """Seven pairwise-anticommuting tensor words squaring to -1."""
    # letters: 0 = I, 1 = alpha (sq -1), 2 = beta (sq +1), 3 = gamma (sq +1)
    def anti(w, v):
        cnt = sum(1 for a, b in zip(w, v) if a and b and a != b)
        return cnt % 2 == 1

    def neg_square(w):
        return sum(1 for a in w if a == 1) % 2 == 1

    words = [w for w in itertools.product(range(4), repeat=3) if w != (0, 0, 0)]
    chosen: list = []

    def extend():
        if len(chosen) == 7:
            return True
        for w in words:
            if neg_square(w) and all(anti(w, v) for v in chosen):
                chosen.append(w)
                if extend():
                    return True
                chosen.pop()
        return False

    if not extend():
        raise AssertionError("no Clifford word system found")
    return chosen


def double_cover_a7():
    """2.A7 in 8x8 matrices over GF(7) via the Clifford-algebra model."""
    f = small_field(7)
    alpha = np.array([[0, 1], [6, 0]], dtype=np.int64)
    beta = np.array([[0, 1], [1, 0]], dtype=np.int64)
    gamma = np.array([[1, 0], [0, 6]], dtype=np.int64)
    letters = {0: np.eye(2, dtype=np.int64), 1: alpha, 2: beta, 3: gamma}
    es = []
    for w in _clifford_words():
        m = letters[w[0]]
        for l in w[1:]:
            m = np.kron(m, letters[l])
        es.append(m % 7)
    for i in range(7):
        assert np.array_equal(es[i] @ es[i] % 7, (7 - 1) * np.eye(8, dtype=np.int64) % 7)
        for j in range(i + 1, 7):
            assert np.array_equal((es[i] @ es[j] + es[j] @ es[i]) % 7, np.zeros((8, 8)))
    c = 2  # c^2 = 4 = inverse of 2 in GF(7)
    ss = [c * (es[i] - es[i + 1]) % 7 for i in range(6)]
    gens = [(ss[i] @ ss[i + 1] % 7).astype(np.uint8) for i in range(5)]
    g = FiniteGroup(MatOps(f, 8), gens, name="2A7")
    if g.order != 5040:
        raise AssertionError(f"2.A7 closure has order {g.order}, expected 5040")
    invs = [i for i in range(1, g.order) if g.mul(i, i) == 0]
    if len(invs) != 1:
        raise AssertionError("2.A7 does not have a unique involution")
    return g


def catalog_group(name: str) -> FiniteGroup:
    name = name.strip()
    if name in _CACHE:
        return _CACHE[name]
    if "*" in name:
        left, right = name.split("*", 1)
        g = direct_product(catalog_group(left), catalog_group(right), name=name)
    elif name == "V4":
        g = dihedral_group(4)
    elif name == "2A7":
        g = double_cover_a7()
    elif name.startswith("2PGL2_"):
        g = two_pgl2_group(int(name[6:]))
    elif name.startswith("PSL2_"):
        g = psl2_group(int(name[5:]))
    elif name.startswith("PGL2_"):
        g = pgl2_group(int(name[5:]))
    elif name.startswith("SL2_"):
        g = sl2_group(int(name[4:]))
    elif name.startswith("SD"):
        g = semidihedral_group(int(name[2:]))
    elif name.startswith("C") and name[1:].isdigit():
        g = cyclic_group(int(name[1:]))
    elif name.startswith("D") and name[1:].isdigit():
        g = dihedral_group(int(name[1:]))
    elif name.startswith("Q") and name[1:].isdigit():
        g = quaternion_group(int(name[1:]))
    elif name.startswith("A") and name[1:].isdigit():
        g = alternating_group(int(name[1:]))
    elif name.startswith("S") and name[1:].isdigit():
        g = symmetric_group(int(name[1:]))
    else:
        raise ValueError(f"unknown catalog group {name!r}")
    _CACHE[name] = g
    return g
