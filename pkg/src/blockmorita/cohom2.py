"""H^2(G, C_2) by explicit cocycle linear algebra, and central extensions.

A 2-cocycle on a group of order n is an n x n GF(2) table indexed by
element indices, normalized so the identity row and column vanish.  The
cocycle identity gives up to n^3 linear equations over GF(2) on the n^2
table entries; they are streamed into a growing echelon basis instead of
being materialized.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from .groups import FiniteGroup, Subgroup
from .isotype import iso_type_2group

H2_SIZE_CAP = 64


@dataclass
class Cocycle:
    base: FiniteGroup
    table: np.ndarray  # (n, n) uint8 in {0,1}

    def check(self):
        n = self.base.order
        t = self.table
        if np.any(t[0, :]) or np.any(t[:, 0]):
            raise AssertionError("cocycle is not normalized")
        cay = _cayley(self.base)
        for g in range(n):
            tg = t[g]
            for h in range(n):
                gh = cay[g, h]
                # alpha(g,h) + alpha(gh,k) = alpha(h,k) + alpha(g,hk)
                lhs = tg[h] ^ t[gh]
                rhs = t[h] ^ tg[cay[h]]
                if np.any(lhs != rhs):
                    raise AssertionError("cocycle identity fails")
        return True

    def __add__(self, other):
        return Cocycle(self.base, self.table ^ other.table)


def _cayley(g: FiniteGroup) -> np.ndarray:
    if not hasattr(g, "_cayley"):
        n = g.order
        cay = np.zeros((n, n), dtype=np.int32)
        for j in range(n):
            col = np.arange(n)
            x = np.arange(n, dtype=np.int64)
            for gi in g.words[j]:
                x = g.gen_right[gi][x]
            cay[:, j] = x
        g._cayley = cay
    return g._cayley


def _pack_table(table: np.ndarray) -> np.ndarray:
    return K.pack_bits(table.reshape(1, -1))[0]


def _unpack_table(vec: np.ndarray, n: int) -> np.ndarray:
    return K.unpack_bits(vec.reshape(1, -1), n * n)[0].reshape(n, n)


def _reduce_mod(vec, rows, pivots):
    v = vec.copy()
    for row, p in zip(rows, pivots):
        if (v[p >> 6] >> np.uint64(p & 63)) & np.uint64(1):
            v ^= row
    return v


class H2Basis:
    """Basis of H^2(G, C_2): cocycle representatives modulo coboundaries."""

    def __init__(self, group: FiniteGroup):
        if group.order > H2_SIZE_CAP:
            raise ValueError(f"H^2 computation capped at |G| <= {H2_SIZE_CAP}")
        self.group = group
        n = group.order
        nv = n * n
        cay = _cayley(group)
        ech, present = K.cocycle_rows_p64(cay)
        rank_eq = int(present.sum())
        # nullspace of the equation rows by back-substitution (echelon rows
        # have leading column = their slot and nothing to the left of it)
        piv_cols = np.nonzero(present)[0]
        free_cols = [c for c in range(nv) if not present[c]]
        zvecs = []
        nw = ech.shape[1]
        for fc in free_cols:
            v = np.zeros(nw, dtype=np.uint64)
            v[fc >> 6] |= np.uint64(1) << np.uint64(fc & 63)
            for p in piv_cols[::-1]:
                row = ech[p]
                acc = 0
                dot = row & v
                for w in dot:
                    acc ^= int(w).bit_count() & 1
                # row[p] = 1 and v[p] = 0 so far, so acc is the forced value
                if acc:
                    v[p >> 6] |= np.uint64(1) << np.uint64(p & 63)
            zvecs.append(v)
        self.z_dim = len(zvecs)
        assert self.z_dim == nv - rank_eq
        # coboundary space
        brows = []
        for b in range(1, n):
            tab = np.zeros((n, n), dtype=np.uint8)
            tab[b, :] ^= 1
            tab[:, b] ^= 1
            tab[cay == b] ^= 1
            tab[0, :] = 0
            tab[:, 0] = 0
            brows.append(_pack_table(tab))
        bm = np.zeros((len(brows), nw), dtype=np.uint64)
        for i, r in enumerate(brows):
            bm[i] = r
        brref, brank, bpiv = K.rref_p64(bm, nv)
        self.b_rows = brref[:brank]
        self.b_pivots = [int(p) for p in bpiv]
        self.b_dim = brank
        # class representatives: Z-basis reduced mod B, then echelonized
        reduced = [
            _reduce_mod(v, self.b_rows, self.b_pivots) for v in zvecs
        ]
        hm = np.zeros((len(reduced), nw), dtype=np.uint64)
        for i, r in enumerate(reduced):
            hm[i] = r
        hrref, hrank, hpiv = K.rref_p64(hm, nv)
        self.h_rows = hrref[:hrank]
        self.h_pivots = [int(p) for p in hpiv]
        self.rank = hrank
        self.reps = [Cocycle(group, _unpack_table(r, n)) for r in self.h_rows]
        for rep in self.reps:
            rep.check()

    def class_vector(self, c: Cocycle) -> np.ndarray:
        """GF(2) coordinates of the class of ``c`` in this basis."""
        v = _reduce_mod(_pack_table(c.table), self.b_rows, self.b_pivots)
        coords = np.zeros(self.rank, dtype=np.uint8)
        for i, p in enumerate(self.h_pivots):
            if (v[p >> 6] >> np.uint64(p & 63)) & np.uint64(1):
                coords[i] = 1
                v = v ^ self.h_rows[i]
        if np.any(v):
            raise AssertionError("vector is not a cocycle class in this basis")
        return coords

    def class_rep(self, coords) -> Cocycle:
        n = self.group.order
        tab = np.zeros((n, n), dtype=np.uint8)
        for c, rep in zip(coords, self.reps):
            if c:
                tab ^= rep.table
        return Cocycle(self.group, tab)

    def all_class_coords(self):
        out = []
        for bits in range(1 << self.rank):
            out.append(np.array([(bits >> i) & 1 for i in range(self.rank)],
                                dtype=np.uint8))
        return out


def h2_basis(group: FiniteGroup) -> H2Basis:
    if not hasattr(group, "_h2"):
        group._h2 = H2Basis(group)
    return group._h2


def restriction_matrix(g: FiniteGroup, p: Subgroup):
    """Matrix of res: H^2(g) -> H^2(p) in the two computed bases.

    Returns (matrix rows = images of g-basis vectors, H2Basis of g,
    H2Basis of the subgroup as a standalone group).
    """
    hg = h2_basis(g)
    psub, to_parent, from_parent = p.as_group()
    hp = h2_basis(psub)
    rows = []
    for rep in hg.reps:
        sub_table = rep.table[np.ix_(to_parent, to_parent)].astype(np.uint8)
        rows.append(hp.class_vector(Cocycle(psub, sub_table)))
    mat = np.array(rows, dtype=np.uint8).reshape(hg.rank, hp.rank)
    return mat, hg, hp


@dataclass
class ExtensionResult:
    group: FiniteGroup
    base: FiniteGroup
    proj: np.ndarray      # middle index -> base index
    kernel_gen: int       # index of the central t
    section: np.ndarray   # base index -> middle index with epsilon = 0


def extension_from_cocycle(gbar: FiniteGroup, alpha: Cocycle) -> ExtensionResult:
    """Middle group on gbar x {0,1} with (g,e)(h,f) = (gh, e+f+alpha(g,h))."""
    n = gbar.order
    t = alpha.table
    dt = np.uint16 if 2 * n > 255 else np.uint8
    cay = _cayley(gbar)

    def lift_perm(j):
        # right multiplication by (j, 0) on points i + n*eps
        out = np.zeros(2 * n, dtype=dt)
        prod = cay[:, j]
        add = t[:, j]
        for i in range(n):
            out[i] = prod[i] + n * add[i]
            out[i + n] = prod[i] + n * (1 ^ add[i])
        return out

    gens = [lift_perm(gbar.gens[k]) for k in range(len(gbar.gens))]
    tperm = np.concatenate([np.arange(n, 2 * n), np.arange(n)]).astype(dt)
    gens.append(tperm)
    mid = FiniteGroup(PermOpsFor(2 * n), gens, name=f"ext({gbar.name})")
    if mid.order != 2 * n:
        raise AssertionError("central extension has wrong order")
    # each middle element is a permutation sending 0 to i + n*eps
    images = np.array([int(mid.raws[x][0]) for x in range(2 * n)], dtype=np.int64)
    proj = images % n
    eps = images // n
    kernel_gen = int(np.nonzero((proj == 0) & (eps == 1))[0][0])
    section = np.zeros(n, dtype=np.int64)
    for x in range(2 * n):
        if eps[x] == 0:
            section[proj[x]] = x
    return ExtensionResult(mid, gbar, proj, kernel_gen, section)


def PermOpsFor(n):
    from .groups import PermOps
    return PermOps(n)


# -- the paper presentation cocycles on dihedral base groups ---------------

@dataclass(frozen=True)
class PresentationParams:
    a: int
    b: int
    c: int


def presentation_cocycle(dihedral: FiniteGroup, params: PresentationParams) -> Cocycle:
    """Cocycle of the extension <r,s,t | rt=tr, st=ts, t^2, r^2=t^a, s^2=t^b,
    (rs)^(2^(n-2))=t^c> over the dihedral base, via the x^i s^j section."""
    n = dihedral.order
    m = n // 2
    a, b, c = params.a & 1, params.b & 1, params.c & 1

    # normal forms: x = rotation (first generator), s = reflection (second)
    rot, ref = dihedral.gens[0], dihedral.gens[1]
    nf = {}
    for i in range(m):
        xi = dihedral.power(rot, i)
        nf[xi] = (i, 0)
        nf[dihedral.mul(xi, ref)] = (i, 1)
    if len(nf) != n:
        raise AssertionError("dihedral normal form failed")

    def lifted_mul(i1, j1, e1, i2, j2, e2):
        # (X^i1 s^j1 t^e1)(X^i2 s^j2 t^e2) in the presented group
        e = e1 ^ e2
        if j1 == 1:
            # s X^i2 = X^(-i2) t^((a+b) i2) s
            e ^= ((a + b) * i2) & 1
            i2 = -i2
        i = i1 + i2
        while i < 0:
            i += m
            e ^= c
        while i >= m:
            i -= m
            e ^= c
        j = j1 + j2
        if j == 2:
            j = 0
            e ^= b
        return i, j, e

    table = np.zeros((n, n), dtype=np.uint8)
    for u in range(n):
        i1, j1 = nf[u]
        for v in range(n):
            i2, j2 = nf[v]
            _, _, e = lifted_mul(i1, j1, 0, i2, j2, 0)
            table[u, v] = e
    coc = Cocycle(dihedral, table)
    coc.check()
    return coc


def classify_central_extensions(gbar: FiniteGroup):
    """One entry per H^2 class: (coords, Cocycle, middle group, iso type)."""
    if gbar.order > 32:
        raise ValueError("extension classification capped at |gbar| <= 32")
    basis = h2_basis(gbar)
    out = []
    for coords in basis.all_class_coords():
        coc = basis.class_rep(coords)
        ext = extension_from_cocycle(gbar, coc)
        mid = ext.group
        if mid.order & (mid.order - 1) == 0 and mid.order <= 64:
            iso = iso_type_2group(mid)
        else:
            iso = f"order{mid.order}"
        out.append((coords, coc, ext, iso))
    return out


def unique_quaternion_class(dihedral: FiniteGroup) -> Cocycle:
    """The unique H^2 class whose middle group is generalised quaternion."""
    target = f"Q{2 * dihedral.order}"
    hits = [coc for _, coc, _, iso in classify_central_extensions(dihedral)
            if iso == target]
    if len(hits) != 1:
        raise AssertionError(
            f"expected exactly one quaternion class, found {len(hits)}")
    return hits[0]
