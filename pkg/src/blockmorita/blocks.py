"""Blocks of kG: the class-sum center, block idempotents, the principal
block, block components of modules, and Cartan matrices at desk scale."""

from __future__ import annotations

import numpy as np

from . import _kernels as K
from . import fpoly
from .ffield import GF, FieldMatrix, FieldSpec
from .groups import FiniteGroup, Subgroup
from .modrep import GModule, _mm, chop, hom_space_dim, regular_module
from .rng import Rng

BLOCK_GROUP_CAP = 100_000


class CenterData:
    """Class sums of kG and their structure constants over GF(2^e)."""

    def __init__(self, group: FiniteGroup, field: FieldSpec):
        if group.order > BLOCK_GROUP_CAP:
            raise ValueError("center computation capped")
        self.group = group
        self.field = field
        classes = group.conjugacy_classes()
        self.classes = classes
        self.nc = len(classes)
        class_of = np.zeros(group.order, dtype=np.int64)
        for i, cls in enumerate(classes):
            for x in cls:
                class_of[int(x)] = i
        self.class_of = class_of
        # integer structure constants a[i,j,k]: fix a representative z of
        # class k and count pairs (x, y) in C_i x C_j with x y = z
        counts = np.zeros((self.nc, self.nc, self.nc), dtype=np.int64)
        for k in range(self.nc):
            z = int(classes[k][0])
            for i in range(self.nc):
                for x in classes[i]:
                    y = group.mul(group.inv(int(x)), z)
                    counts[i, class_of[y], k] += 1
        self.tensor = (counts % 2).astype(np.uint8)
        self.one = np.zeros(self.nc, dtype=np.uint8)
        self.one[int(class_of[0])] = 1

    def mul(self, u, v):
        return K.sc_mul(np.ascontiguousarray(u, dtype=np.uint8),
                        np.ascontiguousarray(v, dtype=np.uint8),
                        self.tensor, self.field.MUL)

    def min_poly(self, x):
        nc = self.nc
        cap = nc + 1
        width = nc + cap + 1
        from .modrep import EchelonBasis
        basis = EchelonBasis(self.field, width)
        power = self.one.copy()
        for k in range(cap + 1):
            row = np.zeros(width, dtype=np.uint8)
            row[:nc] = power
            row[nc + k] = 1
            red, _ = basis.reduce(row)
            if not np.any(red[:nc]):
                return fpoly.norm(red[nc:nc + k + 1].copy())
            basis.insert(row)
            power = self.mul(power, x)
        raise AssertionError("center minimal polynomial overflow")

    def poly_at(self, coeffs, x):
        out = np.zeros(self.nc, dtype=np.uint8)
        for c in coeffs[::-1]:
            out = self.mul(out, x)
            if c:
                out ^= self.field.MUL[int(c)][self.one]
        return out


def _split_commutative(cd: CenterData, rng: Rng):
    """Complete orthogonal primitive idempotents of the class-sum algebra."""
    f = cd.field
    parts = [cd.one.copy()]
    changed = True
    while changed:
        changed = False
        for t in range(cd.nc):
            z = np.zeros(cd.nc, dtype=np.uint8)
            z[t] = 1
            new_parts = []
            for part in parts:
                x = cd.mul(z, part)
                mu = cd.min_poly(x)
                factors = fpoly.factor(f, mu, rng.derive(f"blk{t}"))
                if len(factors) <= 1:
                    new_parts.append(part)
                    continue
                moduli = []
                for p, a in factors:
                    acc = np.array([1], dtype=np.uint8)
                    for _ in range(a):
                        acc = fpoly.pmul(f, acc, p)
                    moduli.append(acc)
                crts = fpoly.crt_idempotent_polys(f, moduli)
                pieces = []
                rest = part.copy()
                for (p, a), cpoly in zip(factors, crts):
                    if fpoly.deg(p) == 1 and p[0] == 0:
                        continue
                    e = cd.mul(part, cd.poly_at(cpoly, x))
                    if np.any(e):
                        pieces.append(e)
                        rest ^= e
                if np.any(rest):
                    pieces.append(rest)
                if len(pieces) > 1:
                    changed = True
                new_parts.extend(pieces)
            parts = new_parts
    # sanity: orthogonal idempotents summing to 1
    total = np.zeros(cd.nc, dtype=np.uint8)
    for p in parts:
        total ^= p
        if not np.array_equal(cd.mul(p, p), p):
            raise AssertionError("block candidate is not idempotent")
    if not np.array_equal(total, cd.one):
        raise AssertionError("block idempotents do not sum to 1")
    for i in range(len(parts)):
        for j in range(i + 1, len(parts)):
            if np.any(cd.mul(parts[i], parts[j])):
                raise AssertionError("block idempotents are not orthogonal")
    return parts


class BlockData:
    def __init__(self, group, field, idempotents, principal_index):
        self.group = group
        self.field = field
        self.idempotents = idempotents
        self.principal_index = principal_index

    @property
    def principal(self):
        return self.idempotents[self.principal_index]


def block_idempotents(group: FiniteGroup, field: FieldSpec, rng: Rng,
                      stabilize=True) -> BlockData:
    """Blocks of kG over a field big enough that the count is stable."""
    e = field.e
    while True:
        cd = CenterData(group, GF(e))
        parts = _split_commutative(cd, rng.derive(f"blocks:{group.name}:{e}"))
        if not stabilize or e >= 8:
            break
        cd2 = CenterData(group, GF(2 * e))
        parts2 = _split_commutative(cd2, rng.derive(f"blocks:{group.name}:{2*e}"))
        if len(parts2) == len(parts):
            break
        e = 2 * e
    # principal block: acts as identity on the trivial module, i.e. the
    # class-size weighted coefficient sum is 1
    fld = GF(e)
    principal = None
    for i, part in enumerate(parts):
        acc = 0
        for c, cls in zip(part, cd.classes):
            if int(c) and len(cls) % 2 == 1:
                acc ^= int(c)
        if acc == 1:
            if principal is not None:
                raise AssertionError("two principal idempotent candidates")
            principal = i
    if principal is None:
        raise AssertionError("no principal idempotent found")
    return BlockData(group, fld, parts, principal)


def idempotent_operator(v: GModule, cd_or_bd, coeffs) -> np.ndarray:
    """Dense action of a central idempotent on a module, by a group walk."""
    group = v.group
    if isinstance(cd_or_bd, BlockData):
        class_of = CenterData(group, cd_or_bd.field).class_of
    else:
        class_of = cd_or_bd.class_of
    f = v.field
    out = np.zeros((v.dim, v.dim), dtype=np.uint8)
    mats = {0: np.eye(v.dim, dtype=np.uint8)}
    order = sorted(range(group.order), key=lambda i: len(group.words[i]))
    for x in order:
        if x == 0:
            m = mats[0]
        else:
            p, gi = group.parent[x]
            m = _mm(f, mats[p], v.gen_mats[gi])
            mats[x] = m
        c = int(coeffs[class_of[x]])
        if c:
            out ^= f.MUL[c][m]
    return out


def regular_idempotent_operator(group: FiniteGroup, field, class_of, coeffs):
    """Right multiplication by a central element on kG, combinatorially."""
    n = group.order
    out = np.zeros((n, n), dtype=np.uint8)
    for c_idx in np.nonzero(coeffs)[0]:
        c = int(coeffs[c_idx])
        for y in np.nonzero(class_of == c_idx)[0]:
            col = np.array([group.mul(x, int(y)) for x in range(n)], dtype=np.int64)
            out[np.arange(n), col] ^= c
    return out


def block_dimension(bd: BlockData, index=None) -> int:
    """Dimension of a block ideal of kG (rank of the idempotent on kG)."""
    group = bd.group
    cd = CenterData(group, bd.field)
    coeffs = bd.idempotents[bd.principal_index if index is None else index]
    op = regular_idempotent_operator(group, bd.field, cd.class_of, coeffs)
    return FieldMatrix(bd.field, op).rank()


def block_component(v: GModule, bd: BlockData, index=None) -> GModule:
    """Image of a block idempotent on a module, with the restricted action."""
    coeffs = bd.idempotents[bd.principal_index if index is None else index]
    f = v.field
    if f.e != bd.field.e:
        raise ValueError("module field does not match block field")
    op = idempotent_operator(v, bd, coeffs)
    red, rank, piv = K.rref_u8(op, f.MUL, f.INV)
    basis = np.ascontiguousarray(red[:rank])
    piv = np.array(piv, dtype=np.int64)
    gen_mats = []
    for m in v.gen_mats:
        img = _mm(f, basis, m)
        work = img.copy()
        coeffs2 = K.reduce_vs_rref_u8(work, basis, piv, f.MUL)
        if np.any(work):
            raise AssertionError("block component is not invariant")
        gen_mats.append(np.ascontiguousarray(coeffs2))
    mod = GModule(v.group, f, gen_mats, name=f"{v.name}.b")
    mod.embedding = FieldMatrix(f, basis)
    return mod


def simple_block_scalar(s: GModule, bd: BlockData) -> int:
    """1 if the simple lies in the given principal block, else 0."""
    op = idempotent_operator(s, bd, bd.principal)
    if np.array_equal(op, np.eye(s.dim, dtype=np.uint8)):
        return 1
    if not op.any():
        return 0
    raise AssertionError("central idempotent acts non-scalar on a simple")


def all_simples(group: FiniteGroup, field: FieldSpec, rng: Rng):
    """All simple kG-modules over a splitting field.

    Seeds with k[G/P] for a Sylow 2-subgroup P (faithful for G over the
    2-core, whose simples are all of kG's) and closes under tensor
    products of found simples until the count matches the number of
    odd-order conjugacy classes.  Returns (field_used, simples).
    """
    from .groups import sylow2
    from .modrep import permutation_module, tensor, is_isomorphic
    target = sum(1 for cls in group.conjugacy_classes()
                 if group.order_of(int(cls[0])) % 2 == 1)
    fld = field
    while True:
        p = sylow2(group, rng)
        seed = permutation_module(group, p, fld)
        simples: list[GModule] = []
        queue = [seed]
        tried = set()
        escalated = False
        while queue and len(simples) < target:
            mod = queue.pop(0)
            res = chop(mod, rng, ensure_split=True)
            if res.module.field.e != fld.e:
                fld = res.module.field
                escalated = True
                break
            for s, _ in res.as_pairs():
                if not any(t.dim == s.dim and hom_space_dim(s, t) > 0
                           for t in simples):
                    simples.append(s)
            if not queue and len(simples) < target:
                for i in range(len(simples)):
                    for j in range(i, len(simples)):
                        if (i, j) not in tried:
                            tried.add((i, j))
                            queue.append(tensor(simples[i], simples[j]))
                            break
                    else:
                        continue
                    break
                else:
                    raise AssertionError("tensor closure exhausted before "
                                         "finding all simples")
        if escalated:
            continue
        if len(simples) != target:
            raise AssertionError("simple count does not match 2-regular classes")
        simples.sort(key=lambda s: s.dim)
        return fld, simples


def cartan_matrix(group: FiniteGroup, bd: BlockData, rng: Rng):
    """Cartan matrix of a block from the regular module decomposition.

    Returns (C, pim_dims, simple_dims): C[i, j] = multiplicity of simple i
    as a composition factor of the j-th projective indecomposable.
    """
    from .hecke import decompose_permutation_module
    f = bd.field
    reg = regular_module(group, f)
    dec = decompose_permutation_module(reg, rng.derive(f"cartan:{group.name}"))
    pims = []
    for summand, mult in dec.as_pairs():
        op = idempotent_operator(summand, bd, bd.principal)
        if np.array_equal(op, np.eye(summand.dim, dtype=np.uint8)):
            pims.append(summand)
        elif op.any():
            raise AssertionError("block idempotent acts non-scalar on a PIM")
    simples: list[GModule] = []
    cols = []
    for pim in pims:
        res = chop(pim, rng, ensure_split=False)
        col = {}
        for s, mult in res.as_pairs():
            hit = None
            for i, t in enumerate(simples):
                if t.dim == s.dim and hom_space_dim(s, t) > 0:
                    hit = i
                    break
            if hit is None:
                simples.append(s)
                hit = len(simples) - 1
            col[hit] = mult
        cols.append(col)
    # align PIM columns with their head simples so the matrix is symmetric
    heads = []
    for pim in pims:
        hs = [i for i, s in enumerate(simples) if hom_space_dim(pim, s) > 0]
        if len(hs) != 1:
            raise AssertionError("projective indecomposable with unclear head")
        heads.append(hs[0])
    if sorted(heads) != list(range(len(simples))):
        raise AssertionError("heads do not biject with simples")
    order = [heads.index(i) for i in range(len(simples))]
    c = np.zeros((len(simples), len(simples)), dtype=np.int64)
    for jj, j in enumerate(order):
        for i, mult in cols[j].items():
            c[i, jj] = mult
    if not np.array_equal(c, c.T):
        raise AssertionError("Cartan matrix is not symmetric")
    return c, [pims[j].dim for j in order], [s.dim for s in simples]
