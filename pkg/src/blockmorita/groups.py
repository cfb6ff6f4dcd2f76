"""Finite groups of the catalog: construction, enumeration, structure.

Elements are stored as raw numpy arrays (permutation images, or matrix
entries over a small odd field); after the generating closure all group
arithmetic runs on integer indices through per-generator lookup tables,
so scans over big groups never touch the raw representations again.
"""

from __future__ import annotations

import math

import numpy as np

from .rng import Rng

SIZE_CAP = 100_000


# ---------------------------------------------------------------------------
# small fields of odd order (matrix entries only, q = p or p^2 <= 169)
# ---------------------------------------------------------------------------

class SmallField:
    """GF(q) for odd q, with dense add/mul/inv tables."""

    def __init__(self, q):
        self.q = q
        p = None
        for cand in (3, 5, 7, 11, 13):
            if q == cand or q == cand * cand:
                p = cand
        if p is None:
            raise ValueError(f"unsupported matrix-entry field order {q}")
        self.p = p
        self.k = 1 if q == p else 2
        if self.k == 1:
            a = np.arange(q, dtype=np.int64)
            self.ADD = ((a[:, None] + a[None, :]) % q).astype(np.uint8)
            self.MUL = ((a[:, None] * a[None, :]) % q).astype(np.uint8)
            self.gen = 1
        else:
            # GF(p^2) = GF(p)[t]/(t^2 - nu), nu the least non-square mod p
            nu = next(n for n in range(2, p) if pow(n, (p - 1) // 2, p) == p - 1)
            self.nu = nu
            add = np.zeros((q, q), dtype=np.uint8)
            mul = np.zeros((q, q), dtype=np.uint8)
            for x in range(q):
                a0, a1 = x % p, x // p
                for y in range(q):
                    b0, b1 = y % p, y // p
                    add[x, y] = (a0 + b0) % p + p * ((a1 + b1) % p)
                    c0 = (a0 * b0 + nu * a1 * b1) % p
                    c1 = (a0 * b1 + a1 * b0) % p
                    mul[x, y] = c0 + p * c1
            self.ADD = add
            self.MUL = mul
            self.gen = p  # the class of t
        inv = np.zeros(q, dtype=np.uint8)
        for x in range(1, q):
            row = self.MUL[x]
            inv[x] = int(np.nonzero(row == 1)[0][0])
        self.INV = inv
        neg = np.zeros(q, dtype=np.uint8)
        for x in range(q):
            neg[x] = int(np.nonzero(self.ADD[x] == 0)[0][0])
        self.NEG = neg

    def nonsquare(self):
        squares = set(int(self.MUL[x, x]) for x in range(1, self.q))
        for x in range(2, self.q):
            if x not in squares:
                return x
        raise AssertionError("no non-square found")


_SMALL_FIELDS: dict = {}


def small_field(q):
    if q not in _SMALL_FIELDS:
        _SMALL_FIELDS[q] = SmallField(q)
    return _SMALL_FIELDS[q]


class QuadExt:
    """GF(q^2) built on top of a SmallField(q), elements 0..q^2-1."""

    def __init__(self, base: SmallField):
        self.base = base
        q = base.q
        self.q = q * q
        nu = base.nonsquare()
        self.nu = nu
        add = np.zeros((self.q, self.q), dtype=np.uint8)
        mul = np.zeros((self.q, self.q), dtype=np.uint8)
        badd, bmul = base.ADD, base.MUL
        for x in range(self.q):
            a0, a1 = x % q, x // q
            for y in range(self.q):
                b0, b1 = y % q, y // q
                add[x, y] = badd[a0, b0] + q * badd[a1, b1]
                c0 = badd[bmul[a0, b0], bmul[nu, bmul[a1, b1]]]
                c1 = badd[bmul[a0, b1], bmul[a1, b0]]
                mul[x, y] = c0 + q * c1
        self.ADD = add
        self.MUL = mul
        inv = np.zeros(self.q, dtype=np.uint8)
        for x in range(1, self.q):
            inv[x] = int(np.nonzero(mul[x] == 1)[0][0])
        self.INV = inv
        neg = np.zeros(self.q, dtype=np.uint8)
        for x in range(self.q):
            neg[x] = int(np.nonzero(add[x] == 0)[0][0])
        self.NEG = neg
        self.mu = base.q  # the class of t: mu^2 = nu
        self.embed = np.arange(base.q, dtype=np.uint8)  # constants


# ---------------------------------------------------------------------------
# element operation strategies
# ---------------------------------------------------------------------------

class PermOps:
    kind = "perm"

    def __init__(self, n):
        self.n = n
        self.dtype = np.uint16 if n > 255 else np.uint8

    def identity(self):
        return np.arange(self.n, dtype=self.dtype)

    def mul(self, a, b):
        return b[a]

    def inv(self, a):
        out = np.empty_like(a)
        out[a] = np.arange(self.n, dtype=a.dtype)
        return out

    def key(self, a):
        return a.tobytes()

    def order_raw(self, a):
        seen = np.zeros(self.n, dtype=bool)
        out = 1
        for s in range(self.n):
            if not seen[s]:
                ln = 0
                t = s
                while not seen[t]:
                    seen[t] = True
                    t = int(a[t])
                    ln += 1
                out = math.lcm(out, ln)
        return out


class MatOps:
    kind = "mat"

    def __init__(self, field, n):
        self.field = field
        self.n = n

    def identity(self):
        return np.eye(self.n, dtype=np.uint8)

    def mul(self, a, b):
        t = self.field.MUL[a[:, :, None], b[None, :, :]]
        acc = t[:, 0, :]
        for k in range(1, self.n):
            acc = self.field.ADD[acc, t[:, k, :]]
        return acc

    def inv(self, a):
        f = self.field
        n = self.n
        aug = np.concatenate([a.copy(), np.eye(n, dtype=np.uint8)], axis=1)
        for col in range(n):
            piv = next(i for i in range(col, n) if aug[i, col] != 0)
            if piv != col:
                aug[[col, piv]] = aug[[piv, col]]
            s = f.INV[aug[col, col]]
            aug[col] = f.MUL[s][aug[col]]
            for i in range(n):
                if i != col and aug[i, col]:
                    c = f.NEG[aug[i, col]]
                    aug[i] = f.ADD[aug[i], f.MUL[c][aug[col]]]
        return np.ascontiguousarray(aug[:, n:])

    def key(self, a):
        return a.tobytes()


class TupleOps:
    kind = "tuple"

    def __init__(self, parts):
        self.parts = parts

    def identity(self):
        return tuple(p.identity() for p in self.parts)

    def mul(self, a, b):
        return tuple(p.mul(x, y) for p, x, y in zip(self.parts, a, b))

    def inv(self, a):
        return tuple(p.inv(x) for p, x in zip(self.parts, a))

    def key(self, a):
        return b"|".join(p.key(x) for p, x in zip(self.parts, a))


# ---------------------------------------------------------------------------
# FiniteGroup
# ---------------------------------------------------------------------------

class FiniteGroup:
    def __init__(self, ops, gen_raws, name="G", check_cap=SIZE_CAP):
        self.ops = ops
        self.name = name
        ident = ops.identity()
        self.raws = [ident]
        self.index = {ops.key(ident): 0}
        gen_idx = []
        for raw in gen_raws:
            k = ops.key(raw)
            if k not in self.index:
                self.index[k] = len(self.raws)
                self.raws.append(raw)
            gen_idx.append(self.index[k])
        # BFS closure over generator right-multiplication
        frontier = list(range(len(self.raws)))
        self.parent = [(-1, -1)] * len(self.raws)
        for gi, g in enumerate(gen_idx):
            if g != 0:
                self.parent[g] = (0, gi)
        while frontier:
            new = []
            for i in frontier:
                for gi, g in enumerate(gen_idx):
                    raw = ops.mul(self.raws[i], self.raws[g])
                    k = ops.key(raw)
                    if k not in self.index:
                        idx = len(self.raws)
                        if idx >= check_cap:
                            raise ValueError("group closure exceeds size cap")
                        self.index[k] = idx
                        self.raws.append(raw)
                        self.parent.append((i, gi))
                        new.append(idx)
            frontier = new
        self.order = len(self.raws)
        self.gens = gen_idx
        # per-generator right multiplication tables
        n = self.order
        self.gen_right = np.zeros((max(1, len(gen_idx)), n), dtype=np.int32)
        for gi, g in enumerate(gen_idx):
            for i in range(n):
                self.gen_right[gi, i] = self.index[ops.key(ops.mul(self.raws[i], self.raws[g]))]
        # generator words along the BFS tree
        self.words = [()] * n
        for i in range(n):
            if i == 0:
                continue
            p, gi = self.parent[i]
            self.words[i] = self.words[p] + (gi,)
        self._inv = None
        self._orders = None
        self._classes = None

    # -- index arithmetic -------------------------------------------------

    def mul(self, i, j):
        x = i
        for gi in self.words[j]:
            x = int(self.gen_right[gi, x])
        return x

    def inv(self, i):
        if self._inv is None:
            inv = np.zeros(self.order, dtype=np.int32)
            for x in range(self.order):
                inv[x] = self.index[self.ops.key(self.ops.inv(self.raws[x]))]
            self._inv = inv
        return int(self._inv[i])

    def conj(self, i, g):
        """g^-1 * i * g."""
        return self.mul(self.mul(self.inv(g), i), g)

    def power(self, i, n):
        if n < 0:
            return self.power(self.inv(i), -n)
        acc, base = 0, i
        while n:
            if n & 1:
                acc = self.mul(acc, base)
            base = self.mul(base, base)
            n >>= 1
        return acc

    def order_of(self, i):
        if self._orders is not None and self._orders[i] >= 0:
            return int(self._orders[i])
        if hasattr(self.ops, "order_raw"):
            o = self.ops.order_raw(self.raws[i])
        else:
            o = 1
            x = i
            while x != 0:
                x = self.mul(x, i)
                o += 1
        if self._orders is None:
            self._orders = np.full(self.order, -1, dtype=np.int64)
        self._orders[i] = o
        return o

    def element_orders(self):
        return [self.order_of(i) for i in range(self.order)]

    # -- structure ---------------------------------------------------------

    def conjugacy_classes(self):
        """List of sorted index arrays, ordered by least member."""
        if self._classes is not None:
            return self._classes
        seen = np.zeros(self.order, dtype=bool)
        out = []
        ginv = [self.inv(g) for g in self.gens]
        for s in range(self.order):
            if seen[s]:
                continue
            orbit = [s]
            seen[s] = True
            queue = [s]
            while queue:
                x = queue.pop()
                for g, gi in zip(self.gens, ginv):
                    y = self.mul(self.mul(gi, x), g)
                    if not seen[y]:
                        seen[y] = True
                        orbit.append(y)
                        queue.append(y)
            out.append(np.array(sorted(orbit), dtype=np.int64))
        self._classes = out
        return out

    def subgroup_closure(self, gen_idxs):
        members = {0}
        frontier = [0]
        gen_idxs = [g for g in gen_idxs if g != 0]
        for g in gen_idxs:
            if g not in members:
                members.add(g)
                frontier.append(g)
        while frontier:
            new = []
            for i in frontier:
                for g in gen_idxs:
                    y = self.mul(i, g)
                    if y not in members:
                        members.add(y)
                        new.append(y)
            frontier = new
        return np.array(sorted(members), dtype=np.int64)

    def subgroup(self, gen_idxs, name="H"):
        return Subgroup(self, gen_idxs, name=name)

    def center(self):
        out = [i for i in range(self.order)
               if all(self.mul(i, g) == self.mul(g, i) for g in self.gens)]
        return Subgroup(self, out, members=np.array(out, dtype=np.int64), name="Z")

    def centralizer(self, sub):
        gens = sub.gens
        out = [i for i in range(self.order)
               if all(self.mul(i, s) == self.mul(s, i) for s in gens)]
        return Subgroup(self, _subgroup_gens(self, out), members=np.array(out, dtype=np.int64),
                        name="C")

    def normalizer(self, sub):
        sset = sub.member_set
        out = []
        for g in range(self.order):
            gi = self.inv(g)
            if all(self.mul(self.mul(gi, s), g) in sset for s in sub.gens):
                out.append(g)
        return Subgroup(self, _subgroup_gens(self, out), members=np.array(out, dtype=np.int64),
                        name="N")

    def normal_closure(self, seeds):
        gens = list(seeds)
        while True:
            sub = self.subgroup_closure(gens)
            sset = set(int(x) for x in sub)
            grown = False
            for x in list(sset):
                if x == 0:
                    continue
                for g in self.gens:
                    y = self.conj(x, g)
                    if y not in sset:
                        gens.append(y)
                        grown = True
                        break
                if grown:
                    break
            if not grown:
                return sub

    def is_abelian(self):
        return all(self.mul(a, b) == self.mul(b, a) for a in self.gens for b in self.gens)

    def derived_subgroup(self):
        comms = []
        for a in self.gens:
            for b in self.gens:
                c = self.mul(self.mul(self.inv(a), self.inv(b)), self.mul(a, b))
                if c != 0:
                    comms.append(c)
        members = self.normal_closure(comms) if comms else np.array([0], dtype=np.int64)
        return Subgroup(self, _subgroup_gens(self, [int(x) for x in members]),
                        members=members, name="derived")


def _subgroup_gens(group, members):
    """Small generating set for a known subgroup member list."""
    target = len(members)
    gens: list = []
    have = {0}
    for x in members:
        if x not in have:
            gens.append(int(x))
            have = set(int(v) for v in group.subgroup_closure(gens))
            if len(have) == target:
                break
    return gens


class Subgroup:
    def __init__(self, parent, gen_idxs, members=None, name="H"):
        self.parent = parent
        self.gens = [g for g in gen_idxs if g != 0]
        if members is None:
            members = parent.subgroup_closure(self.gens)
        self.members = np.asarray(members, dtype=np.int64)
        self.member_set = set(int(x) for x in self.members)
        self.order = len(self.members)
        self.name = name
        if parent.order % self.order != 0:
            raise AssertionError("Lagrange violated; not a subgroup")
        self._as_group = None

    def __contains__(self, idx):
        return int(idx) in self.member_set

    def as_group(self):
        """Standalone FiniteGroup on the same raws, with index maps."""
        if self._as_group is None:
            g = FiniteGroup(self.parent.ops, [self.parent.raws[i] for i in self.gens],
                            name=self.name)
            if g.order != self.order:
                raise AssertionError("subgroup closure mismatch")
            to_parent = np.array(
                [self.parent.index[self.parent.ops.key(r)] for r in g.raws], dtype=np.int64
            )
            from_parent = {int(p): i for i, p in enumerate(to_parent)}
            self._as_group = (g, to_parent, from_parent)
        return self._as_group

    def is_central(self):
        p = self.parent
        return all(
            p.mul(int(s), g) == p.mul(g, int(s)) for s in self.members for g in p.gens
        )

    def is_normal(self):
        p = self.parent
        return all(p.conj(s, g) in self.member_set for s in self.gens for g in p.gens)


class QuotientMap:
    """Central quotient G -> G/Z realized by the coset permutation action."""

    def __init__(self, source: FiniteGroup, kernel: Subgroup):
        if not kernel.is_central():
            raise ValueError("kernel is not central")
        self.source = source
        self.kernel = kernel
        n = source.order
        cos_of = np.full(n, -1, dtype=np.int64)
        reps = []
        for x in range(n):
            if cos_of[x] >= 0:
                continue
            cid = len(reps)
            members = sorted(source.mul(int(k), x) for k in kernel.members)
            for m in members:
                cos_of[m] = cid
            reps.append(members[0])
        self.cos_of = cos_of
        self.reps = reps
        ncos = len(reps)
        gen_perms = []
        for g in source.gens:
            perm = np.array([cos_of[source.mul(reps[c], g)] for c in range(ncos)],
                            dtype=np.uint16 if ncos > 255 else np.uint8)
            gen_perms.append(perm)
        self.target = FiniteGroup(PermOps(ncos), gen_perms,
                                  name=f"{source.name}/{kernel.name}")
        if self.target.order * kernel.order != source.order:
            raise AssertionError("quotient order mismatch")
        # projection on indices: walk each element's word in the target
        proj = np.zeros(n, dtype=np.int64)
        for x in range(n):
            t = 0
            for gi in source.words[x]:
                t = int(self.target.gen_right[gi, t])
            proj[x] = t
        self.proj = proj
        # a section: least source element mapping to each target element
        section = np.full(self.target.order, -1, dtype=np.int64)
        for x in range(n):
            t = proj[x]
            if section[t] < 0:
                section[t] = x
        self.section = section

    def __call__(self, idx):
        return int(self.proj[idx])


def central_quotient(g: FiniteGroup, z: Subgroup) -> QuotientMap:
    return QuotientMap(g, z)


def direct_product(g: FiniteGroup, h: FiniteGroup, name=None) -> FiniteGroup:
    ops = TupleOps([g.ops, h.ops])
    eg, eh = g.ops.identity(), h.ops.identity()
    gens = [(g.raws[i], eh) for i in g.gens] + [(eg, h.raws[j]) for j in h.gens]
    out = FiniteGroup(ops, gens, name=name or f"{g.name}*{h.name}")
    if out.order != g.order * h.order:
        raise AssertionError("direct product closure mismatch")
    out.factors = (g, h)
    # index of a pair without raw arithmetic
    out.pair_index = lambda i, j: out.index[ops.key((g.raws[i], h.raws[j]))]
    return out


# ---------------------------------------------------------------------------
# Sylow 2-subgroups, odd core
# ---------------------------------------------------------------------------

def two_part(n: int) -> int:
    return n & (-n)


def sylow2(g: FiniteGroup, rng: Rng | None = None) -> Subgroup:
    """A Sylow 2-subgroup, grown through normalizers; deterministic per seed."""
    rng = (rng or Rng()).derive(f"sylow2:{g.name}:{g.order}")
    target = two_part(g.order)
    if target == 1:
        return Subgroup(g, [], name="Syl2")
    current = Subgroup(g, [], name="Syl2")
    while current.order < target:
        if current.order == 1:
            pool = g
            candidates = [rng.randint(g.order) for _ in range(64)]
            candidates.extend(range(g.order))
        else:
            pool = g.normalizer(current)
            candidates = [int(x) for x in pool.members]
            candidates = rng.shuffled(candidates)
        found = False
        for x in candidates:
            o = g.order_of(x)
            odd = o // two_part(o)
            y = g.power(x, odd)
            if y != 0 and y not in current.member_set:
                cand = Subgroup(g, current.gens + [y], name="Syl2")
                if cand.order & (cand.order - 1) == 0:
                    current = cand
                    found = True
                    break
        if not found:
            raise AssertionError("sylow growth stalled; normalizer theorem violated")
    return current


def odd_core(g: FiniteGroup) -> Subgroup:
    """O_{2'}(g): the largest normal subgroup of odd order."""
    if g.order > SIZE_CAP:
        raise ValueError("odd core size cap exceeded")
    gens: list = []
    members = np.array([0], dtype=np.int64)
    for cls in g.conjugacy_classes():
        rep = int(cls[0])
        if rep == 0 or g.order_of(rep) % 2 == 0:
            continue
        if rep in set(int(x) for x in members):
            continue
        closure = g.normal_closure(gens + [rep])
        if len(closure) % 2 == 1:
            gens = _subgroup_gens(g, [int(x) for x in closure])
            members = closure
    return Subgroup(g, gens, members=members, name="O2'")
