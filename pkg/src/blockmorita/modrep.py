"""kG-modules as generator matrices: constructions, fixed points, relative
traces, Brauer quotients, a Norton-criterion MeatAxe, and hom spaces.

Modules act on row vectors from the right, so rho(gh) = rho(g) rho(h) and
submodules are row spaces closed under all generator matrices.
"""

from __future__ import annotations

import numpy as np

from . import _kernels as K
from . import fpoly
from .ffield import GF, FieldMatrix, FieldSpec
from .groups import FiniteGroup, QuotientMap, Subgroup
from .rng import Rng

DENSE_DIM_CAP = 8000
HOM_UNKNOWN_CAP = 6500
FIELD_E_CAP = 8


class CapExceeded(ValueError):
    pass


def _mm(f: FieldSpec, a, b):
    return K.mm_u8(a, b, f.MUL)


def _rref(f: FieldSpec, a):
    return K.rref_u8(np.ascontiguousarray(a), f.MUL, f.INV)


def _rownull(f: FieldSpec, a):
    """Rows x with x . a = 0."""
    return FieldMatrix(f, a.T.copy()).nullspace_basis().data


class EchelonBasis:
    """Incrementally maintained RREF row basis over GF(2^e), e <= 8."""

    def __init__(self, field: FieldSpec, width: int):
        self.f = field
        self.width = width
        self.rows = np.zeros((0, width), dtype=np.uint8)
        self.pivots: list[int] = []

    @property
    def nrows(self):
        return self.rows.shape[0]

    def reduce(self, row):
        """Reduced copy of ``row``; also returns basis coefficients."""
        r = np.ascontiguousarray(row, dtype=np.uint8).reshape(1, -1).copy()
        if self.nrows:
            coeffs = K.reduce_vs_rref_u8(
                r, self.rows, np.array(self.pivots, dtype=np.int64), self.f.MUL
            )[0]
        else:
            coeffs = np.zeros(0, dtype=np.uint8)
        return r[0], coeffs

    def insert(self, row):
        """Insert a vector; returns True if the basis grew."""
        r, _ = self.reduce(row)
        nz = np.nonzero(r)[0]
        if nz.size == 0:
            return False
        p = int(nz[0])
        lead = int(r[p])
        if lead != 1:
            r = self.f.MUL[self.f.INV[lead]][r]
        # back-reduce existing rows to keep the basis in RREF
        if self.nrows:
            col = self.rows[:, p].copy()
            sel = np.nonzero(col)[0]
            if sel.size:
                self.rows[sel] ^= self.f.MUL[col[sel][:, None], r[None, :]]
        at = int(np.searchsorted(np.array(self.pivots, dtype=np.int64), p))
        self.rows = np.insert(self.rows, at, r, axis=0)
        self.pivots.insert(at, p)
        return True

    def contains(self, row):
        r, _ = self.reduce(row)
        return not np.any(r)


def spin(field, seeds, mats):
    """Row space closure of ``seeds`` under the matrices; RREF basis."""
    basis = EchelonBasis(field, mats[0].shape[0] if mats else seeds.shape[1])
    work = []
    for s in np.atleast_2d(seeds):
        if basis.insert(s):
            work.append(np.array(s, dtype=np.uint8))
    while work:
        v = work.pop()
        for m in mats:
            img = _mm(field, v.reshape(1, -1), m)[0]
            if basis.insert(img):
                work.append(img)
    return basis


def sub_quot_actions(field, basis: EchelonBasis, mats):
    """Action matrices on a submodule row space and on its quotient."""
    d = mats[0].shape[0]
    r = basis.nrows
    piv = np.array(basis.pivots, dtype=np.int64)
    compl = np.array([c for c in range(d) if c not in set(basis.pivots)], dtype=np.int64)
    sub_mats, quot_mats = [], []
    for m in mats:
        img = _mm(field, basis.rows, m)
        work = img.copy()
        coeffs = K.reduce_vs_rref_u8(work, basis.rows, piv, field.MUL)
        if np.any(work):
            raise AssertionError("row space is not invariant")
        sub_mats.append(np.ascontiguousarray(coeffs))
        if compl.size:
            eimg = np.ascontiguousarray(m[compl, :])
            wq = eimg.copy()
            K.reduce_vs_rref_u8(wq, basis.rows, piv, field.MUL)
            quot_mats.append(np.ascontiguousarray(wq[:, compl]))
        else:
            quot_mats.append(np.zeros((0, 0), dtype=np.uint8))
    return sub_mats, quot_mats


# ---------------------------------------------------------------------------
# coset actions
# ---------------------------------------------------------------------------

class CosetAction:
    """Right cosets H\\x of a subgroup with the right-translation action."""

    def __init__(self, group: FiniteGroup, stab: Subgroup, index_cap=DENSE_DIM_CAP):
        self.group = group
        self.stab = stab
        n = group.order
        if n // stab.order > index_cap:
            raise CapExceeded("coset index exceeds cap")
        cos_of = np.full(n, -1, dtype=np.int32)
        reps = []
        hm = [int(h) for h in stab.members]
        # BFS over cosets along group generators
        def new_coset(x):
            cid = len(reps)
            members = [group.mul(h, x) for h in hm]
            for mmb in members:
                cos_of[mmb] = cid
            reps.append(min(members))
            return cid

        new_coset(0)
        frontier = [0]
        while frontier:
            nxt = []
            for c in frontier:
                for g in group.gens:
                    y = group.mul(reps[c], g)
                    if cos_of[y] < 0:
                        nxt.append(new_coset(y))
            frontier = nxt
        self.cos_of = cos_of
        self.reps = reps
        self.npoints = len(reps)
        dt = np.int32
        self.gen_perms = []
        for g in group.gens:
            self.gen_perms.append(
                np.array([cos_of[group.mul(r, g)] for r in reps], dtype=dt)
            )
        # BFS tree over points for transversal bookkeeping
        parent = np.full(self.npoints, -1, dtype=np.int64)
        pgen = np.full(self.npoints, -1, dtype=np.int64)
        order = [0]
        seen = np.zeros(self.npoints, dtype=bool)
        seen[0] = True
        qi = 0
        while qi < len(order):
            c = order[qi]
            qi += 1
            for gi, perm in enumerate(self.gen_perms):
                y = int(perm[c])
                if not seen[y]:
                    seen[y] = True
                    parent[y] = c
                    pgen[y] = gi
                    order.append(y)
        self.tree_parent = parent
        self.tree_gen = pgen
        self.bfs_order = order

    def transversal_element(self, point):
        """Group element index carrying the base coset to ``point``."""
        word = []
        c = point
        while c != 0:
            word.append(int(self.tree_gen[c]))
            c = int(self.tree_parent[c])
        x = 0
        for gi in reversed(word):
            x = int(self.group.gen_right[gi, x])
        return x

    def perm_of_element(self, idx):
        """Permutation of the points induced by a group element."""
        p = np.arange(self.npoints, dtype=np.int32)
        for gi in self.group.words[idx]:
            p = self.gen_perms[gi][p]
        return p

    def fixed_points_of(self, sub: Subgroup):
        fixed = np.ones(self.npoints, dtype=bool)
        for s in sub.gens:
            fixed &= self.perm_of_element(s) == np.arange(self.npoints, dtype=np.int32)
        return np.nonzero(fixed)[0]

    def orbits_of(self, sub: Subgroup):
        """Orbit id per point under a subgroup, ordered by least point."""
        perms = [self.perm_of_element(s) for s in sub.gens]
        orbid = np.full(self.npoints, -1, dtype=np.int64)
        nid = 0
        for s in range(self.npoints):
            if orbid[s] >= 0:
                continue
            stackp = [s]
            orbid[s] = nid
            while stackp:
                x = stackp.pop()
                for p in perms:
                    y = int(p[x])
                    if orbid[y] < 0:
                        orbid[y] = nid
                        stackp.append(y)
            nid += 1
        return orbid, nid


# ---------------------------------------------------------------------------
# GModule
# ---------------------------------------------------------------------------

class GModule:
    def __init__(self, group: FiniteGroup, field: FieldSpec, gen_mats, coset=None,
                 name="V"):
        self.group = group
        self.field = field
        self.gen_mats = [np.ascontiguousarray(m, dtype=np.uint8) for m in gen_mats]
        self.dim = self.gen_mats[0].shape[0] if self.gen_mats else 0
        if not self.gen_mats and group.gens:
            raise ValueError("generator matrices required")
        self.coset = coset
        self.name = name
        self._elt_cache: dict = {0: np.eye(self.dim, dtype=np.uint8)}

    def __repr__(self):
        return f"GModule({self.name}, dim={self.dim}, {self.field}, {self.group.name})"

    def element_matrix(self, idx):
        if idx in self._elt_cache:
            return self._elt_cache[idx]
        word = self.group.words[idx]
        m = np.eye(self.dim, dtype=np.uint8)
        x = 0
        # reuse longest cached prefix
        for k, gi in enumerate(word):
            x = int(self.group.gen_right[gi, x])
            m = _mm(self.field, m, self.gen_mats[gi])
            if x not in self._elt_cache and len(self._elt_cache) < 4 * self.group.order:
                self._elt_cache[x] = m
        return m

    def validate(self, rng: Rng, samples=100):
        """Defining relations: rho(x) rho(y) = rho(xy) on sampled pairs."""
        g = self.group
        rng = rng.derive("validate")
        pairs = []
        if g.order <= 500:
            pairs = [(x, gi) for x in range(g.order) for gi in g.gens]
            for x, y in pairs:
                lhs = _mm(self.field, self.element_matrix(x), self.element_matrix(y))
                if not np.array_equal(lhs, self.element_matrix(g.mul(x, y))):
                    raise AssertionError("module relations violated")
        else:
            for _ in range(samples):
                x, y = rng.randint(g.order), rng.randint(g.order)
                lhs = _mm(self.field, self.element_matrix(x), self.element_matrix(y))
                if not np.array_equal(lhs, self.element_matrix(g.mul(x, y))):
                    raise AssertionError("module relations violated")
        for m in self.gen_mats:
            if FieldMatrix(self.field, m).rank() != self.dim:
                raise AssertionError("generator action is singular")
        return True

    def over_field(self, big: FieldSpec):
        emb = self.field.embed_table(big)
        mats = [emb[m].astype(np.uint8) for m in self.gen_mats]
        return GModule(self.group, big, mats, coset=self.coset,
                       name=f"{self.name}@e{big.e}")

    def dual(self):
        mats = [
            np.ascontiguousarray(FieldMatrix(self.field, m).inverse().data.T)
            for m in self.gen_mats
        ]
        return GModule(self.group, self.field, mats, name=f"{self.name}*")

    def fingerprint(self):
        import hashlib
        h = hashlib.sha256()
        h.update(f"{self.group.name}|{self.group.order}|{self.field.e}|{self.dim}".encode())
        for m in self.gen_mats:
            h.update(m.tobytes())
        return h.hexdigest()[:16]

    def header(self):
        return {
            "schema": 1,
            "group": self.group.name,
            "group_order": self.group.order,
            "field_e": self.field.e,
            "dim": self.dim,
            "generators": len(self.gen_mats),
            "fingerprint": self.fingerprint(),
        }

    def save_blobs(self, directory):
        """JSON header plus one FFMX blob per generator matrix."""
        import json
        import os
        os.makedirs(directory, exist_ok=True)
        with open(os.path.join(directory, "header.json"), "w") as fh:
            json.dump(self.header(), fh, indent=1)
        for i, m in enumerate(self.gen_mats):
            blob = FieldMatrix(self.field, m).to_ffmx()
            with open(os.path.join(directory, f"gen{i}.ffmx"), "wb") as fh:
                fh.write(blob)

    @staticmethod
    def load_blobs(directory, group):
        import json
        import os
        from .ffield import read_ffmx
        with open(os.path.join(directory, "header.json")) as fh:
            head = json.load(fh)
        if head["group"] != group.name or head["group_order"] != group.order:
            raise ValueError("cached module belongs to a different group")
        mats = []
        for i in range(head["generators"]):
            with open(os.path.join(directory, f"gen{i}.ffmx"), "rb") as fh:
                mats.append(read_ffmx(fh.read()).data)
        mod = GModule(group, GF(head["field_e"]), mats, name=head.get("name", "V"))
        if mod.fingerprint() != head["fingerprint"]:
            raise ValueError("cached module fingerprint mismatch")
        return mod


def trivial_module(group, field):
    return GModule(group, field, [np.eye(1, dtype=np.uint8) for _ in group.gens],
                   name="k")


def permutation_module(group, stab: Subgroup, field, index_cap=DENSE_DIM_CAP):
    ca = CosetAction(group, stab, index_cap)
    n = ca.npoints
    mats = []
    for perm in ca.gen_perms:
        m = np.zeros((n, n), dtype=np.uint8)
        m[np.arange(n), perm] = 1
        mats.append(m)
    return GModule(group, field, mats, coset=ca,
                   name=f"k[{group.name}/{stab.name}]")


def regular_module(group, field):
    return permutation_module(group, Subgroup(group, [], name="1"), field)


def restrict(v: GModule, sub: Subgroup) -> GModule:
    sg, to_parent, _ = sub.as_group()
    mats = [v.element_matrix(int(to_parent[g])) for g in sg.gens]
    return GModule(sg, v.field, mats, name=f"{v.name}|{sub.name}")


def induce(v: GModule, parent: FiniteGroup, sub: Subgroup) -> GModule:
    """Induced module; v must be a module for sub.as_group()."""
    sg, to_parent, from_parent = sub.as_group()
    if v.group is not sg:
        raise ValueError("module is not over the subgroup's standalone group")
    ca = CosetAction(parent, sub)
    npts, d = ca.npoints, v.dim
    if npts * d > DENSE_DIM_CAP:
        raise CapExceeded("induced dimension exceeds cap")
    trans = [ca.transversal_element(c) for c in range(npts)]
    mats = []
    for g in parent.gens:
        m = np.zeros((npts * d, npts * d), dtype=np.uint8)
        for c in range(npts):
            x = parent.mul(trans[c], g)
            c2 = int(ca.cos_of[x])
            h = parent.mul(x, parent.inv(trans[c2]))
            hm = v.element_matrix(from_parent[h])
            m[c * d:(c + 1) * d, c2 * d:(c2 + 1) * d] = hm
        mats.append(m)
    return GModule(parent, v.field, mats, name=f"({v.name})^{parent.name}")


def tensor(v: GModule, w: GModule) -> GModule:
    if v.group is not w.group:
        raise ValueError("tensor over one group requires a common group")
    f = v.field
    mats = [
        FieldMatrix(f, a).kronecker(FieldMatrix(f, b)).data
        for a, b in zip(v.gen_mats, w.gen_mats)
    ]
    return GModule(v.group, f, mats, name=f"{v.name}(x){w.name}")


def outer_tensor(v: GModule, w: GModule, product: FiniteGroup) -> GModule:
    """Module over the direct product (generators: v-gens then w-gens)."""
    f = v.field
    iv = np.eye(v.dim, dtype=np.uint8)
    iw = np.eye(w.dim, dtype=np.uint8)
    mats = [FieldMatrix(f, a).kronecker(FieldMatrix(f, iw)).data for a in v.gen_mats]
    mats += [FieldMatrix(f, iv).kronecker(FieldMatrix(f, b)).data for b in w.gen_mats]
    return GModule(product, f, mats, name=f"{v.name}#{w.name}")


def push_to_quotient(v: GModule, qm: QuotientMap) -> GModule:
    for kgen in qm.kernel.gens:
        if not np.array_equal(v.element_matrix(kgen), np.eye(v.dim, dtype=np.uint8)):
            raise ValueError("quotient kernel acts nontrivially")
    return GModule(qm.target, v.field, v.gen_mats, name=f"{v.name}~")


# ---------------------------------------------------------------------------
# fixed points, relative trace, Brauer quotient
# ---------------------------------------------------------------------------

def fixed_points(v: GModule, sub: Subgroup) -> FieldMatrix:
    """Row basis of V^Q, Q given by subgroup generators (parent indices)."""
    if not sub.gens:
        return FieldMatrix.identity(v.field, v.dim)
    blocks = []
    eye = np.eye(v.dim, dtype=np.uint8)
    for s in sub.gens:
        blocks.append(np.ascontiguousarray((v.element_matrix(s) ^ eye).T))
    stacked = np.concatenate(blocks, axis=0)  # x . (m - I) = 0 for each gen
    return FieldMatrix(v.field, stacked).nullspace_basis()


def right_transversal(q: Subgroup, r: Subgroup):
    """Right transversal of r inside q (element indices of the parent)."""
    g = q.parent
    rset = r.member_set
    if not rset <= q.member_set:
        raise ValueError("r is not contained in q")
    seen = set()
    reps = []
    for x in q.members:
        x = int(x)
        key = min(g.mul(int(h), x) for h in r.members)
        if key not in seen:
            seen.add(key)
            reps.append(x)
    return reps


def relative_trace(v: GModule, r: Subgroup, q: Subgroup):
    """(basis of V^R, matrix of Tr^Q_R on that basis, image rows in V)."""
    if r.order >= q.order:
        raise ValueError("relative trace requires r proper in q")
    vr = fixed_points(v, r)
    tr = np.zeros((v.dim, v.dim), dtype=np.uint8)
    for t in right_transversal(q, r):
        tr ^= v.element_matrix(t)
    images = _mm(v.field, vr.data, tr)
    return vr, FieldMatrix(v.field, images)


def frattini_quotient_coords(sq: FiniteGroup):
    """(coords array |G| x d over GF(2), d) for G/Phi(G) of a 2-group."""
    gens_phi = []
    for x in range(sq.order):
        gens_phi.append(sq.mul(x, x))
    for a in sq.gens:
        for b in sq.gens:
            gens_phi.append(sq.mul(sq.mul(sq.inv(a), sq.inv(b)), sq.mul(a, b)))
    phi = sq.subgroup_closure([g for g in gens_phi if g != 0])
    phiset = set(int(x) for x in phi)
    # cosets of Phi
    cos_of = np.full(sq.order, -1, dtype=np.int64)
    reps = []
    for x in range(sq.order):
        if cos_of[x] >= 0:
            continue
        cid = len(reps)
        for f in phiset:
            cos_of[sq.mul(f, x)] = cid
        reps.append(x)
    ncos = len(reps)
    d = ncos.bit_length() - 1
    # coordinates: greedy independent generators of the elementary quotient
    coords = np.full((ncos, max(d, 1)), -1, dtype=np.int64)
    coords[0] = 0
    have = {0: np.zeros(max(d, 1), dtype=np.int64)}
    basis = []
    for c in range(ncos):
        if c in have:
            continue
        basis.append(c)
        k = len(basis) - 1
        for old, vec in list(have.items()):
            nc = int(cos_of[sq.mul(reps[old], reps[c])])
            nv = vec.copy()
            nv[k] = 1
            have[nc] = nv
    out = np.zeros((sq.order, max(d, 1)), dtype=np.uint8)
    for x in range(sq.order):
        out[x] = have[int(cos_of[x])]
    return out, d


def maximal_subgroups(q: Subgroup):
    """Index-2 subgroups of a 2-subgroup, as subgroups of the parent."""
    sq, to_parent, _ = q.as_group()
    coords, d = frattini_quotient_coords(sq)
    out = []
    for lam in range(1, 1 << d):
        lv = np.array([(lam >> i) & 1 for i in range(d)], dtype=np.uint8)
        members = [int(to_parent[x]) for x in range(sq.order)
                   if int(coords[x] @ lv) % 2 == 0]
        from .groups import _subgroup_gens
        out.append(Subgroup(q.parent, _subgroup_gens(q.parent, sorted(members)),
                            members=np.array(sorted(members), dtype=np.int64),
                            name=f"{q.name}max"))
    return out


def brauer_quotient(v: GModule, q: Subgroup):
    """V(Q) = V^Q / sum of relative traces, as a module over N_G(Q)."""
    f = v.field
    vq = fixed_points(v, q)
    rel = EchelonBasis(f, v.dim)
    if q.order > 1:
        for r in maximal_subgroups(q):
            _, images = relative_trace(v, r, q)
            for row in images.data:
                rel.insert(row)
    # express the trace span inside V^Q coordinates
    vq_basis = EchelonBasis(f, v.dim)
    for row in vq.data:
        vq_basis.insert(row)
    piv = np.array(vq_basis.pivots, dtype=np.int64)
    sub_coords = EchelonBasis(f, vq_basis.nrows)
    for row in rel.rows:
        work = row.reshape(1, -1).copy()
        coeffs = K.reduce_vs_rref_u8(work, vq_basis.rows, piv, f.MUL)
        if np.any(work):
            raise AssertionError("trace image escapes the fixed space")
        sub_coords.insert(coeffs[0])
    ng = v.group.normalizer(q)
    ns, to_parent, _ = ng.as_group()
    # action of normalizer generators on V^Q coordinates
    coord_mats = []
    for gidx in ns.gens:
        m = v.element_matrix(int(to_parent[gidx]))
        img = _mm(f, vq_basis.rows, m)
        work = img.copy()
        coeffs = K.reduce_vs_rref_u8(work, vq_basis.rows, piv, f.MUL)
        if np.any(work):
            raise AssertionError("normalizer does not preserve fixed points")
        coord_mats.append(np.ascontiguousarray(coeffs))
    if sub_coords.nrows:
        _, quot_mats = sub_quot_actions(f, sub_coords, coord_mats)
    else:
        quot_mats = coord_mats
    mod = GModule(ns, f, quot_mats, name=f"{v.name}({q.name})")
    mod.normalizer = ng
    mod.fixed_dim = vq_basis.nrows
    mod.trace_dim = sub_coords.nrows
    return mod


# ---------------------------------------------------------------------------
# MeatAxe chop (Norton criterion)
# ---------------------------------------------------------------------------

def _poly_eval_mat(f: FieldSpec, coeffs, a):
    d = a.shape[0]
    out = np.zeros((d, d), dtype=np.uint8)
    eye = np.eye(d, dtype=np.uint8)
    for c in coeffs[::-1]:
        out = _mm(f, out, a)
        if c:
            out ^= f.MUL[int(c)][eye]
    return out


def _random_algebra_element(f, mats, words, rng):
    d = mats[0].shape[0]
    if len(words) < 12 and len(words) >= 2 and rng.randint(2):
        a = words[rng.randint(len(words))]
        b = words[rng.randint(len(words))]
        words.append(_mm(f, a, b))
    theta = np.zeros((d, d), dtype=np.uint8)
    for _ in range(2 + rng.randint(2)):
        c = rng.nonzero(f.q)
        w = words[rng.randint(len(words))]
        theta ^= f.MUL[c][w]
    if rng.randint(2):
        theta ^= f.MUL[rng.nonzero(f.q)][np.eye(d, dtype=np.uint8)]
    return theta


def chop_matrices(gen_mats, field, rng, max_tries=200):
    """Composition factors (with repetition) of the module given by matrices."""
    rng = rng.derive("chop")
    out = []
    stack = [list(gen_mats)]
    while stack:
        mats = stack.pop()
        d = mats[0].shape[0]
        if d == 0:
            continue
        if d == 1:
            out.append(mats)
            continue
        split = _split_or_certify(mats, field, rng, max_tries)
        if split is None:
            out.append(mats)
        else:
            stack.append(split[0])
            stack.append(split[1])
    return out


def _split_or_certify(mats, f, rng, max_tries):
    """Split into (sub, quotient) matrices, or None with an irreducibility
    certificate (Norton test at a minimal-nullity factor)."""
    d = mats[0].shape[0]
    words = list(mats)
    tmats = [np.ascontiguousarray(m.T) for m in mats]
    for attempt in range(max_tries):
        theta = _random_algebra_element(f, mats, words, rng)
        cp = K.charpoly_u8(theta, f.MUL, f.INV)
        factors = fpoly.factor(f, cp, rng.derive(f"fac{attempt}"))
        factors.sort(key=lambda t: (fpoly.deg(t[0]), t[0].tobytes()))
        for irr, _mult in factors:
            m_op = _poly_eval_mat(f, irr, theta)
            seeds = _rownull(f, m_op)
            if seeds.shape[0] == 0:
                raise AssertionError("charpoly factor with trivial kernel")
            for v in seeds:
                basis = spin(f, v.reshape(1, -1), mats)
                if 0 < basis.nrows < d:
                    return sub_quot_actions(f, basis, mats)
            # all seeds generate V; dual check with one seed
            dual_seeds = _rownull(f, np.ascontiguousarray(m_op.T))
            w = dual_seeds[0]
            dbasis = spin(f, w.reshape(1, -1), tmats)
            if dbasis.nrows < d:
                perp = FieldMatrix(f, dbasis.rows).nullspace_basis()
                basis = EchelonBasis(f, d)
                for row in perp.data:
                    basis.insert(row)
                if not (0 < basis.nrows < d):
                    raise AssertionError("perp of dual spin must be proper")
                return sub_quot_actions(f, basis, mats)
            if seeds.shape[0] == fpoly.deg(irr):
                # minimal nullity: Parker/Norton certificate is sound
                return None
            # no certificate from this factor; try the next one
    raise RuntimeError("chop failed to make progress within the try cap")


class ChopResult:
    def __init__(self, module, factors, multiplicities, endo_degrees):
        self.module = module      # possibly over an escalated field
        self.factors = factors    # distinct simples, GModules
        self.multiplicities = multiplicities
        self.endo_degrees = endo_degrees

    def total_dim(self):
        return sum(s.dim * m for s, m in zip(self.factors, self.multiplicities))

    def as_pairs(self):
        return list(zip(self.factors, self.multiplicities))


def chop(v: GModule, rng: Rng, ensure_split=True) -> ChopResult:
    """Composition factors; escalates the field until absolutely irreducible."""
    mod = v
    while True:
        raw = chop_matrices(mod.gen_mats, mod.field, rng)
        factors: list[GModule] = []
        counts: list[int] = []
        for mats in raw:
            s = GModule(mod.group, mod.field, mats, name=f"{mod.name}.s")
            placed = False
            for i, t in enumerate(factors):
                if t.dim == s.dim and hom_space_dim(s, t) > 0:
                    counts[i] += 1
                    placed = True
                    break
            if not placed:
                factors.append(s)
                counts.append(1)
        degrees = [hom_space_dim(s, s) for s in factors]
        if ensure_split and any(dg > 1 for dg in degrees):
            lcm = 1
            for dg in degrees:
                lcm = lcm * dg // _gcd(lcm, dg)
            new_e = mod.field.e * lcm
            if new_e > FIELD_E_CAP:
                raise CapExceeded(
                    f"field escalation to e={new_e} exceeds the supported cap")
            mod = mod.over_field(GF(new_e))
            continue
        return ChopResult(mod, factors, counts, degrees)


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


# ---------------------------------------------------------------------------
# hom spaces and isomorphism testing
# ---------------------------------------------------------------------------

def hom_space_basis(v: GModule, w: GModule):
    """Basis of Hom_kG(V, W) as (dimV x dimW) matrices."""
    if v.group is not w.group:
        if v.group.order != w.group.order or len(v.gen_mats) != len(w.gen_mats):
            raise ValueError("hom requires modules over the same group")
    f = v.field
    n = v.dim * w.dim
    if n == 0:
        return []
    if n > HOM_UNKNOWN_CAP:
        raise CapExceeded(f"hom system with {n} unknowns exceeds cap")
    iw = FieldMatrix.identity(f, w.dim)
    iv = FieldMatrix.identity(f, v.dim)
    blocks = []
    for a, b in zip(v.gen_mats, w.gen_mats):
        fa = FieldMatrix(f, a)
        fbt = FieldMatrix(f, np.ascontiguousarray(b.T))
        mblock = fa.kronecker(iw) + iv.kronecker(fbt)
        blocks.append(mblock.data)
    stacked = np.concatenate(blocks, axis=0)
    ns = FieldMatrix(f, stacked).nullspace_basis()
    return [ns.data[i].reshape(v.dim, w.dim).copy() for i in range(ns.rows)]


def hom_space_dim(v: GModule, w: GModule) -> int:
    return len(hom_space_basis(v, w))


def is_isomorphic(v: GModule, w: GModule, rng: Rng) -> bool:
    if v is w:
        return True
    if v.dim != w.dim or v.field != w.field:
        return False
    if v.dim == 0:
        return True
    basis = hom_space_basis(v, w)
    if not basis:
        return False
    if hom_space_dim(w, v) != len(basis):
        return False
    f = v.field
    rng = rng.derive("iso")
    for _ in range(64):
        x = np.zeros((v.dim, w.dim), dtype=np.uint8)
        for b in basis:
            c = rng.randint(f.q)
            if c:
                x ^= f.MUL[c][b]
        if FieldMatrix(f, x).rank() == v.dim:
            return True
    if f.q ** len(basis) <= 4096:
        for mask in range(1, f.q ** len(basis)):
            x = np.zeros((v.dim, w.dim), dtype=np.uint8)
            t = mask
            for b in basis:
                c = t % f.q
                t //= f.q
                if c:
                    x ^= f.MUL[c][b]
            if FieldMatrix(f, x).rank() == v.dim:
                return True
        return False
    raise RuntimeError("isomorphism search inconclusive after random trials")
