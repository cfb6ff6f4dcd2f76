"""Finite-dimensional unital algebras by structure constants: radical,
Wedderburn structure, and complete orthogonal primitive idempotents.

This drives every direct-sum decomposition in the package.  The left
regular module is chopped with single-elimination spins (a left ideal
generated by v is the row space of the right-multiplication matrix of v),
the radical is the annihilator of the simples (certified nilpotent), and
primitive idempotents are lifted through the radical by squaring.
"""

from __future__ import annotations

import numpy as np

from . import _kernels as K
from . import fpoly
from .ffield import FieldMatrix, FieldSpec
from .modrep import EchelonBasis, _mm, _poly_eval_mat, _rownull
from .rng import Rng

SC_DIM_CAP = 300


class SCAlgebra:
    def __init__(self, field: FieldSpec, tensor: np.ndarray, one: np.ndarray,
                 name="E"):
        self.f = field
        self.C = np.ascontiguousarray(tensor, dtype=np.uint8)
        self.m = tensor.shape[0]
        self.one = np.ascontiguousarray(one, dtype=np.uint8)
        self.name = name
        if self.m > SC_DIM_CAP:
            raise ValueError(f"structure-constant algebra cap exceeded ({self.m})")

    # -- arithmetic -------------------------------------------------------

    def mul(self, u, v):
        return K.sc_mul(np.ascontiguousarray(u), np.ascontiguousarray(v),
                        self.C, self.f.MUL)

    def lmat(self, u):
        return K.sc_lmat(np.ascontiguousarray(u), self.C, self.f.MUL)

    def rmat(self, u):
        return K.sc_rmat(np.ascontiguousarray(u), self.C, self.f.MUL)

    def act_left_rows(self, rows, u):
        """Rows of coords x mapped to coords of u*x (row convention)."""
        return _mm(self.f, rows, np.ascontiguousarray(self.lmat(u).T))

    def random_element(self, rng):
        return np.array([rng.randint(self.f.q) for _ in range(self.m)],
                        dtype=np.uint8)

    def check_unit(self):
        for t in range(self.m):
            b = np.zeros(self.m, dtype=np.uint8)
            b[t] = 1
            if not np.array_equal(self.mul(self.one, b), b):
                raise AssertionError("unit fails on basis")
        return True

    @staticmethod
    def from_matrices(field, mats, name="E"):
        """Algebra spanned by the given matrices (span must be closed)."""
        m = len(mats)
        d = mats[0].shape[0]
        basis = EchelonBasis(field, d * d)
        keep = []
        for mat in mats:
            if basis.insert(mat.reshape(-1)):
                keep.append(np.ascontiguousarray(mat))
        if len(keep) != m:
            raise ValueError("matrix list is linearly dependent")
        piv = np.array(basis.pivots, dtype=np.int64)
        # column t of coord solve corresponds to basis.rows order, which is
        # a permutation of keep; build the change of basis explicitly
        flat = np.stack([mat.reshape(-1) for mat in keep])
        wk = flat.copy()
        conv = K.reduce_vs_rref_u8(wk, basis.rows, piv, field.MUL)
        if np.any(wk):
            raise AssertionError("echelon coordinates failed")
        conv_inv = FieldMatrix(field, conv).inverse().data
        tensor = np.zeros((m, m, m), dtype=np.uint8)
        for i in range(m):
            for j in range(m):
                prod = _mm(field, keep[i], keep[j]).reshape(1, -1).copy()
                coeffs = K.reduce_vs_rref_u8(prod, basis.rows, piv, field.MUL)
                if np.any(prod):
                    raise ValueError("matrix span is not closed under products")
                tensor[i, j] = _mm(field, coeffs, conv_inv)[0]
        eye = np.eye(d, dtype=np.uint8).reshape(1, -1).copy()
        coeffs = K.reduce_vs_rref_u8(eye, basis.rows, piv, field.MUL)
        if np.any(eye):
            raise ValueError("identity is not in the span")
        one = _mm(field, coeffs, conv_inv)[0]
        alg = SCAlgebra(field, tensor, one, name=name)
        alg.basis_mats = keep
        return alg

    # -- regular-module chop ------------------------------------------------

    def _whole_node(self):
        sub = EchelonBasis(self.f, self.m)
        q = EchelonBasis(self.f, self.m)
        for i in range(self.m):
            row = np.zeros(self.m, dtype=np.uint8)
            row[i] = 1
            q.insert(row)
        return _Node(self, sub, q)

    def chop_regular(self, rng: Rng):
        """Leaf nodes = composition factors of the left regular module."""
        rng = rng.derive("algchop")
        stack = [self._whole_node()]
        leaves = []
        while stack:
            node = stack.pop()
            if node.d == 0:
                continue
            if node.d == 1:
                leaves.append(node)
                continue
            res = self._node_split(node, rng)
            if res is None:
                leaves.append(node)
            else:
                stack.extend(res)
        return leaves

    def _node_split(self, node, rng, max_tries=200):
        f = self.f
        d = node.d
        for attempt in range(max_tries):
            u = self.random_element(rng)
            theta = node.act_matrix(self, u)
            cp = K.charpoly_u8(theta, f.MUL, f.INV)
            factors = fpoly.factor(f, cp, rng.derive(f"f{attempt}"))
            factors.sort(key=lambda t: (fpoly.deg(t[0]), t[0].tobytes()))
            for irr, _mult in factors:
                m_op = _poly_eval_mat(f, irr, theta)
                seeds = _rownull(f, m_op)
                if seeds.shape[0] == 0:
                    raise AssertionError("factor with trivial kernel")
                for c in seeds:
                    srows = self._ideal_rows_mod(node, c)
                    if 0 < srows.nrows < d:
                        return node.split(self, srows)
                dual_seeds = _rownull(f, np.ascontiguousarray(m_op.T))
                dmat = self._dual_spin_matrix(node, dual_seeds[0])
                fm = FieldMatrix(f, dmat)
                if fm.rank() < d:
                    perp = fm.nullspace_basis()
                    srows = EchelonBasis(f, self.m)
                    for crow in perp.data:
                        amb = node.elem(self, crow).reshape(1, -1).copy()
                        K.reduce_vs_rref_u8(amb, node.sub.rows,
                                            np.array(node.sub.pivots, dtype=np.int64),
                                            f.MUL) if node.sub.nrows else None
                        srows.insert(amb[0])
                    if not (0 < srows.nrows < d):
                        raise AssertionError("dual perp not proper")
                    return node.split(self, srows)
                if seeds.shape[0] == fpoly.deg(irr):
                    return None
        raise RuntimeError("algebra chop stalled")

    def _ideal_rows_mod(self, node, coords):
        """(E v + sub)/sub as reduced rows, v given by quotient coords."""
        v = node.elem(self, coords)
        rows = self.rmat(v).copy()
        if node.sub.nrows:
            K.reduce_vs_rref_u8(rows, node.sub.rows,
                                np.array(node.sub.pivots, dtype=np.int64),
                                self.f.MUL)
        out = EchelonBasis(self.f, self.m)
        for r in rows:
            out.insert(r)
        return out

    def _dual_spin_matrix(self, node, w):
        """Matrix whose rank is the dim of the dual spin of the functional w."""
        f = self.f
        stacked = np.concatenate([node.q.rows, node.sub.rows], axis=0)
        rhs = np.concatenate([w, np.zeros(node.sub.nrows, dtype=np.uint8)])
        y = FieldMatrix(f, stacked).solve(
            FieldMatrix(f, rhs.reshape(-1, 1)))
        if y is None:
            raise AssertionError("functional lift failed")
        yv = y.data[:, 0]
        t = np.zeros((self.m, self.m), dtype=np.uint8)
        for k in range(self.m):
            if yv[k]:
                t ^= f.MUL[yv[k]][self.C[:, :, k]]
        return _mm(f, t, np.ascontiguousarray(node.q.rows.T))

    # -- simples, radical, idempotents ---------------------------------------

    def structure(self, rng: Rng):
        if not hasattr(self, "_structure"):
            self._structure = _AlgebraStructure(self, rng)
        return self._structure

    def complete_primitive_idempotents(self, rng: Rng):
        return self.structure(rng).primitive_idempotents()

    def is_local(self, rng: Rng):
        st = self.structure(rng)
        return len(st.blocks) == 1 and st.blocks[0]["n"] == 1

    def radical_dim(self, rng: Rng):
        return self.structure(rng).jdim


class _Node:
    """Subquotient sup/sub of the left regular module, both left ideals."""

    def __init__(self, alg, sub: EchelonBasis, q: EchelonBasis):
        self.sub = sub
        self.q = q  # RREF rows spanning a complement of sub inside sup
        self.d = q.nrows

    def elem(self, alg, coords):
        return _mm(alg.f, np.asarray(coords, dtype=np.uint8).reshape(1, -1),
                   self.q.rows)[0]

    def coords(self, alg, vec):
        work = np.asarray(vec, dtype=np.uint8).reshape(1, -1).copy()
        if self.sub.nrows:
            K.reduce_vs_rref_u8(work, self.sub.rows,
                                np.array(self.sub.pivots, dtype=np.int64), alg.f.MUL)
        coeffs = K.reduce_vs_rref_u8(work, self.q.rows,
                                     np.array(self.q.pivots, dtype=np.int64),
                                     alg.f.MUL)
        if np.any(work):
            raise AssertionError("vector escapes the subquotient")
        return coeffs[0]

    def act_matrix(self, alg, u):
        imgs = alg.act_left_rows(self.q.rows, u).copy()
        if self.sub.nrows:
            K.reduce_vs_rref_u8(imgs, self.sub.rows,
                                np.array(self.sub.pivots, dtype=np.int64), alg.f.MUL)
        coeffs = K.reduce_vs_rref_u8(imgs, self.q.rows,
                                     np.array(self.q.pivots, dtype=np.int64),
                                     alg.f.MUL)
        if np.any(imgs):
            raise AssertionError("action does not preserve the subquotient")
        return np.ascontiguousarray(coeffs)

    def basis_action(self, alg, t):
        """Action matrix of basis element t (C[t] is its row-action matrix)."""
        imgs = _mm(alg.f, self.q.rows, alg.C[t]).copy()
        if self.sub.nrows:
            K.reduce_vs_rref_u8(imgs, self.sub.rows,
                                np.array(self.sub.pivots, dtype=np.int64), alg.f.MUL)
        coeffs = K.reduce_vs_rref_u8(imgs, self.q.rows,
                                     np.array(self.q.pivots, dtype=np.int64),
                                     alg.f.MUL)
        if np.any(imgs):
            raise AssertionError("action does not preserve the subquotient")
        return np.ascontiguousarray(coeffs)

    def split(self, alg, srows: EchelonBasis):
        """Child nodes for the submodule spanned by srows (mod sub)."""
        new_sub = EchelonBasis(alg.f, alg.m)
        for r in self.sub.rows:
            new_sub.insert(r)
        for r in srows.rows:
            new_sub.insert(r)
        # sub-node: new_sub / sub, quotient rows = srows
        subnode = _Node(alg, self.sub, srows)
        # quot-node: sup / new_sub: reduce current q rows mod new_sub
        qrows = EchelonBasis(alg.f, alg.m)
        work = self.q.rows.copy()
        K.reduce_vs_rref_u8(work, new_sub.rows,
                            np.array(new_sub.pivots, dtype=np.int64), alg.f.MUL)
        for r in work:
            qrows.insert(r)
        quotnode = _Node(alg, new_sub, qrows)
        if subnode.d + quotnode.d != self.d:
            raise AssertionError("split dimensions do not add up")
        return [subnode, quotnode]


class _AlgebraStructure:
    """Simples, radical, Wedderburn data, and lifted idempotents."""

    def __init__(self, alg: SCAlgebra, rng: Rng):
        self.alg = alg
        self.rng = rng.derive("algstruct")
        f = alg.f
        leaves = alg.chop_regular(self.rng)
        # group by cheap invariants, then deduplicate with exact intertwiner
        # tests (any nonzero hom between simples is an isomorphism)
        probes = [alg.random_element(self.rng) for _ in range(3)]
        groups: dict = {}
        for node in leaves:
            key = (node.d,) + tuple(
                K.charpoly_u8(node.act_matrix(alg, u), f.MUL, f.INV).tobytes()
                for u in probes
            )
            groups.setdefault(key, []).append(node)
        reps = []
        for key in sorted(groups, key=lambda k: (k[0], k[1:])):
            nodes = groups[key]
            acts0 = [nodes[0].basis_action(alg, t) for t in range(alg.m)]
            found = [(nodes[0], acts0)]
            for node in nodes[1:]:
                acts = [node.basis_action(alg, t) for t in range(alg.m)]
                if not any(_simple_iso(f, a[1], acts) for a in found):
                    found.append((node, acts))
            reps.extend(found)
        reps.sort(key=lambda na: (na[0].d, tuple(na[0].q.pivots)))
        # action of every basis element on every representative simple
        self.blocks = []
        phi_cols = []
        for node, acts in reps:
            self.blocks.append({"node": node, "acts": acts, "d": node.d})
            phi_cols.append(np.stack([a.reshape(-1) for a in acts]))
        phi = np.concatenate(phi_cols, axis=1) if phi_cols else np.zeros((alg.m, 0), np.uint8)
        self.phi = phi
        jb = _rownull(f, phi)
        self.jrows = EchelonBasis(f, alg.m)
        for r in jb:
            self.jrows.insert(r)
        self.jdim = self.jrows.nrows
        self._verify_radical()
        for blk in self.blocks:
            self._block_structure(blk)
        total = sum(b["d"] * b["d"] // b["deg"] for b in self.blocks)
        if total != alg.m - self.jdim:
            raise AssertionError(
                "Wedderburn dimension check failed; simples misidentified")
        self._idempotents = None

    def _verify_radical(self):
        """The annihilator of the found simples must be nilpotent."""
        alg, f = self.alg, self.alg.f
        power = self.jrows
        for _ in range(self.alg.m + 1):
            if power.nrows == 0:
                return
            nxt = EchelonBasis(f, alg.m)
            for x in power.rows:
                rows = _mm(f, self.jrows.rows, np.ascontiguousarray(alg.lmat(x).T))
                for r in rows:
                    if nxt.insert(r) and nxt.nrows == power.nrows:
                        pass
            if nxt.nrows >= power.nrows:
                raise AssertionError("annihilator is not nilpotent; "
                                     "a simple module was missed")
            power = nxt
        raise AssertionError("nilpotency check did not terminate")

    def _block_structure(self, blk):
        """Endomorphism field and a complete set of F-line projections."""
        alg, f = self.alg, self.alg.f
        d = blk["d"]
        acts = blk["acts"]
        # commutant of the action algebra = End(S), a finite field
        gens = []
        for u in (alg.one,) + tuple(alg.random_element(self.rng) for _ in range(2)):
            gens.append(blk["node"].act_matrix(alg, u))
        while True:
            comm = _commutant(f, gens, d)
            bad = None
            for a in acts:
                for cmat in comm:
                    lhs = _mm(f, a, cmat)
                    rhs = _mm(f, cmat, a)
                    if not np.array_equal(lhs, rhs):
                        bad = a
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            gens.append(bad)
        deg = len(comm)
        if d % deg != 0:
            raise AssertionError("endomorphism degree does not divide dim")
        blk["deg"] = deg
        blk["n"] = d // deg
        # F-basis vectors of the simple: greedy
        span = EchelonBasis(f, d)
        vecs = []
        for i in range(d):
            v = np.zeros(d, dtype=np.uint8)
            v[i] = 1
            if span.contains(v):
                continue
            vecs.append(v)
            for cmat in comm:
                span.insert(_mm(f, v.reshape(1, -1), cmat)[0])
            if span.nrows == d:
                break
        if len(vecs) != blk["n"]:
            raise AssertionError("F-basis extraction failed")
        bmat = np.concatenate(
            [_mm(f, v.reshape(1, -1), cmat) for v in vecs for cmat in comm], axis=0
        )
        binv = FieldMatrix(f, bmat).inverse().data
        projections = []
        for t in range(blk["n"]):
            dsel = np.zeros((d, d), dtype=np.uint8)
            for a in range(deg):
                dsel[t * deg + a, t * deg + a] = 1
            projections.append(_mm(f, _mm(f, binv, dsel), bmat))
        blk["projections"] = projections

    def primitive_idempotents(self):
        """[(coords, block_index)] complete orthogonal primitive set."""
        if self._idempotents is not None:
            return self._idempotents
        alg, f = self.alg, self.alg.f
        targets = []
        for bi, blk in enumerate(self.blocks):
            for proj in blk["projections"]:
                vec = []
                for bj, blk2 in enumerate(self.blocks):
                    if bj == bi:
                        vec.append(proj.reshape(-1))
                    else:
                        vec.append(np.zeros(blk2["d"] * blk2["d"], dtype=np.uint8))
                targets.append((np.concatenate(vec), bi))
        phi_t = FieldMatrix(f, np.ascontiguousarray(self.phi.T))
        out = []
        acc = np.zeros(alg.m, dtype=np.uint8)  # sum of lifted idempotents
        for tvec, bi in targets:
            sol = phi_t.solve(FieldMatrix(f, tvec.reshape(-1, 1)))
            if sol is None:
                raise AssertionError("Wedderburn solve failed (density violated)")
            x = sol.data[:, 0]
            # move into the corner of what is left, then square to idempotency
            fcorner = alg.one ^ acc
            x = alg.mul(alg.mul(fcorner, x), fcorner)
            x = _lift_idempotent(alg, x)
            for prev, _ in out:
                if np.any(alg.mul(prev, x)) or np.any(alg.mul(x, prev)):
                    raise AssertionError("lifted idempotents not orthogonal")
            out.append((x, bi))
            acc ^= x
        if not np.array_equal(acc, alg.one):
            raise AssertionError("idempotents do not sum to 1; "
                                 "a Wedderburn block was missed")
        self._idempotents = out
        return out


def _simple_iso(f, acts_a, acts_b):
    """Nonzero intertwiner between two simple modules given by basis actions."""
    da = acts_a[0].shape[0]
    db = acts_b[0].shape[0]
    if da != db:
        return False
    eye_a = FieldMatrix.identity(f, da)
    eye_b = FieldMatrix.identity(f, db)
    blocks = []
    for a, b in zip(acts_a, acts_b):
        fa = FieldMatrix(f, a)
        fbt = FieldMatrix(f, np.ascontiguousarray(b.T))
        blocks.append((fa.kronecker(eye_b) + eye_a.kronecker(fbt)).data)
    ns = FieldMatrix(f, np.concatenate(blocks, axis=0)).nullspace_basis()
    return ns.rows > 0


def _commutant(f, mats, d):
    """Basis of matrices commuting with all of ``mats`` (d x d)."""
    blocks = []
    eye = FieldMatrix.identity(f, d)
    for a in mats:
        fa = FieldMatrix(f, a)
        fat = FieldMatrix(f, np.ascontiguousarray(a.T))
        blocks.append((fa.kronecker(eye) + eye.kronecker(fat)).data)
    ns = FieldMatrix(f, np.concatenate(blocks, axis=0)).nullspace_basis()
    return [ns.data[i].reshape(d, d).copy() for i in range(ns.rows)]


def _lift_idempotent(alg, x):
    """Square x until idempotent; valid since x^2 = x modulo a nilpotent."""
    for _ in range(2 * alg.m.bit_length() + 6):
        sq = alg.mul(x, x)
        if np.array_equal(sq, x):
            return x
        x = sq
    raise AssertionError("idempotent lifting did not stabilize")
