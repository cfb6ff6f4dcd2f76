"""Scott modules and bimodules, vertices, Brauer indecomposability, and the
progenerator-based Morita verification, including quotient lifting.

The Morita criterion: a (B0(kG), B0(kH))-bimodule M induces a Morita
equivalence iff M is projective and a generator on each side and
dim End over one side equals the dimension of the other side's block
(then the natural map from the opposite block into the endomorphism ring
is an injection between equal dimensions, hence an isomorphism).
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field as dfield

import numpy as np

from .algebra import SCAlgebra, _commutant
from .blocks import (
    BlockData,
    CenterData,
    all_simples,
    block_dimension,
    block_idempotents,
    idempotent_operator,
    simple_block_scalar,
)
from .ffield import GF, FieldMatrix, FieldSpec
from .groups import FiniteGroup, QuotientMap, Subgroup, central_quotient, direct_product, sylow2
from .hecke import scott_summand
from .isotype import diagonal_subgroup, find_isomorphism
from .modrep import (
    EchelonBasis,
    GModule,
    brauer_quotient,
    chop,
    fixed_points,
    hom_space_dim,
    is_isomorphic,
    permutation_module,
    push_to_quotient,
    restrict,
    spin,
    sub_quot_actions,
    tensor,
    _mm,
)
from .rng import Rng


def _progress(msg):
    print(f"[scott] {msg}", file=sys.stderr, flush=True)


# ---------------------------------------------------------------------------
# Scott modules
# ---------------------------------------------------------------------------

def scott_module(g: FiniteGroup, h: Subgroup, fld: FieldSpec, rng: Rng):
    """Sc(G, H): the summand of k[G/H] with the trivial module in its top."""
    pm = permutation_module(g, h, fld)
    sc, cert = scott_summand(pm, rng)
    return sc


def scott_equals_sylow_scott(g: FiniteGroup, h: Subgroup, fld, rng) -> bool:
    sc_h = scott_module(g, h, fld, rng)
    hg = h.as_group()[0]
    syl_inside = sylow2(hg, rng)
    syl_parent = Subgroup(
        g, [int(h.as_group()[1][x]) for x in syl_inside.gens], name="Syl2(H)"
    )
    sc_q = scott_module(g, syl_parent, fld, rng)
    return is_isomorphic(sc_h, sc_q, rng)


def all_subgroups(sub: Subgroup):
    """Every subgroup of a small subgroup, as subgroups of the parent."""
    sq, to_parent, _ = sub.as_group()
    if sq.order > 64:
        raise ValueError("subgroup lattice enumeration capped at order 64")
    seen = {frozenset([0])}
    out = [frozenset([0])]
    frontier = [frozenset([0])]
    while frontier:
        nxt = []
        for members in frontier:
            for x in range(1, sq.order):
                if x in members:
                    continue
                closure = frozenset(
                    int(v) for v in sq.subgroup_closure(
                        [g for g in members if g != 0] + [x])
                )
                if closure not in seen:
                    seen.add(closure)
                    out.append(closure)
                    nxt.append(closure)
        frontier = nxt
    from .groups import _subgroup_gens
    subs = []
    for members in sorted(out, key=lambda s: (len(s), sorted(s))):
        pmembers = sorted(int(to_parent[x]) for x in members)
        subs.append(Subgroup(sub.parent, _subgroup_gens(sub.parent, pmembers),
                             members=np.array(pmembers, dtype=np.int64),
                             name=f"{sub.name}sub{len(members)}"))
    return subs


def conjugate_in(group: FiniteGroup, a: Subgroup, b: Subgroup):
    """An element conjugating subgroup a onto b, or None (full scan)."""
    if a.order != b.order:
        return None
    bset = b.member_set
    for t in range(group.order):
        ti = group.inv(t)
        if all(group.mul(group.mul(ti, s), t) in bset for s in a.gens):
            return t
    return None


def subgroups_up_to_conjugacy(p: Subgroup, group: FiniteGroup):
    subs = all_subgroups(p)
    reps: list[Subgroup] = []
    for s in subs:
        if not any(r.order == s.order and conjugate_in(group, s, r) is not None
                   for r in reps):
            reps.append(s)
    return reps


def vertex_by_brauer(v: GModule, p: Subgroup, rng: Rng) -> Subgroup:
    """A maximal subgroup of p (up to conjugacy) with nonzero Brauer quotient."""
    reps = subgroups_up_to_conjugacy(p, v.group)
    nonzero = []
    for q in reps:
        if q.order == 1:
            if v.dim:
                nonzero.append(q)
            continue
        bq = brauer_quotient(v, q)
        if bq.dim:
            nonzero.append(q)
    if not nonzero:
        raise AssertionError("no subgroup with nonzero Brauer quotient")
    best = max(s.order for s in nonzero)
    tops = [s for s in nonzero if s.order == best]
    for other in tops[1:]:
        if conjugate_in(v.group, tops[0], other) is None:
            raise AssertionError("two non-conjugate maximal vertices")
    return tops[0]


# ---------------------------------------------------------------------------
# Scott bimodules and the Morita check
# ---------------------------------------------------------------------------

@dataclass
class BimoduleContext:
    left: FiniteGroup
    right: FiniteGroup
    product: FiniteGroup
    sylow_left: Subgroup
    sylow_right: Subgroup
    diagonal: Subgroup
    module: GModule
    phi: dict


def scott_bimodule(g: FiniteGroup, h: FiniteGroup, fld: FieldSpec, rng: Rng,
                   phi=None, progress=False) -> BimoduleContext:
    """Sc(G x H, Delta P) with its bimodule bookkeeping."""
    prod = direct_product(g, h)
    pg = sylow2(g, rng)
    ph = sylow2(h, rng)
    sg = pg.as_group()[0]
    sh = ph.as_group()[0]
    if phi is None:
        phi = find_isomorphism(sg, sh)
        if phi is None:
            raise ValueError("Sylow subgroups are not isomorphic")
    dp = diagonal_subgroup(prod, pg, ph, phi=phi)
    if progress:
        _progress(f"coset module on {prod.order // dp.order} points")
    pm = permutation_module(prod, dp, fld)
    sc, cert = scott_summand(pm, rng, progress=progress)
    return BimoduleContext(g, h, prod, pg, ph, dp, sc, phi)


def side_restrictions(ctx: BimoduleContext):
    """The bimodule as a module over each factor separately."""
    m = ctx.module
    prod = ctx.product
    g, h = ctx.left, ctx.right
    left_mats = [m.element_matrix(prod.pair_index(a, 0)) for a in g.gens]
    right_mats = [m.element_matrix(prod.pair_index(0, b)) for b in h.gens]
    mg = GModule(g, m.field, left_mats, name=f"{m.name}|left")
    mh = GModule(h, m.field, right_mats, name=f"{m.name}|right")
    return mg, mh


def is_projective_over(side: GModule, rng: Rng) -> bool:
    """Rank test: W is projective iff the Sylow-sum operator has rank
    dim(W)/|P| (counting free summands of the restriction to kP)."""
    p = sylow2(side.group, rng)
    f = side.field
    acc = np.zeros((side.dim, side.dim), dtype=np.uint8)
    for u in p.members:
        acc ^= side.element_matrix(int(u))
    if side.dim % p.order:
        return False
    rank = FieldMatrix(f, acc).rank()
    return rank * p.order == side.dim


@dataclass
class SideAnalysis:
    projective: bool
    generator: bool
    pim_multiplicities: list
    factor_counts: list
    dim_end: int
    simple_dims: list


def analyze_side(side: GModule, bd: BlockData, simples, rng: Rng) -> SideAnalysis:
    """Projectivity, generator condition and End-dimension bookkeeping.

    For projective W = sum P_i^(a_i): a_i = dim Hom(W, S_i) and
    dim End(W) = sum_i a_i [W : S_i].
    """
    proj = is_projective_over(side, rng)
    b0_simples = [s for s in simples if simple_block_scalar(s, bd) == 1]
    a = [hom_space_dim(side, s) for s in b0_simples]
    res = chop(side, rng, ensure_split=False)
    counts = [0] * len(b0_simples)
    for s, mult in res.as_pairs():
        placed = False
        for i, t in enumerate(b0_simples):
            if t.dim == s.dim and hom_space_dim(s, t) > 0:
                counts[i] += mult
                placed = True
                break
        if not placed:
            raise AssertionError(
                "side restriction has a factor outside the principal block")
    dim_end = sum(ai * mi for ai, mi in zip(a, counts))
    generator = all(ai > 0 for ai in a)
    return SideAnalysis(proj, generator, a, counts, dim_end,
                        [s.dim for s in b0_simples])


@dataclass
class MoritaReport:
    left_projective: bool
    right_projective: bool
    left_generator: bool
    right_generator: bool
    dim_end_left: int
    dim_principal_block_right: int
    dim_end_right: int
    dim_principal_block_left: int
    verdict: bool
    evidence: dict = dfield(default_factory=dict)

    def as_dict(self):
        d = dict(self.__dict__)
        d["evidence"] = dict(self.evidence)
        return d


def is_morita_bimodule(ctx: BimoduleContext, rng: Rng, progress=False) -> MoritaReport:
    m = ctx.module
    fld = m.field
    # blocks of both sides over stable fields, then a common field
    bd_l = block_idempotents(ctx.left, fld, rng)
    bd_r = block_idempotents(ctx.right, fld, rng)
    e_star = max(fld.e, bd_l.field.e, bd_r.field.e)
    fld_l, simples_l = all_simples(ctx.left, GF(e_star), rng)
    e_star = max(e_star, fld_l.e)
    fld_r, simples_r = all_simples(ctx.right, GF(e_star), rng)
    e_star = max(e_star, fld_r.e)
    common = GF(e_star)
    if progress:
        _progress(f"working field GF(2^{e_star})")
    if bd_l.field.e != e_star:
        bd_l = block_idempotents(ctx.left, common, rng)
    if bd_r.field.e != e_star:
        bd_r = block_idempotents(ctx.right, common, rng)
    simples_l = [s.over_field(common) if s.field.e != e_star else s
                 for s in simples_l]
    simples_r = [s.over_field(common) if s.field.e != e_star else s
                 for s in simples_r]
    ctx2 = ctx
    if m.field.e != e_star:
        m2 = m.over_field(common)
        ctx2 = BimoduleContext(ctx.left, ctx.right, ctx.product, ctx.sylow_left,
                               ctx.sylow_right, ctx.diagonal, m2, ctx.phi)
    mg, mh = side_restrictions(ctx2)
    # the bimodule must live in B0 x B0: both principal idempotents act as 1
    for side, bd in ((mg, bd_l), (mh, bd_r)):
        op = idempotent_operator(side, bd, bd.principal)
        if not np.array_equal(op, np.eye(side.dim, dtype=np.uint8)):
            raise AssertionError("Scott bimodule is not a B0-x-B0 bimodule")
    if progress:
        _progress("analyzing left side")
    left = analyze_side(mg, bd_l, simples_l, rng)
    if progress:
        _progress("analyzing right side")
    right = analyze_side(mh, bd_r, simples_r, rng)
    dim_b0_left = block_dimension(bd_l)
    dim_b0_right = block_dimension(bd_r)
    verdict = (left.projective and right.projective
               and left.generator and right.generator
               and left.dim_end == dim_b0_right
               and right.dim_end == dim_b0_left)
    return MoritaReport(
        left_projective=left.projective,
        right_projective=right.projective,
        left_generator=left.generator,
        right_generator=right.generator,
        dim_end_left=left.dim_end,
        dim_principal_block_right=dim_b0_right,
        dim_end_right=right.dim_end,
        dim_principal_block_left=dim_b0_left,
        verdict=verdict,
        evidence={
            "dim_bimodule": m.dim,
            "field_e": e_star,
            "left_pim_multiplicities": left.pim_multiplicities,
            "left_factor_counts": left.factor_counts,
            "left_simple_dims": left.simple_dims,
            "right_pim_multiplicities": right.pim_multiplicities,
            "right_factor_counts": right.factor_counts,
            "right_simple_dims": right.simple_dims,
        },
    )


def verify_morita(g_name_or_group, h, fld, rng, progress=False):
    ctx = scott_bimodule(g_name_or_group, h, fld, rng, progress=progress)
    report = is_morita_bimodule(ctx, rng, progress=progress)
    return ctx, report


# ---------------------------------------------------------------------------
# tensor oracle
# ---------------------------------------------------------------------------

def dual_bimodule(ctx: BimoduleContext, rng: Rng) -> BimoduleContext:
    """The dual of M as an (H, G)-bimodule over H x G."""
    m = ctx.module
    prod_rev = direct_product(ctx.right, ctx.left)
    mats = []
    for b in ctx.right.gens:
        mats.append(m.element_matrix(ctx.product.pair_index(0, b)))
    for a in ctx.left.gens:
        mats.append(m.element_matrix(ctx.product.pair_index(a, 0)))
    inv_t = [np.ascontiguousarray(FieldMatrix(m.field, x).inverse().data.T)
             for x in mats]
    mod = GModule(prod_rev, m.field, inv_t, name=f"{m.name}^op")
    return BimoduleContext(ctx.right, ctx.left, prod_rev, ctx.sylow_right,
                           ctx.sylow_left, None, mod, None)


def tensor_over_middle(m_ctx: BimoduleContext, n_ctx: BimoduleContext,
                       rng: Rng) -> GModule:
    """M tensor_{kH} N as a module over left(M) x right(N)."""
    m, n = m_ctx.module, n_ctx.module
    if m.dim * n.dim > 6000:
        raise ValueError("tensor oracle cap exceeded")
    if m_ctx.right is not n_ctx.left:
        raise ValueError("middle groups do not match")
    f = m.field
    h = m_ctx.right
    eye_m = FieldMatrix.identity(f, m.dim)
    eye_n = FieldMatrix.identity(f, n.dim)
    # balanced-product relations (m.b) x n = m x (b.n); the left action of
    # b on N is the right action of the inverse in the encoding, and the
    # generator images already span the full relation space
    basis = EchelonBasis(f, m.dim * n.dim)
    for b in h.gens:
        a_mat = FieldMatrix(f, m.element_matrix(m_ctx.product.pair_index(0, b)))
        b_mat = FieldMatrix(
            f, n.element_matrix(n_ctx.product.pair_index(h.inv(b), 0)))
        diff = a_mat.kronecker(eye_n) + eye_m.kronecker(b_mat)
        for row in diff.data:
            basis.insert(row)
    prod_out = direct_product(m_ctx.left, n_ctx.right)
    out_mats = []
    for a in m_ctx.left.gens:
        am = FieldMatrix(f, m.element_matrix(m_ctx.product.pair_index(a, 0)))
        out_mats.append(am.kronecker(eye_n).data)
    for c in n_ctx.right.gens:
        cm = FieldMatrix(f, n.element_matrix(n_ctx.product.pair_index(0, c)))
        out_mats.append(eye_m.kronecker(cm).data)
    _, quot = sub_quot_actions(f, basis, out_mats)
    return GModule(prod_out, f, quot, name=f"{m.name}(x)H{n.name}")


def regular_bimodule_b0(g: FiniteGroup, fld: FieldSpec, rng: Rng) -> GModule:
    """B0(kG) as a right k(G x G)-module via m.(a, b) = a^-1 m b."""
    prod = direct_product(g, g)
    dg = Subgroup(prod, [prod.pair_index(a, a) for a in g.gens], name="DG")
    pm = permutation_module(prod, dg, fld)
    bd = block_idempotents(g, fld, rng)
    if bd.field.e != fld.e:
        pm = pm.over_field(bd.field)
    # cut the principal block: left multiplication action of e0 on k[GxG/DG]
    mg = GModule(g, pm.field,
                 [pm.element_matrix(prod.pair_index(a, 0)) for a in g.gens],
                 name="kG|left")
    from .blocks import idempotent_operator as idop
    op = idop(mg, bd, bd.principal)
    from . import _kernels as K
    red, rank, piv = K.rref_u8(op, pm.field.MUL, pm.field.INV)
    basis = np.ascontiguousarray(red[:rank])
    piv = np.array(piv, dtype=np.int64)
    gen_mats = []
    for mgenmat in pm.gen_mats:
        img = _mm(pm.field, basis, mgenmat)
        work = img.copy()
        coeffs = K.reduce_vs_rref_u8(work, basis, piv, pm.field.MUL)
        if np.any(work):
            raise AssertionError("block cut is not invariant")
        gen_mats.append(np.ascontiguousarray(coeffs))
    return GModule(prod, pm.field, gen_mats, name=f"B0(k{g.name})-bimod")


# ---------------------------------------------------------------------------
# Brauer indecomposability
# ---------------------------------------------------------------------------

def is_indecomposable(v: GModule, rng: Rng) -> bool:
    if v.dim == 0:
        raise ValueError("zero module")
    if v.dim == 1:
        return True
    comm = _commutant(v.field, v.gen_mats, v.dim)
    alg = SCAlgebra.from_matrices(v.field, comm, name=f"End({v.name})")
    return alg.is_local(rng.derive(f"indec:{v.name}:{v.dim}"))


def brauer_indecomposable(ctx: BimoduleContext, rng: Rng, progress=False):
    """Lemma-style check: M(Delta Q) restricted to the centralizer is
    indecomposable or zero for every subgroup Q of the diagonal vertex."""
    m = ctx.module
    prod = ctx.product
    if prod.order > 10_000:
        raise ValueError("Brauer indecomposability capped at |G x H| <= 10^4")
    reps = subgroups_up_to_conjugacy(ctx.diagonal, prod)
    evidence = []
    for q in reps:
        if q.order == 1:
            cert = getattr(m, "scott_certificate", None)
            ok = cert.indecomposable if cert is not None else is_indecomposable(m, rng)
            evidence.append(("1", m.dim, bool(ok)))
            if not ok:
                return False, evidence
            continue
        bq = brauer_quotient(m, q)
        if bq.dim == 0:
            evidence.append((q.name, 0, True))
            continue
        cz = prod.centralizer(q)
        ng = bq.normalizer
        ngroup, _, from_parent = ng.as_group()
        cz_in_n = Subgroup(ngroup, [from_parent[int(x)] for x in cz.gens],
                           name="C")
        rest = restrict(bq, cz_in_n)
        ok = is_indecomposable(rest, rng)
        evidence.append((q.name, bq.dim, bool(ok)))
        if not ok:
            return False, evidence
    return True, evidence


# ---------------------------------------------------------------------------
# quotient lifting
# ---------------------------------------------------------------------------

def scott_quotient_push(g: FiniteGroup, q: Subgroup, z: Subgroup,
                        fld: FieldSpec, rng: Rng) -> bool:
    """Sc(G,Q) pushed along G -> G/Z equals Sc(G/Z, Q/Z)."""
    sc = scott_module(g, q, fld, rng)
    qm = central_quotient(g, z)
    pushed = push_to_quotient(sc, qm)
    qbar = Subgroup(qm.target, [qm(x) for x in q.gens], name=f"{q.name}bar")
    sc_bar = scott_module(qm.target, qbar, fld, rng)
    return is_isomorphic(pushed, sc_bar, rng)


def induced_quotient_phi(ctx: BimoduleContext, qm_g: QuotientMap, qm_h: QuotientMap):
    """Identification of the quotient Sylow subgroups induced by ctx.phi."""
    pg_bar = Subgroup(qm_g.target, [qm_g(x) for x in ctx.sylow_left.gens],
                      name="Pbar")
    ph_bar = Subgroup(qm_h.target, [qm_h(x) for x in ctx.sylow_right.gens],
                      name="Qbar")
    sgb, tgb, fgb = pg_bar.as_group()
    shb, thb, fhb = ph_bar.as_group()
    sg, tg, _ = ctx.sylow_left.as_group()
    sh, th, _ = ctx.sylow_right.as_group()
    phi_bar = {}
    for x in range(sgb.order):
        # lift to the cover's Sylow, map by phi, project down
        parent_idx = int(tgb[x])
        lift = None
        for y in range(sg.order):
            if qm_g(int(tg[y])) == parent_idx:
                lift = y
                break
        if lift is None:
            raise AssertionError("Sylow lift failed")
        image_parent = int(th[ctx.phi[lift]])
        phi_bar[x] = fhb[qm_h(image_parent)]
    # well-definedness and homomorphism checks
    for x in range(sgb.order):
        for ygen in sgb.gens:
            lhs = phi_bar[sgb.mul(x, ygen)]
            rhs = shb.mul(phi_bar[x], phi_bar[ygen])
            if lhs != rhs:
                raise AssertionError("induced identification is not a morphism")
    if len(set(phi_bar.values())) != sgb.order:
        raise AssertionError("induced identification is not bijective")
    return pg_bar, ph_bar, phi_bar


def verify_lifting_consistency(g: FiniteGroup, h: FiniteGroup,
                               zg: Subgroup, zh: Subgroup,
                               fld: FieldSpec, rng: Rng, progress=False):
    """Morita verdicts upstairs and at the central quotients; must agree."""
    ctx = scott_bimodule(g, h, fld, rng, progress=progress)
    top = is_morita_bimodule(ctx, rng, progress=progress)
    qm_g = central_quotient(g, zg)
    qm_h = central_quotient(h, zh)
    pg_bar, ph_bar, phi_bar = induced_quotient_phi(ctx, qm_g, qm_h)
    prod_bar = direct_product(qm_g.target, qm_h.target)
    dp_bar = diagonal_subgroup(prod_bar, pg_bar, ph_bar, phi=phi_bar)
    pm = permutation_module(prod_bar, dp_bar, fld)
    sc_bar, _ = scott_summand(pm, rng, progress=progress)
    ctx_bar = BimoduleContext(qm_g.target, qm_h.target, prod_bar, pg_bar,
                              ph_bar, dp_bar, sc_bar, phi_bar)
    bottom = is_morita_bimodule(ctx_bar, rng, progress=progress)
    return top, bottom
