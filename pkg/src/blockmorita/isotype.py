"""Isomorphism-type identification for small 2-groups, plus a generic
generator-image isomorphism search used as the tie-breaker and validator."""

from __future__ import annotations

from collections import Counter

import numpy as np

from .catalog import (
    cyclic_group,
    dihedral_group,
    mod_max_cyclic_group,
    quaternion_group,
    semidihedral_group,
    twisted_c2_extension_group,
)
from .groups import FiniteGroup, direct_product


def order_histogram(g: FiniteGroup):
    return Counter(g.element_orders())


def minimal_gens(g: FiniteGroup):
    """Greedy small generating set, deterministic."""
    candidates = sorted(range(g.order), key=lambda i: (-g.order_of(i), i))
    gens: list = []
    have = {0}
    for x in candidates:
        if x in have:
            continue
        gens.append(x)
        have = set(int(v) for v in g.subgroup_closure(gens))
        if len(have) == g.order:
            return gens
    return gens


def find_isomorphism(a: FiniteGroup, b: FiniteGroup, node_cap=2_000_000):
    """A dict a-index -> b-index realizing an isomorphism, or None."""
    if a.order != b.order:
        return None
    if order_histogram(a) != order_histogram(b):
        return None
    gens = minimal_gens(a)
    border = {}
    for y in range(b.order):
        border.setdefault(b.order_of(y), []).append(y)
    nodes = [0]

    def build(images):
        # close the partial map on the subgroup generated by mapped gens
        amap = {0: 0}
        frontier = [0]
        used = {0}
        while frontier:
            nxt = []
            for x in frontier:
                fx = amap[x]
                for ga, gb in images:
                    y = a.mul(x, ga)
                    fy = b.mul(fx, gb)
                    if y in amap:
                        if amap[y] != fy:
                            return None
                    else:
                        if fy in used:
                            return None
                        amap[y] = fy
                        used.add(fy)
                        nxt.append(y)
            frontier = nxt
        return amap

    def rec(k, images):
        nodes[0] += 1
        if nodes[0] > node_cap:
            raise RuntimeError("isomorphism search node cap exceeded")
        amap = build(images)
        if amap is None:
            return None
        if k == len(gens):
            return amap if len(amap) == a.order else None
        if len(amap) == a.order:
            return amap
        for y in border.get(a.order_of(gens[k]), []):
            res = rec(k + 1, images + [(gens[k], y)])
            if res is not None:
                return res
        return None

    return rec(0, [])


def is_isomorphic_groups(a, b):
    return find_isomorphism(a, b) is not None


def _abelian_2group_type(g: FiniteGroup) -> str:
    """Partition of an abelian 2-group from its order statistics."""
    hist = order_histogram(g)
    n = g.order
    # m_k = log2 #{x : x^(2^k) = 1} = sum_i min(lambda_i, k)
    ms = [0]
    k = 1
    while 2 ** ms[-1] < n:
        count = sum(c for o, c in hist.items() if o <= 2 ** k)
        ms.append(count.bit_length() - 1)
        k += 1
    parts = []
    for k in range(1, len(ms)):
        parts.append(ms[k] - ms[k - 1])  # number of lambda_i >= k
    lam = []
    for k, cnt in enumerate(parts, start=1):
        nxt = parts[k] if k < len(parts) else 0
        lam.extend([k] * (cnt - nxt))
    lam.sort(reverse=True)
    return "x".join(f"C{2 ** l}" for l in lam)


_REF_CACHE: dict = {}


def _references(order):
    if order in _REF_CACHE:
        return _REF_CACHE[order]
    refs = []
    if order >= 8:
        refs.append((f"D{order}", dihedral_group(order)))
        refs.append((f"Q{order}", quaternion_group(order)))
    if order >= 16:
        refs.append((f"SD{order}", semidihedral_group(order)))
        refs.append((f"C2xD{order // 2}", direct_product(cyclic_group(2), dihedral_group(order // 2))))
        refs.append((f"C{order // 4}:C4", mod_max_cyclic_group(order)))
        refs.append((f"(C{order // 4}xC2):C2", twisted_c2_extension_group(order)))
    _REF_CACHE[order] = refs
    return refs


def diagonal_subgroup(prod: FiniteGroup, pg, ph, phi=None):
    """Delta(P) = {(u, phi(u))} inside a direct product, for an explicit or
    freshly searched isomorphism phi between the two chosen subgroups."""
    from .groups import Subgroup
    g, h = prod.factors
    sg, tg, _ = pg.as_group()
    sh, th, _ = ph.as_group()
    if phi is None:
        phi = find_isomorphism(sg, sh)
        if phi is None:
            raise ValueError("no isomorphism between the chosen subgroups")
    members = sorted(
        prod.pair_index(int(tg[x]), int(th[phi[x]])) for x in range(sg.order)
    )
    gens = [prod.pair_index(int(tg[x]), int(th[phi[x]])) for x in sg.gens]
    sub = Subgroup(prod, gens, members=np.array(members, dtype=np.int64),
                   name=f"D({pg.name})")
    if sub.order != pg.order:
        raise AssertionError("diagonal subgroup has wrong order")
    return sub


def iso_type_2group(g: FiniteGroup, verify: bool = False) -> str:
    """Canonical name of a 2-group of order <= 64.

    Decides by invariants (order statistics), falling back to brute-force
    isomorphism search against reference presentations on any collision.
    """
    n = g.order
    if n & (n - 1):
        raise ValueError("not a 2-group")
    if n > 64:
        raise ValueError("iso-type identification capped at order 64")
    if g.is_abelian():
        return _abelian_2group_type(g)
    hist = order_histogram(g)
    if hist[2] == 1:
        return f"Q{n}"  # unique involution: generalised quaternion
    matches = [name for name, ref in _references(n) if order_histogram(ref) == hist]
    if len(matches) == 1 and not verify:
        return matches[0]
    for name, ref in _references(n):
        if order_histogram(ref) == hist and is_isomorphic_groups(g, ref):
            return name
    raise ValueError(f"unrecognized 2-group of order {n}")
