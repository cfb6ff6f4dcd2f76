"""Command-line verification harness with JSON reports and a result cache.

Commands: h2, classify-extensions, blocks, scott, verify-morita,
verify-lifting, verify-theorem, run-manifest.  Machine-readable JSON goes
to stdout, progress to stderr.  Exit codes: 0 = success / expectation met,
1 = verdict mismatch against --expect, 2 = size cap exceeded,
3 = structural assertion failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import tempfile
import time

import numpy as np

VERSION = "0.1.0"


def _err(msg):
    print(f"[blockmorita] {msg}", file=sys.stderr, flush=True)


# ---------------------------------------------------------------------------
# cache
# ---------------------------------------------------------------------------

class Cache:
    def __init__(self, root=None, enabled=True):
        self.enabled = enabled
        self.root = root or os.environ.get("BLOCKMORITA_CACHE", ".blockmorita-cache")

    def key(self, payload: dict) -> str:
        blob = json.dumps(payload, sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:24]

    def path(self, key):
        return os.path.join(self.root, f"{key}.json")

    def load(self, key):
        if not self.enabled:
            return None
        p = self.path(key)
        if not os.path.exists(p):
            return None
        try:
            with open(p) as fh:
                data = json.load(fh)
            if data.get("cache_key") != key:
                raise ValueError("header hash mismatch")
            return data
        except (ValueError, json.JSONDecodeError) as exc:
            _err(f"discarding corrupt cache entry {key}: {exc}")
            try:
                os.remove(p)
            except OSError:
                pass
            return None

    def store(self, key, data):
        if not self.enabled:
            return
        os.makedirs(self.root, exist_ok=True)
        data = dict(data)
        data["cache_key"] = key
        fd, tmp = tempfile.mkstemp(dir=self.root, suffix=".tmp")
        with os.fdopen(fd, "w") as fh:
            json.dump(data, fh, indent=1)
        os.replace(tmp, self.path(key))


# ---------------------------------------------------------------------------
# subgroup resolution for CLI arguments
# ---------------------------------------------------------------------------

def resolve_subgroup(group, name, rng):
    from .groups import Subgroup, sylow2
    from .isotype import find_isomorphism
    from .catalog import catalog_group
    if name in ("1", "triv"):
        return Subgroup(group, [], name="1")
    if name == "Syl2":
        return sylow2(group, rng)
    if name == "Z":
        return group.center()
    ref = catalog_group(name)
    syl = sylow2(group, rng)
    if syl.order == ref.order:
        sg = syl.as_group()[0]
        if find_isomorphism(sg, ref) is not None:
            return syl
    if group.order > 5000:
        raise ValueError("subgroup search by name capped at |G| <= 5000")
    # search subgroups generated by up to two elements
    seen = set()
    for x in range(group.order):
        for y in range(x + 1):
            sub = Subgroup(group, [x, y] if y else [x], name=name)
            if sub.order != ref.order:
                continue
            key = tuple(int(v) for v in sub.members)
            if key in seen:
                continue
            seen.add(key)
            sg = sub.as_group()[0]
            if find_isomorphism(sg, ref) is not None:
                return sub
    raise ValueError(f"no subgroup of {group.name} isomorphic to {name} found")


# ---------------------------------------------------------------------------
# command implementations
# ---------------------------------------------------------------------------

def _envelope(seed, field_e, t0, payload):
    out = {
        "schema": 1,
        "tool": f"blockmorita {VERSION}",
        "seed": seed,
        "field_e": field_e,
        "wall_seconds": round(time.time() - t0, 3),
    }
    out.update(payload)
    return out


def cmd_h2(args, rng, fld):
    from .catalog import catalog_group
    from .cohom2 import classify_central_extensions, h2_basis
    t0 = time.time()
    g = catalog_group(args.group)
    basis = h2_basis(g)
    payload = {"group": args.group, "rank": basis.rank}
    if args.classify:
        rows = []
        for i, (coords, _, ext, iso) in enumerate(classify_central_extensions(g)):
            rows.append({"index": i, "isoType": iso, "order": ext.group.order})
        payload["classes"] = rows
    return _envelope(args.seed, fld.e, t0, payload), 0


def cmd_classify_extensions(args, rng, fld):
    from .catalog import dihedral_group
    from .cohom2 import classify_central_extensions, h2_basis
    t0 = time.time()
    base = dihedral_group(2 ** (args.n - 1))
    basis = h2_basis(base)
    rows = []
    quaternion = 0
    for i, (coords, _, ext, iso) in enumerate(classify_central_extensions(base)):
        rows.append({
            "index": i,
            "coords": [int(c) for c in coords],
            "isoType": iso,
            "order": ext.group.order,
        })
        if iso == f"Q{2 ** args.n}":
            quaternion += 1
    payload = {
        "base": base.name,
        "rank": basis.rank,
        "classes": rows,
        "quaternionClasses": quaternion,
    }
    code = 0
    if quaternion != 1:
        _err("expected exactly one quaternion class")
        code = 3
    return _envelope(args.seed, fld.e, t0, payload), code


def cmd_blocks(args, rng, fld):
    from .blocks import block_dimension, block_idempotents
    from .catalog import catalog_group
    t0 = time.time()
    g = catalog_group(args.group)
    bd = block_idempotents(g, fld, rng)
    rows = []
    for i in range(len(bd.idempotents)):
        rows.append({
            "index": i,
            "isPrincipal": i == bd.principal_index,
            "regularComponentDim": block_dimension(bd, i),
        })
    payload = {"group": args.group, "field_e": bd.field.e, "blocks": rows}
    return _envelope(args.seed, bd.field.e, t0, payload), 0


def cmd_scott(args, rng, fld):
    from .catalog import catalog_group
    from .scott import scott_module, vertex_by_brauer
    from .groups import sylow2
    t0 = time.time()
    g = catalog_group(args.group)
    h = resolve_subgroup(g, args.subgroup, rng)
    sc = scott_module(g, h, fld, rng)
    payload = {
        "group": args.group,
        "subgroup": args.subgroup,
        "dim": sc.dim,
        "certificate": sc.scott_certificate.as_dict(),
    }
    if args.vertex:
        p = sylow2(g, rng)
        v = vertex_by_brauer(sc, p, rng)
        payload["vertexOrder"] = v.order
    return _envelope(args.seed, fld.e, t0, payload), 0


def _expect_exit(verdict, expect):
    if expect is None:
        return 0
    want = expect == "true"
    return 0 if verdict == want else 1


def cmd_verify_morita(args, rng, fld, cache):
    from .catalog import catalog_group
    from .modrep import is_isomorphic
    from .scott import (
        dual_bimodule,
        regular_bimodule_b0,
        tensor_over_middle,
        verify_morita,
    )
    t0 = time.time()
    ckey = cache.key({
        "kind": "verify-morita", "left": args.left, "right": args.right,
        "field_e": fld.e, "seed": args.seed, "oracle": bool(args.oracle),
        "version": VERSION,
    })
    cached = cache.load(ckey)
    if cached is not None:
        _err(f"cache hit {ckey}")
        cached["wall_seconds"] = round(time.time() - t0, 3)
        return cached, _expect_exit(cached["report"]["verdict"], args.expect)
    g = catalog_group(args.left)
    h = catalog_group(args.right)
    ctx, report = verify_morita(g, h, fld, rng, progress=True)
    payload = {
        "left": args.left,
        "right": args.right,
        "scottDim": ctx.module.dim,
        "report": report.as_dict(),
    }
    if args.oracle:
        if g is not h and args.left != args.right:
            raise ValueError("tensor oracle is wired for the self case")
        dctx = dual_bimodule(ctx, rng)
        prod = tensor_over_middle(ctx, dctx, rng)
        b0 = regular_bimodule_b0(g, ctx.module.field, rng)
        agree = is_isomorphic(prod, b0, rng)
        payload["oracleAgrees"] = bool(agree)
        if bool(agree) != report.verdict:
            _err("oracle disagrees with the progenerator verdict")
            return _envelope(args.seed, fld.e, t0, payload), 3
    out = _envelope(args.seed, fld.e, t0, payload)
    cache.store(ckey, out)
    return out, _expect_exit(report.verdict, args.expect)


def cmd_verify_lifting(args, rng, fld, cache):
    from .catalog import catalog_group
    from .scott import verify_lifting_consistency
    t0 = time.time()
    g = catalog_group(args.left)
    h = catalog_group(args.right)
    zg, zh = g.center(), h.center()
    top, bottom = verify_lifting_consistency(g, h, zg, zh, fld, rng,
                                             progress=True)
    payload = {
        "left": args.left,
        "right": args.right,
        "coverVerdict": top.verdict,
        "quotientVerdict": bottom.verdict,
        "consistent": top.verdict == bottom.verdict,
        "coverReport": top.as_dict(),
        "quotientReport": bottom.as_dict(),
    }
    out = _envelope(args.seed, fld.e, t0, payload)
    if args.expect == "consistent":
        return out, 0 if payload["consistent"] else 1
    if args.expect in ("true", "false"):
        want = args.expect == "true"
        ok = top.verdict == want and bottom.verdict == want and payload["consistent"]
        return out, 0 if ok else 1
    if not payload["consistent"]:
        _err("lifting verdicts differ: counterexample to the equivalence")
        return out, 3
    return out, 0


def _theorem_case(rep_name, n):
    if rep_name.startswith("Q"):
        return "(1)", None
    if rep_name == "2A7":
        return "(2)", None
    if rep_name.startswith("SL2_"):
        q = int(rep_name[4:])
        two_minus = (q - 1) & -(q - 1)
        two_plus = (q + 1) & -(q + 1)
        if two_minus == 2 ** n:
            return "(3)", q
        if two_plus == 2 ** n:
            return "(4)", q
        raise ValueError("representative arithmetic does not match n")
    if rep_name.startswith("2PGL2_"):
        q = int(rep_name[6:])
        two_minus = (q - 1) & -(q - 1)
        two_plus = (q + 1) & -(q + 1)
        if 2 * two_minus == 2 ** n:
            return "(5)", q
        if 2 * two_plus == 2 ** n:
            return "(6)", q
        raise ValueError("representative arithmetic does not match n")
    raise ValueError(f"unknown representative {rep_name}")


def cmd_verify_theorem(args, rng, fld, cache):
    from .catalog import catalog_group
    from .groups import central_quotient, odd_core, sylow2
    from .isotype import iso_type_2group
    from .scott import verify_morita
    t0 = time.time()
    g = catalog_group(args.group)
    oc = odd_core(g)
    if oc.order != 1:
        _err("O_2'(G) is nontrivial; reduction hypothesis fails")
        return _envelope(args.seed, fld.e, t0, {"error": "odd core"}), 3
    z = g.center()
    if z.order != 2:
        _err("center is not of order 2 (Brauer-Suzuki conclusion violated)")
        return _envelope(args.seed, fld.e, t0, {"error": "center"}), 3
    p = sylow2(g, rng)
    ptype = iso_type_2group(p.as_group()[0])
    if not ptype.startswith("Q"):
        _err("Sylow 2-subgroup is not generalised quaternion")
        return _envelope(args.seed, fld.e, t0, {"error": "sylow"}), 3
    n = p.order.bit_length() - 1
    qm = central_quotient(g, z)
    pbar_gens = [qm(x) for x in p.gens]
    from .groups import Subgroup
    pbar = Subgroup(qm.target, pbar_gens, name="Pbar")
    bar_type = iso_type_2group(pbar.as_group()[0])
    expected_bar = "D" + str(2 ** (n - 1)) if n - 1 >= 3 else "C2xC2"
    if bar_type != expected_bar:
        _err(f"P/Z has type {bar_type}, expected dihedral {expected_bar}")
        return _envelope(args.seed, fld.e, t0, {"error": "quotient sylow"}), 3
    case, qpar = _theorem_case(args.representative, n)
    h = catalog_group(args.representative)
    ctx, report = verify_morita(g, h, fld, rng, progress=True)
    payload = {
        "inputGroup": args.group,
        "oddCoreTrivial": True,
        "centerOrder": 2,
        "sylowIsoType": ptype,
        "n": n,
        "dihedralQuotientClass": {"case": case, "q": qpar},
        "quaternionLevelVerdict": report.verdict,
        "matchedRepresentative": args.representative,
        "scottDim": ctx.module.dim,
        "report": report.as_dict(),
    }
    out = _envelope(args.seed, fld.e, t0, payload)
    return out, _expect_exit(report.verdict, args.expect)


def run_job(job, seed, cache_root, no_cache):
    """One manifest entry; returns (job, result, passed)."""
    args = argparse.Namespace(**job.get("params", {}))
    args.seed = seed if job.get("seed") is None else job["seed"]
    from .rng import Rng
    rng = Rng(args.seed)
    from .ffield import GF
    fld = GF(job.get("field_e", 2))
    cache = Cache(cache_root, enabled=not no_cache)
    kind = job["kind"]
    args.expect = job.get("expect")
    handlers = {
        "h2": lambda: cmd_h2(args, rng, fld),
        "classify-extensions": lambda: cmd_classify_extensions(args, rng, fld),
        "blocks": lambda: cmd_blocks(args, rng, fld),
        "scott": lambda: cmd_scott(args, rng, fld),
        "verify-morita": lambda: cmd_verify_morita(args, rng, fld, cache),
        "verify-lifting": lambda: cmd_verify_lifting(args, rng, fld, cache),
        "verify-theorem": lambda: cmd_verify_theorem(args, rng, fld, cache),
    }
    if kind not in handlers:
        raise ValueError(f"unknown job kind {kind}")
    for key in ("classify", "vertex", "oracle"):
        if not hasattr(args, key):
            setattr(args, key, False)
    out, code = handlers[kind]()
    return out, code == 0


def cmd_run_manifest(args, rng, fld, cache):
    t0 = time.time()
    with open(args.manifest) as fh:
        manifest = json.load(fh)
    jobs = manifest["jobs"]
    results = []
    npass = 0
    if args.jobs and args.jobs > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            futs = [
                pool.submit(run_job, job, args.seed, cache.root, not cache.enabled)
                for job in jobs
            ]
            outs = [f.result() for f in futs]
    else:
        outs = [run_job(job, args.seed, cache.root, not cache.enabled)
                for job in jobs]
    for job, (out, passed) in zip(jobs, outs):
        results.append({
            "kind": job["kind"],
            "params": job.get("params", {}),
            "provenance": job.get("provenance"),
            "passed": passed,
            "result": out,
        })
        npass += passed
        _err(f"{'PASS' if passed else 'FAIL'} {job['kind']} {job.get('params')}")
    payload = {
        "manifest": args.manifest,
        "passed": npass,
        "total": len(jobs),
        "results": results,
    }
    return _envelope(args.seed, fld.e, t0, payload), 0 if npass == len(jobs) else 1


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def build_parser():
    p = argparse.ArgumentParser(prog="blockmorita")
    p.add_argument("--seed", type=lambda s: int(s, 0), default=None)
    p.add_argument("--field-e", type=int, default=2)
    p.add_argument("--no-cache", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("h2")
    s.add_argument("--group", required=True)
    s.add_argument("--classify", action="store_true")

    s = sub.add_parser("classify-extensions")
    s.add_argument("--n", type=int, required=True)

    s = sub.add_parser("blocks")
    s.add_argument("--group", required=True)

    s = sub.add_parser("scott")
    s.add_argument("--group", required=True)
    s.add_argument("--subgroup", required=True)
    s.add_argument("--vertex", action="store_true")

    s = sub.add_parser("verify-morita")
    s.add_argument("--left", required=True)
    s.add_argument("--right", required=True)
    s.add_argument("--oracle", action="store_true")
    s.add_argument("--expect", choices=["true", "false"])

    s = sub.add_parser("verify-lifting")
    s.add_argument("--left", required=True)
    s.add_argument("--right", required=True)
    s.add_argument("--expect", choices=["true", "false", "consistent"])

    s = sub.add_parser("verify-theorem")
    s.add_argument("--group", required=True)
    s.add_argument("--representative", required=True)
    s.add_argument("--expect", choices=["true", "false"])

    s = sub.add_parser("run-manifest")
    s.add_argument("manifest")
    s.add_argument("--jobs", type=int, default=os.cpu_count())
    return p


def main(argv=None):
    from .rng import Rng, seed_from_env
    from .ffield import GF
    from .modrep import CapExceeded
    args = build_parser().parse_args(argv)
    if args.seed is None:
        args.seed = seed_from_env()
    rng = Rng(args.seed)
    fld = GF(args.field_e)
    cache = Cache(enabled=not args.no_cache)
    handlers = {
        "h2": lambda: cmd_h2(args, rng, fld),
        "classify-extensions": lambda: cmd_classify_extensions(args, rng, fld),
        "blocks": lambda: cmd_blocks(args, rng, fld),
        "scott": lambda: cmd_scott(args, rng, fld),
        "verify-morita": lambda: cmd_verify_morita(args, rng, fld, cache),
        "verify-lifting": lambda: cmd_verify_lifting(args, rng, fld, cache),
        "verify-theorem": lambda: cmd_verify_theorem(args, rng, fld, cache),
        "run-manifest": lambda: cmd_run_manifest(args, rng, fld, cache),
    }
    try:
        out, code = handlers[args.command]()
    except CapExceeded as exc:
        _err(f"cap exceeded: {exc}")
        return 2
    except (ValueError,) as exc:
        _err(f"error: {exc}")
        return 2
    except AssertionError as exc:
        _err(f"structural assertion failed: {exc}")
        return 3
    json.dump(out, sys.stdout, indent=1)
    sys.stdout.write("\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
