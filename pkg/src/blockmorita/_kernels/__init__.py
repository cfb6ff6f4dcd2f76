"""Kernel backend selection.

The package runs on numba-jitted kernels when available.  Setting
``BLOCKMORITA_NUMBA=0`` forces the pure-numpy fallback (always available,
much slower on large instances); ``BLOCKMORITA_NUMBA=1`` requires numba
and fails loudly if it cannot be imported.
"""

from __future__ import annotations

import os

import numpy as np

from . import plain

_KERNEL_NAMES = [
    "mm_u8",
    "rref_u8",
    "mm_u16",
    "rref_u16",
    "mm_p64",
    "rref_p64",
    "hecke_mul",
    "orbital_counts",
    "sc_mul",
    "sc_lmat",
    "sc_rmat",
    "reduce_vs_rref_u8",
    "charpoly_u8",
    "poly_mulmod_u8",
    "cocycle_rows_p64",
]


def _pick_backend():
    flag = os.environ.get("BLOCKMORITA_NUMBA", "auto").strip().lower()
    if flag in ("0", "off", "false", "no"):
        return plain, "numpy"
    try:
        from . import jit
        return jit, "numba"
    except ImportError:
        if flag in ("1", "on", "true", "yes"):
            raise
        return plain, "numpy"


_impl, BACKEND = _pick_backend()

mm_u8 = _impl.mm_u8
rref_u8 = _impl.rref_u8
mm_u16 = _impl.mm_u16
rref_u16 = _impl.rref_u16
mm_p64 = _impl.mm_p64
rref_p64 = _impl.rref_p64
hecke_mul = _impl.hecke_mul
orbital_counts = _impl.orbital_counts
sc_mul = _impl.sc_mul
sc_lmat = _impl.sc_lmat
sc_rmat = _impl.sc_rmat
reduce_vs_rref_u8 = _impl.reduce_vs_rref_u8
charpoly_u8 = _impl.charpoly_u8
poly_mulmod_u8 = _impl.poly_mulmod_u8
cocycle_rows_p64 = _impl.cocycle_rows_p64


def get_backend(name):
    """Return a named backend module ("numba" or "numpy"), for benchmarks."""
    if name == "numpy":
        return plain
    if name == "numba":
        from . import jit
        return jit
    raise ValueError(f"unknown backend {name!r}")


# --- bit packing helpers (backend independent) -----------------------------

def pack_bits(rows: np.ndarray) -> np.ndarray:
    """Pack a 0/1 uint8 matrix into little-endian 64-bit words per row."""
    rows = np.ascontiguousarray(rows, dtype=np.uint8)
    n = rows.shape[1]
    nw = (n + 63) >> 6
    by = np.packbits(rows, axis=1, bitorder="little")
    out = np.zeros((rows.shape[0], nw * 8), dtype=np.uint8)
    out[:, : by.shape[1]] = by
    return out.view("<u8")


def unpack_bits(words: np.ndarray, ncols: int) -> np.ndarray:
    """Inverse of :func:`pack_bits`."""
    by = np.ascontiguousarray(words).view(np.uint8)
    bits = np.unpackbits(by, axis=1, bitorder="little")
    return bits[:, :ncols].copy()
