"""Pure-numpy reference implementations of the hot kernels.

Every function here has a numba twin in ``jit.py`` with the same
signature and bit-identical output.  This backend is selected with
``BLOCKMORITA_NUMBA=0`` and is the correctness baseline for the
benchmark in ``bench/``.
"""

from __future__ import annotations

import numpy as np


# ---------------------------------------------------------------------------
# GF(2^e) dense matrices, one byte per entry (2 <= e <= 8)
# ---------------------------------------------------------------------------

def mm_u8(a, b, mul):
    """Exact matrix product over GF(2^e) with a full multiplication table."""
    n, k = a.shape
    k2, m = b.shape
    out = np.zeros((n, m), dtype=np.uint8)
    for j in range(k):
        col = a[:, j]
        nz = np.nonzero(col)[0]
        if nz.size == 0:
            continue
        out[nz] ^= mul[col[nz][:, None], b[j][None, :]]
    return out


def rref_u8(m, mul, inv):
    """Reduced row echelon form. Returns (rref, rank, pivot_columns)."""
    r = m.astype(np.uint8).copy()
    rows, cols = r.shape
    pivots = []
    row = 0
    for col in range(cols):
        if row >= rows:
            break
        piv = -1
        for i in range(row, rows):
            if r[i, col]:
                piv = i
                break
        if piv < 0:
            continue
        if piv != row:
            r[[row, piv]] = r[[piv, row]]
        pv = r[row, col]
        if pv != 1:
            r[row] = mul[inv[pv], r[row]]
        sel = np.nonzero(r[:, col])[0]
        sel = sel[sel != row]
        if sel.size:
            r[sel] ^= mul[r[sel, col][:, None], r[row][None, :]]
        pivots.append(col)
        row += 1
    return r, row, np.array(pivots, dtype=np.int64)


def mm_u16(a, b, log, exp):
    n, k = a.shape
    _, m = b.shape
    out = np.zeros((n, m), dtype=np.uint16)
    for j in range(k):
        col = a[:, j].astype(np.int64)
        nz = np.nonzero(col)[0]
        if nz.size == 0:
            continue
        bnz = np.nonzero(b[j])[0]
        if bnz.size == 0:
            continue
        prod = exp[log[col[nz]][:, None] + log[b[j][bnz].astype(np.int64)][None, :]]
        sub = out[np.ix_(nz, bnz)]
        out[np.ix_(nz, bnz)] = sub ^ prod
    return out


def rref_u16(m, log, exp, invt):
    r = m.astype(np.uint16).copy()
    rows, cols = r.shape
    pivots = []
    row = 0
    for col in range(cols):
        if row >= rows:
            break
        piv = -1
        for i in range(row, rows):
            if r[i, col]:
                piv = i
                break
        if piv < 0:
            continue
        if piv != row:
            r[[row, piv]] = r[[piv, row]]
        pv = r[row, col]
        if pv != 1:
            s = int(invt[pv])
            nz = np.nonzero(r[row])[0]
            r[row][nz] = exp[log[r[row][nz].astype(np.int64)] + log[s]]
        for i in range(rows):
            if i != row and r[i, col]:
                f = int(r[i, col])
                nz = np.nonzero(r[row])[0]
                upd = exp[log[r[row][nz].astype(np.int64)] + log[f]]
                r[i][nz] ^= upd.astype(np.uint16)
        pivots.append(col)
        row += 1
    return r, row, np.array(pivots, dtype=np.int64)


# ---------------------------------------------------------------------------
# GF(2), bit-packed into little-endian 64-bit words
# ---------------------------------------------------------------------------

def mm_p64(a, kbits, b):
    """Packed GF(2) product: word-parallel row combination.

    ``a`` packs an (n x kbits) matrix, ``b`` an (kbits x m) matrix as
    (kbits, W) words; the result packs (n x m).
    """
    n = a.shape[0]
    out = np.zeros((n, b.shape[1]), dtype=np.uint64)
    for i in range(n):
        acc = out[i]
        row = a[i]
        for j in range(kbits):
            if (row[j >> 6] >> np.uint64(j & 63)) & np.uint64(1):
                acc ^= b[j]
    return out


def rref_p64(m, ncols):
    r = m.copy()
    rows = r.shape[0]
    pivots = []
    row = 0
    for col in range(ncols):
        if row >= rows:
            break
        w = col >> 6
        bit = np.uint64(1) << np.uint64(col & 63)
        piv = -1
        for i in range(row, rows):
            if r[i, w] & bit:
                piv = i
                break
        if piv < 0:
            continue
        if piv != row:
            r[[row, piv]] = r[[piv, row]]
        sel = np.nonzero(r[:, w] & bit)[0]
        sel = sel[sel != row]
        if sel.size:
            r[sel] ^= r[row]
        pivots.append(col)
        row += 1
    return r, row, np.array(pivots, dtype=np.int64)


# ---------------------------------------------------------------------------
# Endomorphism rings of transitive permutation modules (row form)
# ---------------------------------------------------------------------------

def hecke_mul(f, g, tinv, mul):
    """Base row of the product of two commuting-algebra elements.

    ``f`` and ``g`` are base-point rows, ``tinv[w]`` is the inverse
    transversal permutation carrying the base point to ``w``.
    """
    npts = f.shape[0]
    out = np.zeros(npts, dtype=np.uint8)
    for w in range(npts):
        fv = f[w]
        if fv:
            out ^= mul[fv, g[tinv[w]]]
    return out


def orbital_counts(tinv, orbid, m):
    """Integer triple-product counts of the orbital basis."""
    npts = tinv.shape[0]
    counts = np.zeros((m, m, m), dtype=np.int64)
    korb = orbid
    for w1 in range(npts):
        i = orbid[w1]
        j = orbid[tinv[w1]]
        np.add.at(counts[i], (j, korb), 1)
    return counts


def sc_mul(u, v, c, mul):
    """Product in a structure-constant algebra (c entries live in the field)."""
    m = u.shape[0]
    out = np.zeros(m, dtype=np.uint8)
    for i in range(m):
        if not u[i]:
            continue
        for j in range(m):
            if not v[j]:
                continue
            t = mul[u[i], v[j]]
            if t:
                out ^= mul[t, c[i, j]]
    return out


def sc_lmat(u, c, mul):
    """Matrix of left multiplication by ``u`` in the regular representation."""
    m = u.shape[0]
    out = np.zeros((m, m), dtype=np.uint8)
    for i in range(m):
        if u[i]:
            out ^= mul[u[i], c[i]].T
    return out


def sc_rmat(u, c, mul):
    """Rows are the coordinates of (basis_i * u): right multiplication by u."""
    m = u.shape[0]
    out = np.zeros((m, m), dtype=np.uint8)
    for j in range(m):
        if u[j]:
            out ^= mul[u[j], c[:, j, :]]
    return out


def reduce_vs_rref_u8(rows, basis, pivots, mul):
    """Reduce ``rows`` in place against an RREF ``basis`` (unit pivots).

    Returns the coefficient matrix: coeffs[t, i] is the multiple of basis
    row i that was subtracted from rows[t].
    """
    nb = basis.shape[0]
    coeffs = np.zeros((rows.shape[0], nb), dtype=np.uint8)
    for i in range(nb):
        p = pivots[i]
        sel = np.nonzero(rows[:, p])[0]
        if sel.size:
            cs = rows[sel, p]
            coeffs[sel, i] = cs
            rows[sel] ^= mul[cs[:, None], basis[i][None, :]]
    return coeffs


# ---------------------------------------------------------------------------
# Characteristic polynomial (Hessenberg route) over GF(2^e), e <= 8
# ---------------------------------------------------------------------------

def charpoly_u8(a, mul, inv):
    h = a.astype(np.uint8).copy()
    n = h.shape[0]
    for j in range(n - 2):
        piv = -1
        for i in range(j + 1, n):
            if h[i, j]:
                piv = i
                break
        if piv < 0:
            continue
        if piv != j + 1:
            h[[j + 1, piv]] = h[[piv, j + 1]]
            h[:, [j + 1, piv]] = h[:, [piv, j + 1]]
        s = inv[h[j + 1, j]]
        for i in range(j + 2, n):
            if h[i, j]:
                f = mul[h[i, j], s]
                h[i] ^= mul[f, h[j + 1]]
                h[:, j + 1] ^= mul[f, h[:, i]]
    # p[k] = (x + h[k-1,k-1]) p[k-1] + sum_m beta * h[k-m-1, k-1] p[k-m-1]
    polys = [np.array([1], dtype=np.uint8)]
    for k in range(1, n + 1):
        prev = polys[k - 1]
        cur = np.zeros(k + 1, dtype=np.uint8)
        cur[1:] ^= prev
        d = h[k - 1, k - 1]
        if d:
            cur[:k] ^= mul[d, prev]
        beta = np.uint8(1)
        for mstep in range(2, k + 1):
            beta = mul[beta, h[k - mstep + 1, k - mstep]]
            if beta == 0:
                break
            coef = mul[beta, h[k - mstep, k - 1]]
            if coef:
                cur[: k - mstep + 1] ^= mul[coef, polys[k - mstep]]
        polys.append(cur)
    return polys[n]


# ---------------------------------------------------------------------------
# Polynomials over GF(2^e), coefficient index = degree, e <= 8
# ---------------------------------------------------------------------------

def poly_mulmod_u8(a, b, mod, mul, inv):
    """(a * b) mod ``mod`` with monic ``mod``; arrays are uint8 coefficients."""
    la, lb = a.shape[0], b.shape[0]
    prod = np.zeros(la + lb - 1, dtype=np.uint8)
    for i in range(la):
        if a[i]:
            prod[i : i + lb] ^= mul[a[i], b]
    dm = mod.shape[0] - 1
    for i in range(prod.shape[0] - 1, dm - 1, -1):
        c = prod[i]
        if c:
            prod[i - dm : i + 1] ^= mul[c, mod]
    out = prod[:dm].copy() if dm > 0 else np.zeros(1, dtype=np.uint8)
    return out


# ---------------------------------------------------------------------------
# Streaming echelon basis of the 2-cocycle identity over GF(2)
# ---------------------------------------------------------------------------

def cocycle_rows_p64(cay):
    """Echelonized row space of the cocycle-identity equations.

    ``cay`` is the full Cayley table of the base group (identity index 0).
    Variables are alpha(i, j) at index i*n + j, packed GF(2) rows.
    Returns (basis, present) with one slot per possible pivot column.
    """
    n = cay.shape[0]
    nv = n * n
    nw = (nv + 63) >> 6
    basis = np.zeros((nv, nw), dtype=np.uint64)
    present = np.zeros(nv, dtype=np.bool_)
    row = np.zeros(nw, dtype=np.uint64)

    def insert(idxs):
        row[:] = 0
        for t in idxs:
            row[t >> 6] ^= np.uint64(1) << np.uint64(t & 63)
        while True:
            lead = -1
            for w in range(nw):
                if row[w]:
                    v = int(row[w])
                    lead = (w << 6) + ((v & -v).bit_length() - 1)
                    break
            if lead < 0:
                return
            if present[lead]:
                row ^= basis[lead]
            else:
                basis[lead] = row
                present[lead] = True
                return

    for j in range(n):
        insert([j])           # alpha(1, j) = 0
        insert([j * n])       # alpha(j, 1) = 0
    for g in range(n):
        for h in range(n):
            gh = cay[g, h]
            for k in range(n):
                insert([g * n + h, gh * n + k, h * n + k, g * n + cay[h, k]])
    return basis, present
