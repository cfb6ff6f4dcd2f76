"""Numba implementations of the hot kernels (see ``plain.py`` for specs)."""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def mm_u8(a, b, mul):
    n, k = a.shape
    m = b.shape[1]
    out = np.zeros((n, m), dtype=np.uint8)
    for i in range(n):
        for j in range(k):
            v = a[i, j]
            if v:
                mrow = mul[v]
                brow = b[j]
                orow = out[i]
                for t in range(m):
                    orow[t] ^= mrow[brow[t]]
    return out


@njit(cache=True)
def rref_u8(m, mul, inv):
    r = m.copy()
    rows, cols = r.shape
    pivots = np.empty(min(rows, cols), dtype=np.int64)
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
            for t in range(cols):
                tmp = r[row, t]
                r[row, t] = r[piv, t]
                r[piv, t] = tmp
        pv = r[row, col]
        if pv != 1:
            s = inv[pv]
            mrow = mul[s]
            for t in range(cols):
                r[row, t] = mrow[r[row, t]]
        for i in range(rows):
            if i != row and r[i, col]:
                f = r[i, col]
                mrow = mul[f]
                for t in range(cols):
                    r[i, t] ^= mrow[r[row, t]]
        pivots[row] = col
        row += 1
    return r, row, pivots[:row].copy()


@njit(cache=True)
def mm_u16(a, b, log, exp):
    n, k = a.shape
    m = b.shape[1]
    out = np.zeros((n, m), dtype=np.uint16)
    for i in range(n):
        for j in range(k):
            v = a[i, j]
            if v:
                lv = log[v]
                for t in range(m):
                    w = b[j, t]
                    if w:
                        out[i, t] ^= exp[lv + log[w]]
    return out


@njit(cache=True)
def rref_u16(m, log, exp, invt):
    r = m.copy()
    rows, cols = r.shape
    pivots = np.empty(min(rows, cols), dtype=np.int64)
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
            for t in range(cols):
                tmp = r[row, t]
                r[row, t] = r[piv, t]
                r[piv, t] = tmp
        pv = r[row, col]
        if pv != 1:
            ls = log[invt[pv]]
            for t in range(cols):
                if r[row, t]:
                    r[row, t] = exp[ls + log[r[row, t]]]
        for i in range(rows):
            if i != row and r[i, col]:
                lf = log[r[i, col]]
                for t in range(cols):
                    if r[row, t]:
                        r[i, t] ^= exp[lf + log[r[row, t]]]
        pivots[row] = col
        row += 1
    return r, row, pivots[:row].copy()


@njit(cache=True)
def mm_p64(a, kbits, b):
    n = a.shape[0]
    w = b.shape[1]
    out = np.zeros((n, w), dtype=np.uint64)
    for i in range(n):
        for j in range(kbits):
            if (a[i, j >> 6] >> np.uint64(j & 63)) & np.uint64(1):
                for t in range(w):
                    out[i, t] ^= b[j, t]
    return out


@njit(cache=True)
def rref_p64(m, ncols):
    r = m.copy()
    rows, nw = r.shape
    pivots = np.empty(min(rows, ncols), dtype=np.int64)
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
            for t in range(nw):
                tmp = r[row, t]
                r[row, t] = r[piv, t]
                r[piv, t] = tmp
        for i in range(rows):
            if i != row and (r[i, w] & bit):
                for t in range(nw):
                    r[i, t] ^= r[row, t]
        pivots[row] = col
        row += 1
    return r, row, pivots[:row].copy()


@njit(cache=True)
def hecke_mul(f, g, tinv, mul):
    npts = f.shape[0]
    out = np.zeros(npts, dtype=np.uint8)
    for w in range(npts):
        fv = f[w]
        if fv:
            mrow = mul[fv]
            trow = tinv[w]
            for t in range(npts):
                gv = g[trow[t]]
                if gv:
                    out[t] ^= mrow[gv]
    return out


@njit(cache=True)
def orbital_counts(tinv, orbid, m):
    npts = tinv.shape[0]
    counts = np.zeros((m, m, m), dtype=np.int64)
    for w1 in range(npts):
        i = orbid[w1]
        trow = tinv[w1]
        for t in range(npts):
            counts[i, orbid[trow[t]], orbid[t]] += 1
    return counts


@njit(cache=True)
def sc_mul(u, v, c, mul):
    m = u.shape[0]
    out = np.zeros(m, dtype=np.uint8)
    for i in range(m):
        ui = u[i]
        if ui:
            for j in range(m):
                vj = v[j]
                if vj:
                    t = mul[ui, vj]
                    if t:
                        mrow = mul[t]
                        crow = c[i, j]
                        for k in range(m):
                            if crow[k]:
                                out[k] ^= mrow[crow[k]]
    return out


@njit(cache=True)
def sc_lmat(u, c, mul):
    m = u.shape[0]
    out = np.zeros((m, m), dtype=np.uint8)
    for i in range(m):
        ui = u[i]
        if ui:
            mrow = mul[ui]
            for j in range(m):
                crow = c[i, j]
                for k in range(m):
                    if crow[k]:
                        out[k, j] ^= mrow[crow[k]]
    return out


@njit(cache=True)
def sc_rmat(u, c, mul):
    m = u.shape[0]
    out = np.zeros((m, m), dtype=np.uint8)
    for j in range(m):
        uj = u[j]
        if uj:
            mrow = mul[uj]
            for i in range(m):
                crow = c[i, j]
                for k in range(m):
                    if crow[k]:
                        out[i, k] ^= mrow[crow[k]]
    return out


@njit(cache=True)
def reduce_vs_rref_u8(rows, basis, pivots, mul):
    nb = basis.shape[0]
    nr = rows.shape[0]
    w = rows.shape[1]
    coeffs = np.zeros((nr, nb), dtype=np.uint8)
    for t in range(nr):
        row = rows[t]
        for i in range(nb):
            cv = row[pivots[i]]
            if cv:
                coeffs[t, i] = cv
                mrow = mul[cv]
                brow = basis[i]
                for s in range(w):
                    row[s] ^= mrow[brow[s]]
    return coeffs


@njit(cache=True)
def charpoly_u8(a, mul, inv):
    h = a.copy()
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
            for t in range(n):
                tmp = h[j + 1, t]
                h[j + 1, t] = h[piv, t]
                h[piv, t] = tmp
            for t in range(n):
                tmp = h[t, j + 1]
                h[t, j + 1] = h[t, piv]
                h[t, piv] = tmp
        s = inv[h[j + 1, j]]
        for i in range(j + 2, n):
            if h[i, j]:
                f = mul[h[i, j], s]
                mrow = mul[f]
                for t in range(n):
                    h[i, t] ^= mrow[h[j + 1, t]]
                for t in range(n):
                    h[t, j + 1] ^= mrow[h[t, i]]
    polys = np.zeros((n + 1, n + 1), dtype=np.uint8)
    polys[0, 0] = 1
    for k in range(1, n + 1):
        for t in range(k):
            polys[k, t + 1] ^= polys[k - 1, t]
        d = h[k - 1, k - 1]
        if d:
            mrow = mul[d]
            for t in range(k):
                polys[k, t] ^= mrow[polys[k - 1, t]]
        beta = np.uint8(1)
        for mstep in range(2, k + 1):
            beta = mul[beta, h[k - mstep + 1, k - mstep]]
            if beta == 0:
                break
            coef = mul[beta, h[k - mstep, k - 1]]
            if coef:
                mrow = mul[coef]
                for t in range(k - mstep + 1):
                    polys[k, t] ^= mrow[polys[k - mstep, t]]
    return polys[n].copy()


@njit(cache=True)
def poly_mulmod_u8(a, b, mod, mul, inv):
    la = a.shape[0]
    lb = b.shape[0]
    prod = np.zeros(la + lb - 1, dtype=np.uint8)
    for i in range(la):
        ai = a[i]
        if ai:
            mrow = mul[ai]
            for j in range(lb):
                if b[j]:
                    prod[i + j] ^= mrow[b[j]]
    dm = mod.shape[0] - 1
    if dm == 0:
        return np.zeros(1, dtype=np.uint8)
    for i in range(prod.shape[0] - 1, dm - 1, -1):
        c = prod[i]
        if c:
            mrow = mul[c]
            for j in range(dm + 1):
                if mod[j]:
                    prod[i - dm + j] ^= mrow[mod[j]]
    return prod[:dm].copy()


@njit(cache=True)
def cocycle_rows_p64(cay):
    n = cay.shape[0]
    nv = n * n
    nw = (nv + 63) >> 6
    basis = np.zeros((nv, nw), dtype=np.uint64)
    present = np.zeros(nv, dtype=np.bool_)
    row = np.zeros(nw, dtype=np.uint64)
    idxs = np.zeros(4, dtype=np.int64)
    one = np.uint64(1)

    total = 2 * n + n * n * n
    for step in range(total):
        if step < n:
            nterm = 1
            idxs[0] = step
        elif step < 2 * n:
            nterm = 1
            idxs[0] = (step - n) * n
        else:
            s = step - 2 * n
            g = s // (n * n)
            h = (s // n) % n
            k = s % n
            nterm = 4
            idxs[0] = g * n + h
            idxs[1] = cay[g, h] * n + k
            idxs[2] = h * n + k
            idxs[3] = g * n + cay[h, k]
        for t in range(nw):
            row[t] = 0
        for t in range(nterm):
            ix = idxs[t]
            row[ix >> 6] ^= one << np.uint64(ix & 63)
        while True:
            lead = -1
            for w in range(nw):
                if row[w]:
                    v = row[w]
                    b = 0
                    while not ((v >> np.uint64(b)) & one):
                        b += 1
                    lead = (w << 6) + b
                    break
            if lead < 0:
                break
            if present[lead]:
                for t in range(nw):
                    row[t] ^= basis[lead, t]
            else:
                for t in range(nw):
                    basis[lead, t] = row[t]
                present[lead] = True
                break
    return basis, present
