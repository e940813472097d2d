"""Numba kernels for packed GF(2) linear algebra.

Matrices are stored row-major as uint64 words, 64 columns per word,
column ``c`` living at bit ``c & 63`` of word ``c >> 6``.  Bits past the
last column must be zero; every kernel preserves that invariant.

The eliminator works on 64-column blocks: pivots are found on a compact
two-word copy of the block window, trailing words are updated once per
block through eight 256-entry Gray-code tables (Four Russians).  Small
systems take a plain word-at-a-time path since table setup would
dominate.
"""

import numpy as np
from numba import njit

_SMALL_NCOLS = 512


@njit(cache=True, nogil=True)
def _echelon_plain(M, b, ncols):
    R, W = M.shape
    one = np.uint64(1)
    rank = 0
    for c in range(ncols):
        w = c >> 6
        sh = np.uint64(c & 63)
        piv = -1
        for i in range(rank, R):
            if (M[i, w] >> sh) & one:
                piv = i
                break
        if piv < 0:
            continue
        if piv != rank:
            for ww in range(w, W):
                t = M[rank, ww]
                M[rank, ww] = M[piv, ww]
                M[piv, ww] = t
            tb = b[rank]
            b[rank] = b[piv]
            b[piv] = tb
        for i in range(rank + 1, R):
            if (M[i, w] >> sh) & one:
                for ww in range(w, W):
                    M[i, ww] ^= M[rank, ww]
                b[i] ^= b[rank]
        rank += 1
        if rank == R:
            break
    return rank


@njit(cache=True, nogil=True)
def _echelon_blocked(M, b, ncols):
    R, W = M.shape
    one = np.uint64(1)
    tables = np.zeros((8, 256, W), dtype=np.uint64)
    btabs = np.zeros((8, 256), dtype=np.uint8)
    mask = np.zeros(R, dtype=np.uint64)
    win = np.zeros((R, 2), dtype=np.uint64)
    rank = 0
    c0 = 0
    while c0 < ncols and rank < R:
        cend = min(c0 + 64, ncols)
        w0 = c0 >> 6
        wend = ((cend - 1) >> 6) + 1
        nw = wend - w0
        nrows = R - rank
        for i in range(nrows):
            win[i, 0] = M[rank + i, w0]
            win[i, 1] = M[rank + i, w0 + 1] if nw > 1 else np.uint64(0)
            mask[i] = np.uint64(0)
        nb = 0
        for c in range(c0, cend):
            w = (c >> 6) - w0
            sh = np.uint64(c & 63)
            piv = -1
            for i in range(nb, nrows):
                if (win[i, w] >> sh) & one:
                    piv = i
                    break
            if piv < 0:
                continue
            if piv != nb:
                for ww in range(2):
                    t = win[nb, ww]
                    win[nb, ww] = win[piv, ww]
                    win[piv, ww] = t
                tm = mask[nb]
                mask[nb] = mask[piv]
                mask[piv] = tm
                ra = rank + nb
                rb = rank + piv
                for ww in range(w0, W):
                    t = M[ra, ww]
                    M[ra, ww] = M[rb, ww]
                    M[rb, ww] = t
                tb = b[ra]
                b[ra] = b[rb]
                b[rb] = tb
            r = rank + nb
            m = mask[nb]
            if m:
                # settle this pivot row's trailing words before it feeds tables
                for t in range(nb):
                    if (m >> np.uint64(t)) & one:
                        src = rank + t
                        for ww in range(wend, W):
                            M[r, ww] ^= M[src, ww]
                        b[r] ^= b[src]
                mask[nb] = np.uint64(0)
            for i in range(nb + 1, nrows):
                if (win[i, w] >> sh) & one:
                    win[i, 0] ^= win[nb, 0]
                    win[i, 1] ^= win[nb, 1]
                    mask[i] ^= one << np.uint64(nb)
            nb += 1
        if nb == 0:
            c0 = cend
            continue
        ntab = (nb + 7) >> 3
        for tt in range(ntab):
            base = rank + (tt << 3)
            cnt = min(8, nb - (tt << 3))
            bt = btabs[tt]
            bt[0] = 0
            for ww in range(wend, W):
                tables[tt, 0, ww] = 0
            for idx in range(1, 1 << cnt):
                g = idx ^ (idx >> 1)
                gp = (idx - 1) ^ ((idx - 1) >> 1)
                d = g ^ gp
                bit = 0
                while d > 1:
                    d >>= 1
                    bit += 1
                src = base + bit
                for ww in range(wend, W):
                    tables[tt, g, ww] = tables[tt, gp, ww] ^ M[src, ww]
                bt[g] = bt[gp] ^ b[src]
        for i in range(nb, nrows):
            ri = rank + i
            M[ri, w0] = win[i, 0]
            if nw > 1:
                M[ri, w0 + 1] = win[i, 1]
            m = mask[i]
            if m:
                m0 = int(m & np.uint64(0xFF))
                m1 = int((m >> np.uint64(8)) & np.uint64(0xFF))
                m2 = int((m >> np.uint64(16)) & np.uint64(0xFF))
                m3 = int((m >> np.uint64(24)) & np.uint64(0xFF))
                m4 = int((m >> np.uint64(32)) & np.uint64(0xFF))
                m5 = int((m >> np.uint64(40)) & np.uint64(0xFF))
                m6 = int((m >> np.uint64(48)) & np.uint64(0xFF))
                m7 = int((m >> np.uint64(56)) & np.uint64(0xFF))
                if m < np.uint64(256):
                    for ww in range(wend, W):
                        M[ri, ww] ^= tables[0, m0, ww]
                    b[ri] ^= btabs[0, m0]
                else:
                    for ww in range(wend, W):
                        acc = tables[0, m0, ww] ^ tables[1, m1, ww]
                        acc ^= tables[2, m2, ww] ^ tables[3, m3, ww]
                        acc ^= tables[4, m4, ww] ^ tables[5, m5, ww]
                        acc ^= tables[6, m6, ww] ^ tables[7, m7, ww]
                        M[ri, ww] ^= acc
                    b[ri] ^= (btabs[0, m0] ^ btabs[1, m1] ^ btabs[2, m2]
                              ^ btabs[3, m3] ^ btabs[4, m4] ^ btabs[5, m5]
                              ^ btabs[6, m6] ^ btabs[7, m7])
        rank += nb
        c0 = cend
    return rank


@njit(cache=True, nogil=True)
def echelon(M, b, ncols):
    """In-place forward elimination of (M | b); returns the rank.

    After the call, rows ``0..rank-1`` hold the pivot rows in column
    order and every row at or below ``rank`` is zero in all eliminated
    columns.
    """
    R, W = M.shape
    if R == 0 or ncols == 0 or W == 0:
        return 0
    if ncols <= _SMALL_NCOLS:
        return _echelon_plain(M, b, ncols)
    return _echelon_blocked(M, b, ncols)


@njit(cache=True, nogil=True)
def _parity(v):
    v ^= v >> np.uint64(32)
    v ^= v >> np.uint64(16)
    v ^= v >> np.uint64(8)
    v ^= v >> np.uint64(4)
    v ^= v >> np.uint64(2)
    v ^= v >> np.uint64(1)
    return np.uint8(v & np.uint64(1))


@njit(cache=True, nogil=True)
def back_substitute(M, b, ncols):
    """Solve an echelonized full-column-rank system for x (packed words).

    Requires rank == ncols, i.e. pivot row i sits on column i.
    """
    W = M.shape[1]
    Wx = (ncols + 63) >> 6
    x = np.zeros(Wx, dtype=np.uint64)
    for i in range(ncols - 1, -1, -1):
        t = np.uint64(0)
        for ww in range(i >> 6, Wx):
            t ^= M[i, ww] & x[ww]
        if _parity(t) ^ b[i]:
            x[i >> 6] |= np.uint64(1) << np.uint64(i & 63)
    return x


@njit(cache=True, nogil=True)
def matvec_bits(M, xw):
    """Packed matrix times packed vector, result as one bit per row."""
    R, W = M.shape
    out = np.empty(R, dtype=np.uint8)
    for i in range(R):
        t = np.uint64(0)
        for ww in range(W):
            t ^= M[i, ww] & xw[ww]
        out[i] = _parity(t)
    return out


@njit(cache=True, nogil=True)
def gather_columns(M, cols):
    """Extract the given columns into a freshly packed matrix."""
    R = M.shape[0]
    n2 = cols.shape[0]
    W2 = max((n2 + 63) >> 6, 1)
    out = np.zeros((R, W2), dtype=np.uint64)
    for i in range(R):
        for t in range(n2):
            c = cols[t]
            if (M[i, c >> 6] >> np.uint64(c & 63)) & np.uint64(1):
                out[i, t >> 6] |= np.uint64(1) << np.uint64(t & 63)
    return out


@njit(cache=True, nogil=True)
def set_bits(M, rows, cols):
    """Set M[rows[t], cols[t]] = 1 for all t (duplicate positions toggle once)."""
    for t in range(rows.shape[0]):
        M[rows[t], cols[t] >> 6] |= np.uint64(1) << np.uint64(cols[t] & 63)
