"""numba kernels; loop-for-loop twins of ``_kernels_np``."""

from __future__ import annotations

import numpy as np
from numba import njit

F2, BOOL = 0, 1


@njit(cache=True)
def subset_images(nbits, out_idx):
    out = np.zeros(1 << nbits, dtype=np.int64)
    for m in range(1, 1 << nbits):
        low = m & (-m)
        k = 0
        while (low >> k) != 1:
            k += 1
        out[m] = out[m ^ low] | (np.int64(1) << out_idx[k])
    return out


@njit(cache=True)
def popcounts(nbits):
    out = np.zeros(1 << nbits, dtype=np.int64)
    for m in range(1, 1 << nbits):
        out[m] = out[m & (m - 1)] + 1
    return out


@njit(cache=True)
def ample_masks(fiber_masks, nbits):
    total = 1 << nbits
    keep = np.zeros(total, dtype=np.bool_)
    count = 0
    nf = fiber_masks.shape[0]
    for m in range(1, total):
        ok = True
        for f in range(nf):
            if (m & fiber_masks[f]) == 0:
                ok = False
                break
        if ok:
            keep[m] = True
            count += 1
    out = np.empty(count, dtype=np.int64)
    j = 0
    for m in range(1, total):
        if keep[m]:
            out[j] = m
            j += 1
    return out


@njit(cache=True)
def lift_matches(nk, proj_idx, targets):
    nproj = proj_idx.shape[0]
    total = 1 << nk
    # reject masks early: a point whose image misses its target can never appear
    allowed = np.int64(0)
    for k in range(nk):
        good = True
        for p in range(nproj):
            if ((targets[p] >> proj_idx[p, k]) & 1) == 0:
                good = False
        if good:
            allowed |= np.int64(1) << k
    buf = np.empty(64, dtype=np.int64)
    count = 0
    # images built by dropping the lowest bit, as in subset_images; submasks of allowed stay inside it
    img = np.zeros((nproj, total), dtype=np.int64)
    for m in range(1, total):
        if (m & ~allowed) != 0:
            continue
        low = m & (-m)
        k = 0
        while (low >> k) != 1:
            k += 1
        prev = m ^ low
        ok = True
        for p in range(nproj):
            v = img[p, prev] | (np.int64(1) << proj_idx[p, k])
            img[p, m] = v
            if v != targets[p]:
                ok = False
        if ok:
            if count == buf.shape[0]:
                grown = np.empty(2 * count, dtype=np.int64)
                grown[:count] = buf
                buf = grown
            buf[count] = m
            count += 1
    return buf[:count].copy()


@njit(cache=True)
def zeta_superset(vec):
    a = vec.copy()
    n = a.shape[0]
    bit = 1
    while bit < n:
        for m in range(n):
            if (m & bit) == 0:
                a[m] += a[m | bit]
        bit <<= 1
    return a


@njit(cache=True)
def mobius_superset(vec):
    a = vec.copy()
    n = a.shape[0]
    bit = 1
    while bit < n:
        for m in range(n):
            if (m & bit) == 0:
                a[m] -= a[m | bit]
        bit <<= 1
    return a


@njit(cache=True)
def sr_products(kind, r, k, c, left, right):
    out = np.zeros((left.shape[0], right.shape[0]), dtype=np.int64)
    for a in range(left.shape[0]):
        lm = left[a]
        for b in range(right.shape[0]):
            rm = right[b]
            res = np.int64(0)
            for i in range(r):
                for j in range(c):
                    acc = 0
                    for t in range(k):
                        if (lm >> (i * k + t)) & 1 and (rm >> (t * c + j)) & 1:
                            if kind == 0:
                                acc ^= 1
                            else:
                                acc = 1
                                break
                    if acc:
                        res |= np.int64(1) << (i * c + j)
            out[a, b] = res
    return out


@njit(cache=True)
def _inv_mod(x, p):
    result = 1
    base = x % p
    e = p - 2
    while e > 0:
        if e & 1:
            result = (result * base) % p
        base = (base * base) % p
        e >>= 1
    return result


@njit(cache=True)
def rref_mod_p(a, p):
    m = a.copy() % p
    nrows, ncols = m.shape
    pivots = np.empty(min(nrows, ncols), dtype=np.int64)
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        i = r
        while i < nrows and m[i, c] == 0:
            i += 1
        if i == nrows:
            continue
        if i != r:
            for j in range(ncols):
                tmp = m[r, j]
                m[r, j] = m[i, j]
                m[i, j] = tmp
        inv = _inv_mod(m[r, c], p)
        for j in range(ncols):
            m[r, j] = (m[r, j] * inv) % p
        for i2 in range(nrows):
            if i2 != r and m[i2, c] != 0:
                f = m[i2, c]
                for j in range(c, ncols):
                    m[i2, j] = (m[i2, j] - f * m[r, j]) % p
        pivots[r] = c
        r += 1
    return m, pivots[:r].copy()
