"""Pure-numpy kernels. Same signatures and outputs as the numba twins in ``_kernels_nb``."""

from __future__ import annotations

import numpy as np

F2, BOOL = 0, 1


def subset_images(nbits: int, out_idx: np.ndarray) -> np.ndarray:
    """``out[m]`` is the OR of ``1 << out_idx[k]`` over the set bits ``k`` of ``m``."""
    out = np.zeros(1 << nbits, dtype=np.int64)
    for k in range(nbits):
        half = 1 << k
        out[half:2 * half] = out[:half] | (np.int64(1) << np.int64(out_idx[k]))
    return out


def popcounts(nbits: int) -> np.ndarray:
    out = np.zeros(1 << nbits, dtype=np.int64)
    for k in range(nbits):
        half = 1 << k
        out[half:2 * half] = out[:half] + 1
    return out


def ample_masks(fiber_masks: np.ndarray, nbits: int) -> np.ndarray:
    masks = np.arange(1, 1 << nbits, dtype=np.int64)
    keep = np.ones(masks.shape[0], dtype=np.bool_)
    for fm in fiber_masks:
        keep &= (masks & np.int64(fm)) != 0
    return masks[keep]


def lift_matches(nk: int, proj_idx: np.ndarray, targets: np.ndarray) -> np.ndarray:
    masks = np.arange(1 << nk, dtype=np.int64)
    keep = np.ones(masks.shape[0], dtype=np.bool_)
    for p in range(proj_idx.shape[0]):
        keep &= subset_images(nk, proj_idx[p]) == targets[p]
    return masks[keep]


def zeta_superset(vec: np.ndarray) -> np.ndarray:
    a = np.array(vec, copy=True)
    n = a.shape[0].bit_length() - 1
    for i in range(n):
        view = a.reshape(-1, 2, 1 << i)
        view[:, 0, :] += view[:, 1, :]
    return a


def mobius_superset(vec: np.ndarray) -> np.ndarray:
    a = np.array(vec, copy=True)
    n = a.shape[0].bit_length() - 1
    for i in range(n):
        view = a.reshape(-1, 2, 1 << i)
        view[:, 0, :] -= view[:, 1, :]
    return a


def _unpack(masks: np.ndarray, rows: int, cols: int) -> np.ndarray:
    shifts = np.arange(rows * cols, dtype=np.int64)
    bits = (masks[:, None] >> shifts[None, :]) & 1
    return bits.reshape(-1, rows, cols).astype(np.int32)


def sr_products(kind: int, r: int, k: int, c: int, left: np.ndarray, right: np.ndarray) -> np.ndarray:
    left = np.asarray(left, dtype=np.int64)
    right = np.asarray(right, dtype=np.int64)
    out = np.zeros((left.shape[0], right.shape[0]), dtype=np.int64)
    if left.shape[0] == 0 or right.shape[0] == 0:
        return out
    lb = _unpack(left, r, k)
    rb = _unpack(right, k, c)
    weights = np.int64(1) << np.arange(r * c, dtype=np.int64).reshape(r, c)
    chunk = max(1, 2_000_000 // max(1, right.shape[0] * r * c))
    for start in range(0, left.shape[0], chunk):
        counts = np.einsum("aik,bkj->abij", lb[start:start + chunk], rb)
        bits = (counts & 1) if kind == F2 else (counts > 0)
        out[start:start + chunk] = (bits.astype(np.int64) * weights).sum(axis=(2, 3))
    return out


def rref_mod_p(a: np.ndarray, p: int) -> tuple[np.ndarray, np.ndarray]:
    m = np.array(a, dtype=np.int64) % p
    nrows, ncols = m.shape
    pivots = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        nz = np.flatnonzero(m[r:, c])
        if nz.size == 0:
            continue
        i = r + nz[0]
        if i != r:
            m[[r, i]] = m[[i, r]]
        inv = pow(int(m[r, c]), p - 2, p)
        m[r] = (m[r] * inv) % p
        col = m[:, c].copy()
        col[r] = 0
        m = (m - np.outer(col, m[r])) % p
        pivots.append(c)
        r += 1
    return m, np.array(pivots, dtype=np.int64)
