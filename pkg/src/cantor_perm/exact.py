"""Exact rational helpers: "p/q" formatting, fraction-free elimination, modular rank."""

from __future__ import annotations

from fractions import Fraction
from math import gcd, isqrt
from typing import Sequence

import numpy as np

from . import kernels
from .errors import ArgumentError

# largest prime below 2**31: products of two residues stay inside int64
CERT_PRIME = 2147483647


def fmt_q(x) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def parse_q(text) -> Fraction:
    if isinstance(text, (int, Fraction)):
        return Fraction(text)
    try:
        return Fraction(str(text).strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ArgumentError(f"bad rational {text!r}") from exc


def rank_mod_p(matrix, p: int = CERT_PRIME) -> tuple[int, np.ndarray, np.ndarray]:
    """Rank of an integer matrix over F_p, plus the reduced echelon form and pivot columns."""
    a = np.asarray(matrix, dtype=np.int64)
    rref, pivots = kernels.rref_mod_p(a % p, p)
    return len(pivots), rref, pivots


def bareiss(matrix: Sequence[Sequence[int]]) -> tuple[list[list[int]], list[int]]:
    """Fraction-free Gauss-Jordan elimination over Z.

    Returns (M, pivots) where each pivot row of M equals d times the
    reduced row echelon row, d being the last pivot value. All divisions are
    exact (Bareiss' identity); entries are bounded by minors of the input.
    """
    m = np.array([[int(x) for x in row] for row in matrix], dtype=object)
    if m.size == 0:
        return [], []
    nrows, ncols = m.shape
    prev = 1
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        nz = np.flatnonzero(m[r:, c] != 0)
        if nz.size == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            m[[r, i]] = m[[i, r]]
        pc = m[r, c]
        others = [k for k in range(nrows) if k != r]
        f = m[others, c].reshape(-1, 1)
        m[others, :] = (pc * m[others, :] - f * m[r, :]) // prev
        # rows above r were scaled by pc/prev as well, keeping all pivots equal
        pivots.append(c)
        prev = pc
        r += 1
    return [list(row) for row in m[:r]], pivots


def kernel_from_rref_scaled(rows: list[list[int]], pivots: list[int], ncols: int) -> list[list[Fraction]]:
    """Kernel basis with one vector per free column (that coordinate 1, other free ones 0)."""
    pivset = set(pivots)
    basis = []
    for f in range(ncols):
        if f in pivset:
            continue
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for row, c in zip(rows, pivots):
            if row[f]:
                v[c] = Fraction(-row[f], row[c])
        basis.append(v)
    return basis


def rational_reconstruct(a: int, m: int) -> Fraction | None:
    """Smallest n/d with n = a*d mod m and |n|, d <= sqrt(m/2), if it exists."""
    a %= m
    bound = isqrt(m // 2)
    r0, r1, s0, s1 = m, a, 0, 1
    while r1 > bound:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        s0, s1 = s1, s0 - q * s1
    if s1 == 0 or abs(s1) > bound or gcd(r1, abs(s1)) != 1:
        return None
    return Fraction(r1, s1)


def int_matvec(matrix: np.ndarray, v: Sequence[Fraction]) -> list[Fraction]:
    den = 1
    for x in v:
        den = den * x.denominator // gcd(den, x.denominator)
    w = np.array([int(x * den) for x in v], dtype=object)
    prod_ = np.asarray(matrix, dtype=object).dot(w)
    return [Fraction(int(x), den) for x in prod_]


def kernel_basis(matrix, p: int = CERT_PRIME) -> tuple[list[list[Fraction]], dict]:
    """Exact kernel of an integer matrix, canonical (reduced echelon) form.

    The pivot structure is read modulo ``p``; vectors are lifted by rational
    reconstruction and then checked exactly over Z. Their number equals the
    nullity mod p, which bounds the rational nullity from above, so a
    successful check proves the basis complete. If the lift fails, fall back
    to fraction-free elimination over Z.
    """
    a = np.asarray(matrix, dtype=np.int64)
    ncols = a.shape[1]
    rank, rref, pivots = rank_mod_p(a, p)
    info = {"prime": p, "rank_mod_p": rank, "method": "modular"}
    pivots = [int(c) for c in pivots]
    pivset = set(pivots)
    basis = []
    ok = True
    for f in range(ncols):
        if f in pivset:
            continue
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for i, c in enumerate(pivots):
            val = int(rref[i, f])
            if val:
                x = rational_reconstruct(-val, p)
                if x is None:
                    ok = False
                    break
                v[c] = x
        if not ok or any(int_matvec(a, v)):
            ok = False
            break
        basis.append(v)
    if ok:
        return basis, info
    rows, piv = bareiss(a.tolist())
    info.update(method="bareiss", rank=len(piv))
    return kernel_from_rref_scaled(rows, piv, ncols), info


def solve_in_span(vectors: Sequence[Sequence[Fraction]], target: Sequence[Fraction]) -> list[Fraction] | None:
    """Coefficients c with sum c_i vectors_i = target, or None; exact Gaussian elimination."""
    k = len(vectors)
    n = len(target)
    rows = [[Fraction(vectors[i][j]) for i in range(k)] + [Fraction(target[j])] for j in range(n)]
    piv_cols = []
    r = 0
    for c in range(k):
        pr = next((i for i in range(r, n) if rows[i][c] != 0), None)
        if pr is None:
            continue
        rows[r], rows[pr] = rows[pr], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [x * inv for x in rows[r]]
        for i in range(n):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        piv_cols.append(c)
        r += 1
    if any(rows[i][k] != 0 for i in range(r, n)):
        return None
    coeffs = [Fraction(0)] * k
    for i, c in enumerate(piv_cols):
        coeffs[c] = rows[i][k]
    return coeffs
