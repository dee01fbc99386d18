"""Matrix monoids over F2 and the Boolean semiring, and their contracted algebras.

The contracted algebra of M_n has basis u_m for non-zero matrices m and
product u_a u_b = u_{ab} (zero when ab = 0). Its radical is found as the
kernel of the trace form t(u_a u_b), where t(u_p) = #{c != 0 : pc = c} is the
trace of left multiplication. ``phi`` sends m to the Y-indicator of its
support, linking the algebra to the matrix category.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Mapping, Sequence

import numpy as np

from . import kernels
from .errors import ArgumentError, CapacityError, IntegrityError
from .exact import fmt_q, int_matvec, kernel_basis
from .finsets import bits_of
from .measures import MU, NU, MeasureSpec
from .permcat import PermMatrix, indicator_matrix, trace, y_object

KINDS = {"f2": kernels.F2, "bool": kernels.BOOL}
KIND_NAMES = {kernels.F2: "f2", kernels.BOOL: "bool"}
MAX_ENUM_BITS = 25
MAX_GRAM_N = 3


def kind_of(name) -> int:
    if isinstance(name, int) and name in KIND_NAMES:
        return name
    try:
        return KINDS[str(name).lower()]
    except KeyError:
        raise ArgumentError(f"unknown semiring {name!r} (expected f2 or bool)") from None


def measure_for(kind: int) -> MeasureSpec:
    return MU if kind == kernels.F2 else NU


@dataclass(frozen=True)
class SRMatrix:
    """A rows x cols matrix over F2 or the Boolean semiring; bit i*cols + j holds entry (i, j)."""

    kind: int
    rows: int
    cols: int
    support: int
    row_shape: tuple[int, ...] = ()
    col_shape: tuple[int, ...] = ()

    def __post_init__(self):
        if self.kind not in KIND_NAMES:
            raise ArgumentError("kind must be F2 or BOOL")
        if self.rows < 1 or self.cols < 1:
            raise ArgumentError("matrix dimensions must be positive")
        if self.support < 0 or self.support >> (self.rows * self.cols):
            raise ArgumentError("support has bits outside the matrix")
        if not self.row_shape:
            object.__setattr__(self, "row_shape", (self.rows,))
        if not self.col_shape:
            object.__setattr__(self, "col_shape", (self.cols,))

    @classmethod
    def from_rows(cls, kind, rows: Sequence[Sequence[int]]) -> SRMatrix:
        kind = kind_of(kind)
        r, c = len(rows), len(rows[0])
        mask = 0
        for i, row in enumerate(rows):
            if len(row) != c:
                raise ArgumentError("ragged matrix")
            for j, x in enumerate(row):
                if x:
                    mask |= 1 << (i * c + j)
        return cls(kind, r, c, mask)

    @classmethod
    def identity(cls, kind, n: int) -> SRMatrix:
        return cls(kind_of(kind), n, n, sum(1 << (i * n + i) for i in range(n)))

    def to_rows(self) -> list[list[int]]:
        return [[self.support >> (i * self.cols + j) & 1 for j in range(self.cols)] for i in range(self.rows)]

    @property
    def is_zero(self) -> bool:
        return self.support == 0


def sr_multiply(a: SRMatrix, b: SRMatrix) -> SRMatrix:
    if a.kind != b.kind:
        raise ArgumentError("semiring mismatch")
    if a.cols != b.rows:
        raise ArgumentError(f"cannot multiply {a.rows}x{a.cols} by {b.rows}x{b.cols}")
    prod_ = kernels.sr_products(a.kind, a.rows, a.cols, b.cols, [a.support], [b.support])
    return SRMatrix(a.kind, a.rows, b.cols, int(prod_[0, 0]), a.row_shape, b.col_shape)


def sr_kron(a: SRMatrix, b: SRMatrix) -> SRMatrix:
    """Kronecker product; row (i1, i2) is i1*b.rows + i2, and likewise for columns."""
    if a.kind != b.kind:
        raise ArgumentError("semiring mismatch")
    rows, cols = a.rows * b.rows, a.cols * b.cols
    mask = 0
    for x in bits_of(a.support):
        i1, j1 = divmod(x, a.cols)
        for y in bits_of(b.support):
            i2, j2 = divmod(y, b.cols)
            mask |= 1 << ((i1 * b.rows + i2) * cols + j1 * b.cols + j2)
    return SRMatrix(a.kind, rows, cols, mask, a.row_shape + b.row_shape, a.col_shape + b.col_shape)


def enumerate_nonzero(kind, n: int) -> list[SRMatrix]:
    kind = kind_of(kind)
    if n < 1:
        raise ArgumentError("n must be >= 1")
    if n * n > MAX_ENUM_BITS:
        raise CapacityError(f"enumerating {n}x{n} matrices", n * n, MAX_ENUM_BITS)
    return [SRMatrix(kind, n, n, m) for m in range(1, 1 << (n * n))]


def phi(a: SRMatrix) -> PermMatrix:
    """1_{Y(supp a)} as a matrix Y(cols) -> Y(rows); zero matrix for a = 0."""
    return indicator_matrix(measure_for(a.kind), a.col_shape, a.row_shape, a.support, "Y")


# --- contracted monoid algebra -----------------------------------------------


@dataclass(frozen=True)
class MonAlgElement:
    """Rational combination of basis elements u_m, keyed by the non-zero support mask m."""

    kind: int
    n: int
    terms: Mapping[int, Fraction] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for m, c in self.terms.items():
            m, c = int(m), Fraction(c)
            if m == 0:
                raise ArgumentError("the zero matrix is not a basis element")
            if m >> (self.n * self.n):
                raise ArgumentError("basis mask outside the matrix")
            if c:
                clean[m] = c
        object.__setattr__(self, "terms", dict(sorted(clean.items())))

    @classmethod
    def basis(cls, kind, n: int, m: int) -> MonAlgElement:
        return cls(kind_of(kind), n, {m: Fraction(1)})

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: MonAlgElement) -> MonAlgElement:
        self._check(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, 0) + c
        return MonAlgElement(self.kind, self.n, out)

    def scale(self, k) -> MonAlgElement:
        return MonAlgElement(self.kind, self.n, {m: c * Fraction(k) for m, c in self.terms.items()})

    def __mul__(self, other: MonAlgElement) -> MonAlgElement:
        self._check(other)
        if self.is_zero() or other.is_zero():
            return MonAlgElement(self.kind, self.n, {})
        left, right = list(self.terms), list(other.terms)
        prods = kernels.sr_products(self.kind, self.n, self.n, self.n, left, right)
        out: dict[int, Fraction] = {}
        lc, rc = list(self.terms.values()), list(other.terms.values())
        for i in range(len(left)):
            for j in np.flatnonzero(prods[i]):
                p = int(prods[i, j])
                out[p] = out.get(p, 0) + lc[i] * rc[j]
        return MonAlgElement(self.kind, self.n, out)

    def power(self, k: int) -> MonAlgElement:
        result = None
        base = self
        while k:
            if k & 1:
                result = base if result is None else result * base
            k >>= 1
            if k:
                base = base * base
        if result is None:
            raise ArgumentError("power needs k >= 1 (the contracted algebra has no unit in general)")
        return result

    def _check(self, other: MonAlgElement) -> None:
        if self.kind != other.kind or self.n != other.n:
            raise ArgumentError("elements live in different algebras")

    def to_json(self) -> dict:
        return {"terms": [{"mask_hex": format(m, "x"), "coeff": fmt_q(c)} for m, c in self.terms.items()]}


def nilpotency_exponent(r: MonAlgElement, limit: int | None = None) -> int | None:
    """Smallest k with r^k = 0, found by repeated multiplication up to ``limit`` (default: dimension)."""
    limit = (1 << (r.n * r.n)) - 1 if limit is None else limit
    if r.is_zero():
        return 1
    p = r
    for k in range(2, limit + 1):
        p = p * r
        if p.is_zero():
            return k
    return None


def is_nilpotent_by_squaring(r: MonAlgElement) -> bool:
    """Square until zero; nilpotent elements vanish within log2(dimension)+1 squarings."""
    dim = (1 << (r.n * r.n)) - 1
    p = r
    for _ in range(dim.bit_length() + 1):
        if p.is_zero():
            return True
        p = p * p
    return p.is_zero()


def phi_linear(r: MonAlgElement) -> PermMatrix:
    m = measure_for(r.kind)
    out = PermMatrix.zero(m, y_object(r.n), y_object(r.n))
    for mask, c in r.terms.items():
        out = out + phi(SRMatrix(r.kind, r.n, r.n, mask)).scale(c)
    return out


# --- structure analysis -----------------------------------------------------


@lru_cache(maxsize=8)
def multiplication_table(kind: int, n: int) -> np.ndarray:
    """T[a-1, b-1] = mask of u_a u_b (0 when the product vanishes)."""
    kind = kind_of(kind)
    if n > MAX_GRAM_N:
        raise CapacityError(f"multiplication table of {n}x{n} matrices", n * n, MAX_GRAM_N ** 2)
    masks = np.arange(1, 1 << (n * n), dtype=np.int64)
    return kernels.sr_products(kind, n, n, n, masks, masks)


@lru_cache(maxsize=8)
def fixed_counts(kind: int, n: int) -> np.ndarray:
    """t[p] = #{c != 0 : p c = c}, the trace of left multiplication by u_p (t[0] = 0)."""
    table = multiplication_table(kind, n)
    dim = table.shape[0]
    cols = np.arange(1, dim + 1, dtype=np.int64)
    out = np.zeros(dim + 1, dtype=np.int64)
    out[1:] = (table == cols[None, :]).sum(axis=1)
    return out


@lru_cache(maxsize=8)
def gram_matrix(kind, n: int) -> np.ndarray:
    kind = kind_of(kind)
    return fixed_counts(kind, n)[multiplication_table(kind, n)]


@dataclass(frozen=True)
class AlgebraReport:
    kind: int
    n: int
    algebra_dim: int
    radical_dim: int
    semisimple: bool
    certificate: str
    certificate_prime: int | None = None

    def __post_init__(self):
        if self.algebra_dim != (1 << (self.n * self.n)) - 1:
            raise IntegrityError("algebra dimension is not 2^(n^2) - 1")
        if self.semisimple != (self.radical_dim == 0):
            raise IntegrityError("semisimple flag disagrees with the radical dimension")

    def to_json(self) -> dict:
        out = {
            "kind": KIND_NAMES[self.kind],
            "n": self.n,
            "algebra_dim": self.algebra_dim,
            "radical_dim": self.radical_dim,
            "semisimple": self.semisimple,
            "certificate": self.certificate,
        }
        if self.certificate_prime is not None:
            out["certificate_prime"] = self.certificate_prime
        return out


@lru_cache(maxsize=8)
def _radical(kind: int, n: int) -> tuple[tuple[MonAlgElement, ...], dict]:
    g = gram_matrix(kind, n)
    basis, info = kernel_basis(g)
    elems = []
    for v in basis:
        if any(int_matvec(g, v)):
            raise IntegrityError("kernel vector does not annihilate the trace form")
        r = MonAlgElement(kind, n, {i + 1: c for i, c in enumerate(v) if c})
        if not is_nilpotent_by_squaring(r):
            raise IntegrityError(f"radical element {r.terms} is not nilpotent")
        elems.append(r)
    return tuple(elems), info


def radical_basis(kind, n: int) -> list[MonAlgElement]:
    """Exact basis of the radical, one element per free column of the reduced trace form."""
    return list(_radical(kind_of(kind), n)[0])


def semisimplicity_report(kind, n: int) -> AlgebraReport:
    kind = kind_of(kind)
    dim = (1 << (n * n)) - 1
    basis, info = _radical(kind, n)
    if info["rank_mod_p"] == dim:
        cert = f"trace form has full rank {dim} modulo p = {info['prime']}"
        return AlgebraReport(kind, n, dim, 0, True, cert, info["prime"])
    cert = (f"{len(basis)} exact kernel vectors of the trace form ({info['method']} lift), "
            f"each verified nilpotent; rank mod p = {info['rank_mod_p']} bounds the nullity")
    return AlgebraReport(kind, n, dim, len(basis), len(basis) == 0, cert, info["prime"])


@dataclass(frozen=True)
class TraceWitness:
    element: MonAlgElement
    image: PermMatrix
    trace: Fraction
    trace_closed: Fraction
    nilpotency_exponent: int
    index: int

    def to_json(self) -> dict:
        return {
            "terms": self.element.to_json()["terms"],
            "nilpotency_exponent": self.nilpotency_exponent,
            "trace": fmt_q(self.trace),
            "radical_basis_index": self.index,
        }


def find_trace_witness(n: int = 3, kind="bool") -> TraceWitness | None:
    """A radical element whose image under phi has non-zero categorical trace.

    Scans the radical basis in order. The trace is linear, so if every basis
    element had trace zero then so would every combination; no pairwise
    search is needed. Returns None when the radical is zero.
    """
    kind = kind_of(kind)
    basis = radical_basis(kind, n)
    if not basis:
        return None
    for idx, r in enumerate(basis):
        closed = _closed_trace(r)
        if closed == 0:
            continue
        image = phi_linear(r)
        tr = trace(image, "categorical")
        if tr != trace(image, "closed"):
            raise IntegrityError("categorical and closed-form traces disagree")
        k = nilpotency_exponent(r)
        if k is None:
            raise IntegrityError("radical element is not nilpotent")
        return TraceWitness(r, image, tr, closed, k, idx)
    raise IntegrityError("no radical element has non-zero trace")


def _closed_trace(r: MonAlgElement) -> Fraction:
    """Trace of phi_linear(r) without building it: each u_m contributes the trace of 1_{Y(m)}."""
    m = measure_for(r.kind)
    total = Fraction(0)
    for mask, c in r.terms.items():
        total += c * indicator_trace(m, r.n, mask)
    return total


def indicator_trace(m: MeasureSpec, n: int, mask: int) -> Fraction:
    """Closed-form trace of 1_{Y(D)} on Y(n): sum over non-empty diagonal strata of D."""
    diag = [i for i in range(n) if mask >> (i * n + i) & 1]
    k = len(diag)
    # strata inside the diagonal part: one per non-empty subset C, weight alpha^(|C|-1)
    total = Fraction(0)
    for size in range(1, k + 1):
        total += comb(k, size) * m.piece(size)
    return total
