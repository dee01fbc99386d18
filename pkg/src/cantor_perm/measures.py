"""The two regular measures on transitive pieces, and the ring they span.

A measure is fixed by one parameter alpha: X(n) has measure alpha**(n-1)
and a surjection X(n) -> X(m) has measure alpha**(n-m). Only alpha = -2
(``mu``) and alpha = -1 (``nu``) pass the regularity test; that fact is
re-derived here from the live decomposition engine rather than stored.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial

import sympy

from .errors import ArgumentError, IntegrityError
from .exact import fmt_q
from .gsets import FormalGSet, GMap, QuotientDescription, elementary_map, x_product_decompose, y_set_decompose

_NAMES = {-2: "mu", -1: "nu"}


@dataclass(frozen=True)
class MeasureSpec:
    alpha: int
    name: str

    def __post_init__(self):
        if _NAMES.get(self.alpha) != self.name:
            raise ArgumentError(f"no measure named {self.name!r} with alpha={self.alpha}")

    def piece(self, n: int) -> Fraction:
        return Fraction(self.alpha) ** (n - 1)


MU = MeasureSpec(-2, "mu")
NU = MeasureSpec(-1, "nu")


def measure_by_name(name: str) -> MeasureSpec:
    name = name.lower()
    if name == "mu":
        return MU
    if name == "nu":
        return NU
    raise ArgumentError(f"unknown measure {name!r} (expected mu or nu)")


def eval_measure(m: MeasureSpec, s: FormalGSet) -> Fraction:
    return sum((mult * m.piece(p.size) for p, mult in s.pieces), Fraction(0))


def map_measure(m: MeasureSpec, f: GMap) -> Fraction:
    # base-change invariance makes this depend on the sizes alone
    return Fraction(m.alpha) ** (f.source_size - f.target_size)


def y_measure(m: MeasureSpec, n: int, method: str = "closed_form") -> Fraction:
    if n < 0:
        raise ArgumentError("n must be >= 0")
    if method == "decompose":
        return eval_measure(m, y_set_decompose(n))
    if method != "closed_form":
        raise ArgumentError(f"unknown method {method!r}")
    if n == 0:
        return Fraction(0)
    if m.name == "mu":
        return Fraction(n % 2)
    return Fraction(1)


def quotient_measure(m: MeasureSpec, q: QuotientDescription) -> Fraction:
    return m.piece(q.base) / q.order


# --- regularity -------------------------------------------------------------

ALPHA = sympy.Symbol("alpha")


@dataclass(frozen=True)
class RegularityConstraint:
    case: str
    n: int
    decomposition: FormalGSet
    poly: sympy.Poly  # already divided by the largest power of alpha

    def residual(self, value) -> Fraction:
        return Fraction(str(self.poly.eval(sympy.Rational(str(Fraction(value))))))


def regularity_constraints(max_n: int = 5) -> list[RegularityConstraint]:
    """Constraints mu(X x_W Y) * mu(W) = mu(X) * mu(Y) on elementary squares.

    Here X = X(n), Y = X(n), W = X(n-1). The fiber product is decomposed by
    ``x_product_decompose`` and each piece contributes alpha**(size-1).
    Regular measures are invertible on X(k), so powers of alpha may be
    cancelled.
    """
    out = []
    for n in range(2, max_n + 1):
        cases = [("same_point", elementary_map(n, 0), elementary_map(n, 0))]
        if n >= 3:
            cases.append(("distinct_points", elementary_map(n, 0), elementary_map(n, 1)))
        for case, f, g in cases:
            z = x_product_decompose(f, g)
            lhs = sum(mult * ALPHA ** (p.size - 1) for p, mult in z.pieces) * ALPHA ** (n - 2)
            rhs = ALPHA ** (n - 1) * ALPHA ** (n - 1)
            poly = sympy.Poly(sympy.expand(lhs - rhs), ALPHA)
            if not poly.is_zero:
                low = min(mon[0] for mon in poly.monoms())
                poly = sympy.Poly(sympy.expand(poly.as_expr() / ALPHA ** low), ALPHA)
            out.append(RegularityConstraint(case, n, z, poly))
    return out


def solve_regular_parameters(max_n: int = 5) -> list[Fraction]:
    """Rational alphas (alpha != 0) satisfying every generated constraint, ascending."""
    polys = [c.poly for c in regularity_constraints(max_n) if not c.poly.is_zero]
    if not polys:
        raise IntegrityError("no non-trivial regularity constraint was generated")
    common = polys[0]
    for p in polys[1:]:
        common = sympy.gcd(common, p)
    roots = sympy.Poly(common, ALPHA).ground_roots() if common.degree() > 0 else {}
    vals = sorted(Fraction(str(r)) for r in roots if r.is_rational and r != 0)
    return vals


# --- the ring spanned by (mu, nu) ------------------------------------------


@dataclass(frozen=True)
class ThetaElement:
    """An element of the image of (mu, nu); the mu coordinate must have odd denominator."""

    mu: Fraction
    nu: Fraction

    def __post_init__(self):
        object.__setattr__(self, "mu", Fraction(self.mu))
        object.__setattr__(self, "nu", Fraction(self.nu))
        if self.mu.denominator % 2 == 0:
            raise IntegrityError(f"mu coordinate {self.mu} has even denominator")

    def __add__(self, other: ThetaElement) -> ThetaElement:
        return ThetaElement(self.mu + other.mu, self.nu + other.nu)

    def __mul__(self, other: ThetaElement) -> ThetaElement:
        return ThetaElement(self.mu * other.mu, self.nu * other.nu)

    @classmethod
    def scalar(cls, k) -> ThetaElement:
        return cls(Fraction(k), Fraction(k))

    def to_json(self) -> dict:
        return {"mu": fmt_q(self.mu), "nu": fmt_q(self.nu)}


def theta_of(obj) -> ThetaElement:
    if isinstance(obj, FormalGSet):
        return ThetaElement(eval_measure(MU, obj), eval_measure(NU, obj))
    if isinstance(obj, QuotientDescription):
        return ThetaElement(quotient_measure(MU, obj), quotient_measure(NU, obj))
    if isinstance(obj, GMap):
        return ThetaElement(map_measure(MU, obj), map_measure(NU, obj))
    raise ArgumentError(f"cannot take theta of {type(obj).__name__}")


def theta_arith(a: ThetaElement, b: ThetaElement, op: str) -> ThetaElement:
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    raise ArgumentError(f"unknown op {op!r}")


def theta_c(n: int) -> ThetaElement:
    """(1/n!) * ((-2)**n, (-1)**n)."""
    k = factorial(n)
    return ThetaElement(Fraction((-2) ** n, k), Fraction((-1) ** n, k))


def point_stabilizer_quotient(n: int) -> QuotientDescription:
    """X(n+1)/S_n with S_n permuting the first n points and fixing the last."""
    from itertools import permutations

    group = tuple(tuple(p) + (n,) for p in permutations(range(n)))
    return QuotientDescription(n + 1, group)
