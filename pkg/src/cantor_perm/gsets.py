"""Finitary G-sets built from the transitive pieces X(A).

A G-set is stored as a formal sum of pieces X(A). All the G-equivariant
structure is reduced to finite combinatorics:

* orbits on X(A) x_{X(C)} X(B) are the ample subsets of A x_C B;
* Y(A) splits as the sum of X(C) over non-empty C in A;
* equivariant equivalence relations on X(A) are families of ample subsets
  of A x A, and their quotients are X(B)/Gamma for a permutation group Gamma.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from itertools import permutations
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from ._config import DEFAULT_LIFT_BITS, budget_bits
from .errors import ArgumentError, CapacityError
from .finsets import (
    FinSet,
    ProductSubset,
    SetMap,
    ample_masks_within,
    bits_of,
    enumerate_ample,
    fiber_product_subset,
    hex_to_mask,
    is_ample,
    mask_to_hex,
    popcount,
)


@dataclass(frozen=True)
class TransitivePiece:
    """X(L) for a finite set L of ``size`` points.

    ``tag`` records where L sits when the piece is a stratum: C inside A for
    Y(A), D inside A x B for a product orbit. ``copy`` tells apart repeated
    summands with the same tag; it has one entry per tag factor.
    """

    size: int
    tag: ProductSubset | None = None
    copy: tuple[int, ...] = ()

    def __post_init__(self):
        if self.size < 1:
            raise ArgumentError("X(empty set) does not exist; piece size must be >= 1")
        if self.tag is not None and len(self.tag) != self.size:
            raise ArgumentError(f"tag has {len(self.tag)} points but piece size is {self.size}")

    @property
    def sort_key(self):
        return (self.size, self.tag.mask if self.tag is not None else -1)

    def resolved_tag(self) -> ProductSubset:
        return self.tag if self.tag is not None else ProductSubset.full((self.size,))

    def to_json(self) -> dict:
        out: dict = {"size": self.size}
        if self.tag is not None:
            out["ambient_tag"] = mask_to_hex(self.tag.mask)
            out["ambient_factors"] = list(self.tag.factor_sizes)
        if any(self.copy):
            out["copy"] = list(self.copy)
        return out

    @classmethod
    def from_json(cls, data: dict) -> TransitivePiece:
        tag = None
        if "ambient_tag" in data:
            factors = data.get("ambient_factors")
            if factors is None:
                raise ArgumentError("ambient_tag needs ambient_factors to be interpreted")
            tag = ProductSubset(tuple(factors), hex_to_mask(data["ambient_tag"]))
        return cls(int(data["size"]), tag, tuple(data.get("copy", ())))


def X(n: int) -> TransitivePiece:
    return TransitivePiece(n)


@dataclass(frozen=True)
class FormalGSet:
    """A finite multiset of transitive pieces."""

    pieces: tuple[tuple[TransitivePiece, int], ...] = ()

    def __post_init__(self):
        merged: Counter = Counter()
        for piece, mult in self.pieces:
            if mult <= 0:
                raise ArgumentError("multiplicities must be positive")
            merged[piece] += mult
        ordered = tuple(sorted(merged.items(), key=lambda kv: kv[0].sort_key))
        object.__setattr__(self, "pieces", ordered)

    @classmethod
    def of(cls, items: Iterable[TransitivePiece | int]) -> FormalGSet:
        return cls(tuple((p if isinstance(p, TransitivePiece) else X(p), 1) for p in items))

    @classmethod
    def from_sizes(cls, counts: dict[int, int]) -> FormalGSet:
        return cls(tuple((X(n), m) for n, m in counts.items() if m))

    def size_counts(self) -> dict[int, int]:
        out: Counter = Counter()
        for piece, mult in self.pieces:
            out[piece.size] += mult
        return dict(sorted(out.items()))

    def untagged(self) -> FormalGSet:
        return FormalGSet.from_sizes(self.size_counts())

    def expand(self) -> list[TransitivePiece]:
        return [p for p, m in self.pieces for _ in range(m)]

    def __add__(self, other: FormalGSet) -> FormalGSet:
        return FormalGSet(self.pieces + other.pieces)

    def __len__(self):
        return sum(m for _, m in self.pieces)

    def __str__(self):
        if not self.pieces:
            return "0"
        terms = []
        for n, m in sorted(self.size_counts().items(), reverse=True):
            terms.append(f"X({n})" if m == 1 else f"{m}*X({n})")
        return " + ".join(terms)

    def to_json(self) -> list[dict]:
        return [dict(p.to_json(), multiplicity=m) for p, m in self.pieces]

    @classmethod
    def from_json(cls, data: list[dict]) -> FormalGSet:
        return cls(tuple((TransitivePiece.from_json(d), int(d.get("multiplicity", 1))) for d in data))


@dataclass(frozen=True)
class GMap:
    """The equivariant map X(f): X(A) -> X(B); f must be a surjection."""

    underlying: SetMap

    def __post_init__(self):
        if not self.underlying.surjective or self.underlying.dom.size == 0:
            raise ArgumentError("maps of X-sets come from surjections of non-empty sets")

    @classmethod
    def from_table(cls, table: Sequence[int], cod_size: int | None = None) -> GMap:
        return cls(SetMap.from_table(table, cod_size))

    @property
    def source_size(self) -> int:
        return self.underlying.dom.size

    @property
    def target_size(self) -> int:
        return self.underlying.cod.size

    def compose(self, inner: GMap) -> GMap:
        return GMap(self.underlying.compose(inner.underlying))

    def distinguished_point(self) -> int | None:
        if self.source_size != self.target_size + 1:
            return None
        counts = Counter(self.underlying.table)
        return next(b for b, c in counts.items() if c == 2)


def elementary_map(n: int, point: int) -> GMap:
    """The elementary surjection [n] -> [n-1] sending n-1 to ``point`` (its distinguished point)."""
    if n < 2 or not 0 <= point < n - 1:
        raise ArgumentError("need n >= 2 and a distinguished point below n-1")
    return GMap.from_table(list(range(n - 1)) + [point], n - 1)


def x_product_decompose(f: GMap, g: GMap, budget: int | None = None) -> FormalGSet:
    """Orbits of X(A) x_{X(C)} X(B): one X(D) per ample D inside A x_C B, tagged by D."""
    if f.underlying.cod != g.underlying.cod:
        raise ArgumentError("fiber product needs a shared codomain")
    fp = fiber_product_subset(f.underlying, g.underlying)
    sizes = fp.factor_sizes
    masks = ample_masks_within(fp.mask, sizes, budget=budget)
    return FormalGSet(tuple((TransitivePiece(popcount(m), ProductSubset(sizes, m)), 1) for m in masks))


def multiway_orbit_decompose(labels: Sequence[FinSet | int], budget: int | None = None) -> list[ProductSubset]:
    sizes = tuple(l.size if isinstance(l, FinSet) else int(l) for l in labels)
    return enumerate_ample(sizes, budget=budget)


def y_subsets(n: int) -> list[int]:
    """Non-empty subsets of [n] in (size, mask) order."""
    return sorted(range(1, 1 << n), key=lambda m: (popcount(m), m))


def y_set_decompose(a: FinSet | int) -> FormalGSet:
    n = a.size if isinstance(a, FinSet) else int(a)
    return FormalGSet(tuple(
        (TransitivePiece(popcount(c), ProductSubset((n,), c)), 1) for c in y_subsets(n)
    ))


# --- equivalence relations -------------------------------------------------


def diagonal_mask(n: int) -> int:
    return sum(1 << (i * n + i) for i in range(n))


def transpose_mask(mask: int, n: int) -> int:
    out = 0
    for k in bits_of(mask):
        x, y = divmod(k, n)
        out |= 1 << (y * n + x)
    return out


def graph_mask(perm: Sequence[int]) -> int:
    n = len(perm)
    return sum(1 << (x * n + perm[x]) for x in range(n))


@dataclass(frozen=True)
class EqRelFamily:
    """A G-stable relation on X(A), given by its set of orbits (ample subsets of A x A)."""

    base: int
    members: frozenset[int] = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "members", frozenset(int(m) for m in self.members))
        if self.base < 1:
            raise ArgumentError("base set must be non-empty")
        for m in self.members:
            if not is_ample(ProductSubset((self.base, self.base), m)):
                raise ArgumentError(f"member {m:#x} is not ample in A x A")

    def sorted_members(self) -> list[int]:
        return sorted(self.members)

    def to_json(self) -> dict:
        return {"base_size": self.base, "members": [mask_to_hex(m) for m in self.sorted_members()]}

    @classmethod
    def from_json(cls, data: dict) -> EqRelFamily:
        return cls(int(data["base_size"]), frozenset(hex_to_mask(h) for h in data["members"]))


@dataclass(frozen=True)
class QuotientDescription:
    """X(B)/Gamma, with Gamma a permutation group on B (tuples of images)."""

    base: int
    group: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        group = tuple(sorted(set(tuple(int(x) for x in g) for g in self.group)))
        object.__setattr__(self, "group", group)
        check_group(self.base, group)

    @property
    def order(self) -> int:
        return len(self.group)


def check_group(n: int, group: Iterable[Sequence[int]]) -> None:
    elems = {tuple(g) for g in group}
    ident = tuple(range(n))
    for g in elems:
        if sorted(g) != list(range(n)):
            raise ArgumentError(f"{g} is not a permutation of [{n}]")
    if ident not in elems:
        raise ArgumentError("group must contain the identity")
    for g in elems:
        inv = [0] * n
        for i, gi in enumerate(g):
            inv[gi] = i
        if tuple(inv) not in elems:
            raise ArgumentError("group is not closed under inverses")
        for h in elems:
            if tuple(g[h[i]] for i in range(n)) not in elems:
                raise ArgumentError("group is not closed under composition")


def _chain_points(e1: int, e2: int, n: int) -> list[tuple[int, int, int]]:
    """Triples (x, y, z) with (x, y) in e1 and (y, z) in e2."""
    out = []
    for k1 in bits_of(e1):
        x, y = divmod(k1, n)
        for z in range(n):
            if e2 >> (y * n + z) & 1:
                out.append((x, y, z))
    return out


def chain_compositions(e1: int, e2: int, n: int, method: str = "auto", budget: int | None = None) -> set[int]:
    """All p13(F) for F inside the chain set of (e1, e2) with p12(F) = e1 and p23(F) = e2.

    ``exhaustive`` enumerates every subset of the chain set. ``maximal`` uses
    that a composite E3 is reachable iff the largest F over E3 already has
    the right projections (projections are monotone in F).
    """
    chain = _chain_points(e1, e2, n)
    limit = budget_bits(DEFAULT_LIFT_BITS) if budget is None else budget
    if method == "auto":
        method = "exhaustive" if len(chain) <= limit else "maximal"
    if method == "exhaustive":
        if len(chain) > limit:
            raise CapacityError("transitivity check over chain subsets", len(chain), limit)
        proj = np.array([[x * n + y for x, y, _ in chain], [y * n + z for _, y, z in chain]], dtype=np.int64)
        subs = kernels.lift_matches(len(chain), proj, np.array([e1, e2], dtype=np.int64))
        out = set()
        for sub in subs:
            e3 = 0
            for j in bits_of(int(sub)):
                e3 |= 1 << (chain[j][0] * n + chain[j][2])
            out.add(e3)
        return out
    if method == "maximal":
        reach = 0
        for x, _, z in chain:
            reach |= 1 << (x * n + z)
        out = set()
        sub = reach
        while sub:
            f12 = f23 = f13 = 0
            for x, y, z in chain:
                if sub >> (x * n + z) & 1:
                    f12 |= 1 << (x * n + y)
                    f23 |= 1 << (y * n + z)
                    f13 |= 1 << (x * n + z)
            if f12 == e1 and f23 == e2 and f13 == sub:
                out.add(sub)
            sub = (sub - 1) & reach
        return out
    raise ArgumentError(f"unknown method {method!r}")


def eqrel_validate(family: EqRelFamily, max_base: int | None = None, method: str = "auto") -> bool:
    n = family.base
    limit = 3 if max_base is None else max_base
    if n > limit:
        raise CapacityError(f"transitivity check on base of size {n}", n ** 3, limit ** 3)
    members = family.members
    if diagonal_mask(n) not in members:
        return False
    if any(transpose_mask(e, n) not in members for e in members):
        return False
    for e1 in family.sorted_members():
        for e2 in family.sorted_members():
            if not chain_compositions(e1, e2, n, method=method) <= members:
                return False
    return True


def eqrel_from_group(group: Iterable[Sequence[int]], n: int | None = None) -> EqRelFamily:
    group = [tuple(g) for g in group]
    if n is None:
        if not group:
            raise ArgumentError("empty group")
        n = len(group[0])
    check_group(n, group)
    return EqRelFamily(n, frozenset(graph_mask(g) for g in group))


def _is_small(family: EqRelFamily) -> bool:
    n = family.base
    for e in family.members:
        rows = [0] * n
        for k in bits_of(e):
            rows[k // n] += 1
        if any(r != 1 for r in rows):
            return False
    return True


def _perm_of_graph(mask: int, n: int) -> tuple[int, ...]:
    perm = [0] * n
    for k in bits_of(mask):
        x, y = divmod(k, n)
        perm[x] = y
    return tuple(perm)


def collapse_witness(family: EqRelFamily) -> tuple[int, int, int, int] | None:
    """First (E, a, b, c) with (a, b), (a, c) in E and b < c, in mask/index order."""
    n = family.base
    for e in family.sorted_members():
        for a in range(n):
            row = [y for y in range(n) if e >> (a * n + y) & 1]
            if len(row) >= 2:
                return e, a, row[0], row[1]
    return None


def collapse_map(n: int, b: int, c: int) -> SetMap:
    """Surjection [n] -> [n-1] identifying b and c (b < c)."""
    table = []
    for x in range(n):
        if x == c:
            x = b
        table.append(x if x < c else x - 1)
    return SetMap.from_table(table, n - 1)


def push_family(family: EqRelFamily, g: SetMap) -> EqRelFamily:
    n, m = family.base, g.cod.size
    pushed = set()
    for e in family.members:
        img = 0
        for k in bits_of(e):
            x, y = divmod(k, n)
            img |= 1 << (g(x) * m + g(y))
        pushed.add(img)
    return EqRelFamily(m, frozenset(pushed))


def fiber_square_family(g: SetMap) -> EqRelFamily:
    """All ample subsets of A x_B A: the relation X(A) x_{X(B)} X(A)."""
    n = g.dom.size
    fp = fiber_product_subset(g, g)
    return EqRelFamily(n, frozenset(ample_masks_within(fp.mask, (n, n))))


def eqrel_classify(family: EqRelFamily, validate: bool = True) -> QuotientDescription:
    if validate and not eqrel_validate(family):
        raise ArgumentError("family does not describe an equivalence relation")
    while not _is_small(family):
        _, _, b, c = collapse_witness(family)
        family = push_family(family, collapse_map(family.base, b, c))
    n = family.base
    return QuotientDescription(n, tuple(_perm_of_graph(e, n) for e in family.members))


def symmetric_group(n: int) -> list[tuple[int, ...]]:
    return [tuple(p) for p in permutations(range(n))]


def subgroups(n: int) -> list[tuple[tuple[int, ...], ...]]:
    """All subgroups of S_n (tiny n only), each as a sorted tuple of permutations."""
    elems = symmetric_group(n)
    found = set()
    # every subgroup of S_n for n <= 3 is generated by at most two elements
    for a in elems:
        for b in elems:
            group = _generate(n, [a, b])
            found.add(tuple(sorted(group)))
    return sorted(found, key=lambda g: (len(g), g))


def _generate(n: int, gens: Sequence[tuple[int, ...]]) -> set[tuple[int, ...]]:
    group = {tuple(range(n))}
    frontier = list(group)
    while frontier:
        g = frontier.pop()
        for h in gens:
            prod_ = tuple(g[h[i]] for i in range(n))
            if prod_ not in group:
                group.add(prod_)
                frontier.append(prod_)
    return group
