"""Finite sets, maps between them, and bitmask-encoded subsets of finite products.

A subset of ``[n1] x ... x [nk]`` is an integer mask. The tuple
``(a1, ..., ak)`` sits at bit ``((a1*n2 + a2)*n3 + ...)*nk + ak``, so the last
coordinate varies fastest. Every enumeration order in the package derives
from this convention.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product
from math import comb, prod
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from ._config import DEFAULT_ENUM_BITS, MAX_KERNEL_BITS, budget_bits
from .errors import ArgumentError, CapacityError


@dataclass(frozen=True, order=True)
class FinSet:
    size: int

    def __post_init__(self):
        if self.size < 0:
            raise ArgumentError(f"FinSet size must be >= 0, got {self.size}")

    def __len__(self):
        return self.size

    def __iter__(self):
        return iter(range(self.size))


@dataclass(frozen=True)
class SetMap:
    """A map ``dom -> cod`` given by its value table."""

    dom: FinSet
    cod: FinSet
    table: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "table", tuple(int(t) for t in self.table))
        if len(self.table) != self.dom.size:
            raise ArgumentError(f"table has {len(self.table)} entries, domain has {self.dom.size}")
        for t in self.table:
            if not 0 <= t < self.cod.size:
                raise ArgumentError(f"table entry {t} outside codomain of size {self.cod.size}")

    @classmethod
    def from_table(cls, table: Sequence[int], cod_size: int | None = None) -> SetMap:
        table = tuple(int(t) for t in table)
        if cod_size is None:
            cod_size = max(table) + 1 if table else 0
        return cls(FinSet(len(table)), FinSet(cod_size), table)

    @classmethod
    def identity(cls, n: int) -> SetMap:
        return cls(FinSet(n), FinSet(n), tuple(range(n)))

    @property
    def surjective(self) -> bool:
        return len(set(self.table)) == self.cod.size

    def __call__(self, x: int) -> int:
        return self.table[x]

    def fiber(self, b: int) -> list[int]:
        return [a for a, t in enumerate(self.table) if t == b]

    def compose(self, inner: SetMap) -> SetMap:
        """``self o inner``."""
        if inner.cod != self.dom:
            raise ArgumentError("maps are not composable")
        return SetMap(inner.dom, self.cod, tuple(self.table[t] for t in inner.table))


def mask_to_hex(mask: int) -> str:
    return format(mask, "x")


def hex_to_mask(text: str) -> int:
    text = text.strip().lower()
    if text.startswith("0x"):
        text = text[2:]
    try:
        return int(text, 16) if text else 0
    except ValueError as exc:
        raise ArgumentError(f"bad hex mask {text!r}") from exc


def popcount(mask: int) -> int:
    return bin(mask).count("1")


def bits_of(mask: int) -> list[int]:
    out = []
    k = 0
    while mask:
        if mask & 1:
            out.append(k)
        mask >>= 1
        k += 1
    return out


def rank(factor_sizes: Sequence[int], point: Sequence[int]) -> int:
    if len(point) != len(factor_sizes):
        raise ArgumentError(f"point {tuple(point)} has wrong arity for {tuple(factor_sizes)}")
    idx = 0
    for a, n in zip(point, factor_sizes):
        if not 0 <= a < n:
            raise ArgumentError(f"coordinate {a} out of range for factor of size {n}")
        idx = idx * n + a
    return idx


def unrank(factor_sizes: Sequence[int], idx: int) -> tuple[int, ...]:
    out = []
    for n in reversed(factor_sizes):
        idx, a = divmod(idx, n)
        out.append(a)
    return tuple(reversed(out))


@dataclass(frozen=True)
class ProductSubset:
    factor_sizes: tuple[int, ...]
    mask: int = 0
    _npoints: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        sizes = tuple(int(n) for n in self.factor_sizes)
        object.__setattr__(self, "factor_sizes", sizes)
        if any(n <= 0 for n in sizes):
            raise ArgumentError(f"factor sizes must be positive, got {sizes}")
        npoints = prod(sizes)
        object.__setattr__(self, "_npoints", npoints)
        if self.mask < 0 or self.mask >> npoints:
            raise ArgumentError(f"mask {self.mask:#x} has bits outside {npoints} points")

    @classmethod
    def from_points(cls, factor_sizes: Sequence[int], points: Iterable[Sequence[int]]) -> ProductSubset:
        mask = 0
        for pt in points:
            mask |= 1 << rank(factor_sizes, pt)
        return cls(tuple(factor_sizes), mask)

    @classmethod
    def full(cls, factor_sizes: Sequence[int]) -> ProductSubset:
        return cls(tuple(factor_sizes), (1 << prod(factor_sizes)) - 1)

    @property
    def npoints(self) -> int:
        return self._npoints

    def points(self) -> list[tuple[int, ...]]:
        return [unrank(self.factor_sizes, k) for k in bits_of(self.mask)]

    def __contains__(self, point) -> bool:
        return bool(self.mask >> rank(self.factor_sizes, point) & 1)

    def __len__(self):
        return popcount(self.mask)

    def transpose(self) -> ProductSubset:
        if len(self.factor_sizes) != 2:
            raise ArgumentError("transpose needs exactly two factors")
        a, b = self.factor_sizes
        return ProductSubset.from_points((b, a), [(y, x) for x, y in self.points()])

    def to_json(self) -> dict:
        return {"factor_sizes": list(self.factor_sizes), "mask_hex": mask_to_hex(self.mask)}

    @classmethod
    def from_json(cls, data: dict) -> ProductSubset:
        return cls(tuple(data["factor_sizes"]), hex_to_mask(data["mask_hex"]))


def project_subset(s: ProductSubset, coords: Sequence[int]) -> ProductSubset:
    coords = list(coords)
    k = len(s.factor_sizes)
    if not coords:
        raise ArgumentError("coords must be non-empty")
    if any(c < 0 or c >= k for c in coords) or any(b <= a for a, b in zip(coords, coords[1:])):
        raise ArgumentError(f"coords {coords} must be strictly increasing indices below {k}")
    sizes = tuple(s.factor_sizes[c] for c in coords)
    return ProductSubset.from_points(sizes, [tuple(pt[c] for c in coords) for pt in s.points()])


def fiber_masks(factor_sizes: Sequence[int]) -> tuple[int, ...]:
    """One mask per (factor, value): all points whose coordinate in that factor is the value."""
    return _fiber_masks(tuple(int(n) for n in factor_sizes))


@lru_cache(maxsize=256)
def _fiber_masks(sizes: tuple[int, ...]) -> tuple[int, ...]:
    out = []
    for i, n in enumerate(sizes):
        for v in range(n):
            m = 0
            for idx, pt in enumerate(product(*(range(s) for s in sizes))):
                if pt[i] == v:
                    m |= 1 << idx
            out.append(m)
    return tuple(out)


def is_ample(s: ProductSubset) -> bool:
    """Non-empty and surjective onto every factor.

    Ample subsets label G-orbits, and orbits are non-empty; with at least
    one factor surjectivity already forces non-emptiness.
    """
    if s.mask == 0:
        return False
    return all(s.mask & fm for fm in fiber_masks(s.factor_sizes))


def enumerate_ample(factor_sizes: Sequence[int], budget: int | None = None) -> list[ProductSubset]:
    sizes = tuple(int(n) for n in factor_sizes)
    if any(n <= 0 for n in sizes):
        return []
    nbits = prod(sizes)
    limit = budget_bits(DEFAULT_ENUM_BITS) if budget is None else budget
    if nbits > min(limit, MAX_KERNEL_BITS):
        raise CapacityError(f"ample enumeration over {sizes}", nbits, limit)
    masks = kernels.ample_masks(np.array(fiber_masks(sizes), dtype=np.int64), nbits)
    return [ProductSubset(sizes, int(m)) for m in masks]


def ample_masks_within(points_mask: int, factor_sizes: Sequence[int], budget: int | None = None) -> list[int]:
    """Masks of ample subsets contained in ``points_mask`` (a fiber product, say)."""
    sizes = tuple(factor_sizes)
    pts = bits_of(points_mask)
    limit = budget_bits(DEFAULT_ENUM_BITS) if budget is None else budget
    if len(pts) > min(limit, MAX_KERNEL_BITS):
        raise CapacityError(f"ample enumeration inside {len(pts)}-point set", len(pts), limit)
    coords = [unrank(sizes, k) for k in pts]
    proj = np.array([[c[i] for c in coords] for i in range(len(sizes))], dtype=np.int64)
    targets = np.array([(1 << n) - 1 for n in sizes], dtype=np.int64)
    lifted = kernels.lift_matches(len(pts), proj, targets)
    out = []
    for sub in lifted:
        sub = int(sub)
        if sub == 0:
            continue
        m = 0
        for j, k in enumerate(pts):
            if sub >> j & 1:
                m |= 1 << k
        out.append(m)
    return sorted(out)


def count_ample_power2(n: int, method: str = "inclusion_exclusion", budget: int | None = None) -> int:
    """Number of ample subsets of ``[2]^n``: the orbit count of G on X(2)^n."""
    if n < 0:
        raise ArgumentError("n must be >= 0")
    if method in ("enumerate", "enum"):
        if n == 0:
            return 1
        limit = budget_bits(16) if budget is None else budget
        if (1 << n) > limit:
            raise CapacityError(f"enumerating subsets of [2]^{n}", 1 << n, limit)
        return len(enumerate_ample((2,) * n, budget=limit))
    if method not in ("inclusion_exclusion", "ie"):
        raise ArgumentError(f"unknown method {method!r}")
    # Per coordinate choose which values are forbidden: none, one (2 ways), or both.
    # Allowed points number 2^free when no coordinate forbids both values, else 0.
    total = 0
    for both in range(n + 1):
        for one in range(n - both + 1):
            free = n - both - one
            ways = comb(n, both) * comb(n - both, one) * 2 ** one
            allowed = 2 ** free if both == 0 else 0
            total += (-1) ** one * ways * 2 ** allowed  # 'both' removes two fibers: even
    if n == 0:
        total -= 1  # the empty subset satisfies the vacuous condition but is not an orbit
    return total


def fiber_image(f: SetMap, s: int, mode: str) -> int:
    """Image of the subset mask ``s`` of ``f.dom``.

    ``odd``: points whose fiber meets ``s`` in an odd number of elements.
    ``nonempty``: the ordinary image ``f(s)``.
    """
    if s >> f.dom.size:
        raise ArgumentError("subset has elements outside the domain")
    counts = [0] * f.cod.size
    for a in bits_of(s):
        counts[f.table[a]] += 1
    if mode == "odd":
        keep = [c % 2 == 1 for c in counts]
    elif mode == "nonempty":
        keep = [c > 0 for c in counts]
    else:
        raise ArgumentError(f"unknown mode {mode!r}")
    out = 0
    for b, k in enumerate(keep):
        if k:
            out |= 1 << b
    return out


def fiber_product_subset(f: SetMap, g: SetMap) -> ProductSubset:
    if f.cod != g.cod:
        raise ArgumentError("fiber product needs a shared codomain")
    na, nb = f.dom.size, g.dom.size
    if na == 0 or nb == 0:
        raise ArgumentError("fiber product of empty sets has no ProductSubset form")
    return ProductSubset.from_points(
        (na, nb), [(a, b) for a in range(na) for b in range(nb) if f.table[a] == g.table[b]]
    )
