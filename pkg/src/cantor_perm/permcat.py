"""Matrix categories of permutation modules over X-sets.

An object is a list of transitive pieces X(L). A morphism between two
objects is a block matrix: block (j, i) is a G-invariant function on
X(L_j) x X(L_i), stored as exact rationals on the ample subsets of
L_j x L_i (its orbits).

Every piece carries a key ``(factor_sizes, copies, mask)`` locating L inside
a product of ambient sets. Points of L are ordered by the bits of ``mask``.
Factors of size one with copy 0 are dropped from keys, so X(A) x X(1) and
X(A) have the same key, and the two bracketings of a triple product give the
same keys too. Unitors and associators are therefore the identity on keys,
and morphisms are stored by key rather than by position.

Composition has four evaluators:

``oracle``  the raw definition: sum over every ample F in C x B x A;
``lift``    the same sum, generated pair by pair from the two supports;
``fast``    Y-objects only: Moebius to the Y-basis, semiring products, zeta back;
``lemma``   Y-objects only: like ``fast`` but each product is the fiber image
            of an explicit chain set.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd, prod
from typing import Iterable, Mapping

import numpy as np

from . import kernels
from ._config import DEFAULT_LIFT_BITS, DEFAULT_ORACLE_BITS, budget_bits
from .errors import ArgumentError, CapacityError
from .exact import fmt_q, parse_q
from .finsets import (
    ProductSubset,
    SetMap,
    bits_of,
    enumerate_ample,
    fiber_image,
    fiber_masks,
    popcount,
)
from .gsets import FormalGSet, TransitivePiece, diagonal_mask
from .measures import MeasureSpec, measure_by_name

Key = tuple  # (factor_sizes, copies, mask)
UNIT_KEY: Key = ((), (), 1)


def piece_key(p: TransitivePiece) -> Key:
    tag = p.resolved_tag()
    sizes = tag.factor_sizes
    copies = tuple(p.copy) + (0,) * (len(sizes) - len(p.copy))
    if len(copies) != len(sizes):
        raise ArgumentError("copy tuple longer than the tag's factor list")
    keep = [i for i, (n, c) in enumerate(zip(sizes, copies)) if not (n == 1 and c == 0)]
    return (tuple(sizes[i] for i in keep), tuple(copies[i] for i in keep), tag.mask)


def _key_piece(key: Key) -> TransitivePiece:
    sizes, copies, mask = key
    return TransitivePiece(popcount(mask), ProductSubset(sizes, mask), copies)


def _key_size(key: Key) -> int:
    return popcount(key[2])


@dataclass(frozen=True, eq=False)
class PermObject:
    """An ordered list of transitive pieces with distinct keys."""

    pieces: tuple[TransitivePiece, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "pieces", tuple(self.pieces))
        keys = tuple(piece_key(p) for p in self.pieces)
        if len(set(keys)) != len(keys):
            raise ArgumentError("object has two pieces with the same key")
        object.__setattr__(self, "keys", keys)
        object.__setattr__(self, "_index", {k: i for i, k in enumerate(keys)})

    def __len__(self):
        return len(self.pieces)

    def __eq__(self, other):
        return isinstance(other, PermObject) and set(self.keys) == set(other.keys)

    def __hash__(self):
        return hash(frozenset(self.keys))

    def index(self, key: Key) -> int:
        return self._index[key]

    def __contains__(self, key: Key) -> bool:
        return key in self._index

    def size_of(self, key: Key) -> int:
        return _key_size(key)

    def underlying(self) -> FormalGSet:
        return FormalGSet.of([p.size for p in self.pieces])

    def y_shape(self) -> tuple[int, ...] | None:
        """Ambient sizes if this object is Y(A) for A = product of those sizes."""
        if not self.keys:
            return None
        sizes, copies = self.keys[0][:2]
        if any(k[:2] != (sizes, copies) for k in self.keys) or any(copies):
            return None
        n = prod(sizes)
        if len(self.keys) != (1 << n) - 1:
            return None
        return sizes

    def to_json(self) -> list[dict]:
        return [p.to_json() for p in self.pieces]

    @classmethod
    def from_json(cls, data) -> PermObject:
        if isinstance(data, dict):
            if "y_object" in data:
                return y_object(tuple(data["y_object"]) if isinstance(data["y_object"], list) else data["y_object"])
            if "x_object" in data:
                return x_object(int(data["x_object"]))
            raise ArgumentError("object must be a piece list, {y_object: ...} or {x_object: n}")
        return cls(tuple(TransitivePiece.from_json(d) for d in data))


def _sizes(a) -> tuple[int, ...]:
    if isinstance(a, int):
        return (a,) if a != 1 else ()
    return tuple(int(n) for n in a if int(n) != 1)


def y_object(a) -> PermObject:
    """Y(A) as the sum of X(C) over non-empty C in A, ordered by (|C|, mask).

    ``a`` is a size or a tuple of sizes (A is then their product).
    """
    if isinstance(a, int) and a == 0:
        return PermObject(())
    sizes = _sizes(a)
    n = prod(sizes)
    order = sorted(range(1, 1 << n), key=lambda m: (popcount(m), m))
    return PermObject(tuple(TransitivePiece(popcount(c), ProductSubset(sizes, c)) for c in order))


def x_object(n: int, copies: int = 1) -> PermObject:
    if n < 1:
        raise ArgumentError("X(n) needs n >= 1")
    return PermObject(tuple(TransitivePiece(n, None, (c,)) for c in range(copies)))


def unit_object() -> PermObject:
    return x_object(1)


def object_from_gset(s: FormalGSet) -> PermObject:
    pieces = []
    for n, m in sorted(s.size_counts().items()):
        pieces.extend(TransitivePiece(n, None, (c,)) for c in range(m))
    return PermObject(tuple(pieces))


def sub_object(keys: Iterable[Key]) -> PermObject:
    return PermObject(tuple(_key_piece(k) for k in keys))


# --- matrices ---------------------------------------------------------------

Blocks = dict  # {(target_key, source_key): {local_mask: Fraction}}


def _check_block_key(nt: int, ns: int, mask: int) -> None:
    s = ProductSubset((nt, ns), mask)
    if mask == 0 or not all(mask & fm for fm in fiber_masks(s.factor_sizes)):
        raise ArgumentError(f"block key {mask:#x} is not ample in [{nt}]x[{ns}]")


@dataclass(frozen=True, eq=False)
class PermMatrix:
    measure: MeasureSpec
    source: PermObject
    target: PermObject
    blocks: Mapping

    def __post_init__(self):
        clean: Blocks = {}
        for (tk, sk), entries in self.blocks.items():
            if tk not in self.target or sk not in self.source:
                raise ArgumentError("block refers to a piece outside source/target")
            nt, ns = _key_size(tk), _key_size(sk)
            kept = {}
            for mask, c in entries.items():
                c = Fraction(c)
                if c:
                    _check_block_key(nt, ns, mask)
                    kept[int(mask)] = c
            if kept:
                clean[(tk, sk)] = kept
        object.__setattr__(self, "blocks", clean)

    @classmethod
    def zero(cls, m: MeasureSpec, source: PermObject, target: PermObject) -> PermMatrix:
        return cls(m, source, target, {})

    def entries(self) -> list[tuple[int, int, int, Fraction]]:
        out = []
        for (tk, sk), block in self.blocks.items():
            ti, si = self.target.index(tk), self.source.index(sk)
            out.extend((ti, si, mask, c) for mask, c in block.items())
        return sorted(out, key=lambda e: e[:3])

    def coeff(self, tkey: Key, skey: Key, mask: int) -> Fraction:
        return self.blocks.get((tkey, skey), {}).get(mask, Fraction(0))

    def nnz(self) -> int:
        return sum(len(b) for b in self.blocks.values())

    def is_zero(self) -> bool:
        return not self.blocks

    def _same_shape(self, other: PermMatrix) -> None:
        if self.measure != other.measure:
            raise ArgumentError("measure mismatch")
        if self.source != other.source or self.target != other.target:
            raise ArgumentError("shape mismatch")

    def __add__(self, other: PermMatrix) -> PermMatrix:
        self._same_shape(other)
        out: Blocks = {k: dict(v) for k, v in self.blocks.items()}
        for k, block in other.blocks.items():
            dst = out.setdefault(k, {})
            for mask, c in block.items():
                dst[mask] = dst.get(mask, 0) + c
        return PermMatrix(self.measure, self.source, self.target, out)

    def scale(self, k) -> PermMatrix:
        k = Fraction(k)
        return PermMatrix(self.measure, self.source, self.target,
                          {key: {m: c * k for m, c in b.items()} for key, b in self.blocks.items()})

    def __sub__(self, other: PermMatrix) -> PermMatrix:
        return self + other.scale(-1)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PermMatrix):
            return NotImplemented
        return (self.measure == other.measure and self.source == other.source
                and self.target == other.target and self.blocks == other.blocks)

    __hash__ = None

    def to_json(self) -> dict:
        return {
            "measure": self.measure.name,
            "source": self.source.to_json(),
            "target": self.target.to_json(),
            "entries": [
                {"target_piece": t, "source_piece": s, "mask_hex": format(m, "x"), "coeff": fmt_q(c)}
                for t, s, m, c in self.entries()
            ],
        }

    @classmethod
    def from_json(cls, data: dict) -> PermMatrix:
        m = measure_by_name(data["measure"])
        source = PermObject.from_json(data["source"])
        target = PermObject.from_json(data["target"])
        blocks: Blocks = {}
        for e in data.get("entries", []):
            t, s = int(e["target_piece"]), int(e["source_piece"])
            if not (0 <= t < len(target) and 0 <= s < len(source)):
                raise ArgumentError("entry piece index out of range")
            block = blocks.setdefault((target.keys[t], source.keys[s]), {})
            mask = int(e["mask_hex"], 16)
            block[mask] = block.get(mask, 0) + parse_q(e["coeff"])
        return cls(m, source, target, blocks)


def extend(mat: PermMatrix, source: PermObject | None = None, target: PermObject | None = None) -> PermMatrix:
    """The same matrix viewed between larger objects (new blocks are zero)."""
    source = mat.source if source is None else source
    target = mat.target if target is None else target
    if not all(k in source for k in mat.source.keys) or not all(k in target for k in mat.target.keys):
        raise ArgumentError("extend needs objects containing the original pieces")
    return PermMatrix(mat.measure, source, target, mat.blocks)


def union_object(a: PermObject, b: PermObject) -> PermObject:
    keys = list(a.keys) + [k for k in b.keys if k not in a]
    return PermObject(tuple(a.pieces) + tuple(_key_piece(k) for k in keys[len(a):]))


def identity_matrix(m: MeasureSpec, obj: PermObject) -> PermMatrix:
    return PermMatrix(m, obj, obj, {(k, k): {diagonal_mask(_key_size(k)): 1} for k in obj.keys})


# --- local/global masks on Y-objects ----------------------------------------


def _local_to_global(local: int, rows: list[int], cols: list[int], ncols_global: int) -> int:
    nc = len(cols)
    out = 0
    for bit in bits_of(local):
        r, c = divmod(bit, nc)
        out |= 1 << (rows[r] * ncols_global + cols[c])
    return out


def _global_to_block(d: int, ncols_global: int) -> tuple[int, int, int]:
    """Split a non-empty D in [R]x[C] into (row set, column set, local mask)."""
    pts = [divmod(b, ncols_global) for b in bits_of(d)]
    rows = sorted({r for r, _ in pts})
    cols = sorted({c for _, c in pts})
    rpos = {r: i for i, r in enumerate(rows)}
    cpos = {c: i for i, c in enumerate(cols)}
    local = 0
    for r, c in pts:
        local |= 1 << (rpos[r] * len(cols) + cpos[c])
    return sum(1 << r for r in rows), sum(1 << c for c in cols), local


def _y_dims(mat: PermMatrix) -> tuple[tuple[int, ...], tuple[int, ...]]:
    ts, ss = mat.target.y_shape(), mat.source.y_shape()
    if ts is None or ss is None:
        raise ArgumentError("Y-basis operations need Y-objects as source and target")
    return ts, ss


def x_vector(mat: PermMatrix) -> dict[int, Fraction]:
    """Stratum coefficients indexed by D in [N_target] x [N_source]."""
    ts, ss = _y_dims(mat)
    nc = prod(ss)
    out = {}
    for (tk, sk), block in mat.blocks.items():
        rows, cols = bits_of(tk[2]), bits_of(sk[2])
        for local, c in block.items():
            out[_local_to_global(local, rows, cols, nc)] = c
    return out


def from_x_vector(m: MeasureSpec, source: PermObject, target: PermObject, vec: Mapping[int, Fraction]) -> PermMatrix:
    ts, ss = target.y_shape(), source.y_shape()
    if ts is None or ss is None:
        raise ArgumentError("from_x_vector needs Y-objects")
    nc = prod(ss)
    blocks: Blocks = defaultdict(dict)
    for d, c in vec.items():
        if d == 0 or not c:
            continue
        rmask, cmask, local = _global_to_block(d, nc)
        blocks[((ts, (0,) * len(ts), rmask), (ss, (0,) * len(ss), cmask))][local] = Fraction(c)
    return PermMatrix(m, source, target, dict(blocks))


def _to_dense(vec: Mapping[int, Fraction], nbits: int) -> tuple[np.ndarray, int]:
    den = 1
    for c in vec.values():
        den = den * c.denominator // gcd(den, c.denominator)
    biggest = max((abs(c) * den for c in vec.values()), default=0)
    if biggest * (1 << nbits) < (1 << 62):
        arr = np.zeros(1 << nbits, dtype=np.int64)
    else:
        arr = np.zeros(1 << nbits, dtype=object)
        arr[:] = 0
    for d, c in vec.items():
        arr[d] = int(c * den)
    return arr, den


def _from_dense(arr: np.ndarray, den: int) -> dict[int, Fraction]:
    nz = np.flatnonzero(arr)
    return {int(d): Fraction(int(arr[d]), den) for d in nz if d != 0}


def _transform(vec: Mapping[int, Fraction], nbits: int, forward: bool) -> dict[int, Fraction]:
    arr, den = _to_dense({d: Fraction(c) for d, c in vec.items() if d}, nbits)
    impl = kernels if arr.dtype != object else kernels.backend("numpy")
    arr = impl.zeta_superset(arr) if forward else impl.mobius_superset(arr)
    return _from_dense(arr, den)


def zeta(vec: Mapping[int, Fraction], nbits: int) -> dict[int, Fraction]:
    """Y-coefficients to X-coefficients: b(D') = sum of c(D) over D containing D'."""
    return _transform(vec, nbits, True)


def mobius(vec: Mapping[int, Fraction], nbits: int) -> dict[int, Fraction]:
    """Inverse of ``zeta``: c(D) = sum over D' containing D of (-1)^|D' - D| b(D')."""
    return _transform(vec, nbits, False)


def convert_basis(obj, direction: str, nbits: int | None = None) -> dict[int, Fraction]:
    """``to_Y``: a PermMatrix (or X-vector) to Y-coefficients; ``to_X``: the reverse."""
    if isinstance(obj, PermMatrix):
        ts, ss = _y_dims(obj)
        nbits = prod(ts) * prod(ss)
        if direction != "to_Y":
            raise ArgumentError("a PermMatrix already holds X coefficients; use to_Y")
        return mobius(x_vector(obj), nbits)
    if nbits is None:
        raise ArgumentError("nbits is required for a bare coefficient vector")
    if direction == "to_X":
        return zeta(obj, nbits)
    if direction == "to_Y":
        return mobius(obj, nbits)
    raise ArgumentError(f"unknown direction {direction!r}")


def indicator_matrix(m: MeasureSpec, a, b, d, basis: str = "Y") -> PermMatrix:
    """A matrix Y(A) -> Y(B) from D in B x A: 1_{Y(D)} (basis Y) or 1_{X(D)} (basis X)."""
    src, tgt = y_object(a), y_object(b)
    nr = prod(_sizes(b)) if not (isinstance(b, int) and b == 0) else 0
    nc = prod(_sizes(a)) if not (isinstance(a, int) and a == 0) else 0
    mask = d.mask if isinstance(d, ProductSubset) else int(d)
    if mask < 0 or mask >> (nr * nc):
        raise ArgumentError("D has points outside B x A")
    if basis == "Y":
        return from_x_vector(m, src, tgt, zeta({mask: Fraction(1)}, nr * nc)) if mask else PermMatrix.zero(m, src, tgt)
    if basis == "X":
        if mask == 0:
            raise ArgumentError("the empty set is not an orbit")
        return from_x_vector(m, src, tgt, {mask: Fraction(1)})
    raise ArgumentError(f"unknown basis {basis!r}")


# --- composition ------------------------------------------------------------


def _check_composable(b: PermMatrix, a: PermMatrix) -> None:
    if a.measure != b.measure:
        raise ArgumentError("measure mismatch")
    if a.target != b.source:
        raise ArgumentError("A.target differs from B.source")


@lru_cache(maxsize=16)
def _oracle_table(nk: int, nj: int, ni: int):
    """Ample F in [nk]x[nj]x[ni] with their three pair projections and sizes."""
    sizes = (nk, nj, ni)
    nbits = nk * nj * ni
    fm = np.array(fiber_masks(sizes), dtype=np.int64)
    f = kernels.ample_masks(fm, nbits)
    cb = np.empty(nbits, dtype=np.int64)
    ba = np.empty(nbits, dtype=np.int64)
    ca = np.empty(nbits, dtype=np.int64)
    for idx in range(nbits):
        c, rest = divmod(idx, nj * ni)
        bb, aa = divmod(rest, ni)
        cb[idx], ba[idx], ca[idx] = c * nj + bb, bb * ni + aa, c * ni + aa
    img_cb = kernels.subset_images(nbits, cb)[f]
    img_ba = kernels.subset_images(nbits, ba)[f]
    img_ca = kernels.subset_images(nbits, ca)[f]
    pop = kernels.popcounts(nbits)
    npop = kernels.popcounts(nk * ni)
    return img_cb, img_ba, img_ca, pop[f] - npop[img_ca]


def _compose_oracle(b: PermMatrix, a: PermMatrix, budget: int) -> Blocks:
    alpha = Fraction(b.measure.alpha)
    out: Blocks = defaultdict(lambda: defaultdict(Fraction))
    a_by_mid = defaultdict(list)
    for (jk, ik), block in a.blocks.items():
        a_by_mid[jk].append((ik, block))
    for (kk, jk), bblock in b.blocks.items():
        for ik, ablock in a_by_mid.get(jk, ()):
            nk, nj, ni = _key_size(kk), _key_size(jk), _key_size(ik)
            if nk * nj * ni > budget:
                raise CapacityError(f"oracle composition over [{nk}]x[{nj}]x[{ni}]", nk * nj * ni, budget)
            img_cb, img_ba, img_ca, drop = _oracle_table(nk, nj, ni)
            bl = np.full(1 << (nk * nj), -1, dtype=np.int64)
            al = np.full(1 << (nj * ni), -1, dtype=np.int64)
            bkeys, bvals = list(bblock), list(bblock.values())
            akeys, avals = list(ablock), list(ablock.values())
            bl[bkeys] = np.arange(len(bkeys))
            al[akeys] = np.arange(len(akeys))
            bi, ai = bl[img_cb], al[img_ba]
            hit = np.flatnonzero((bi >= 0) & (ai >= 0))
            if hit.size == 0:
                continue
            # many F share (b entry, a entry, image, dropped points); sum those as counts
            combos, counts = np.unique(
                np.stack([bi[hit], ai[hit], img_ca[hit], drop[hit]], axis=1), axis=0, return_counts=True)
            dst = out[(kk, ik)]
            for (x, y, e, k), cnt in zip(combos.tolist(), counts.tolist()):
                dst[e] += cnt * bvals[x] * avals[y] * alpha ** k
    return out


def _lift_pair(e_cb: int, d_ba: int, nk: int, nj: int, ni: int, budget: int):
    """All F in the chain set of (E, D) with p_CB(F) = E and p_BA(F) = D.

    Returns (p_CA(F) masks, |F| - |p_CA(F)|) as arrays.
    """
    pts = []
    for bit in bits_of(e_cb):
        c, bb = divmod(bit, nj)
        for aa in range(ni):
            if d_ba >> (bb * ni + aa) & 1:
                pts.append((c, bb, aa))
    k = len(pts)
    if k > budget:
        raise CapacityError("chain set in lifted composition", k, budget)
    proj = np.array([[c * nj + bb for c, bb, _ in pts], [bb * ni + aa for _, bb, aa in pts]], dtype=np.int64)
    fs = kernels.lift_matches(k, proj, np.array([e_cb, d_ba], dtype=np.int64))
    img = np.zeros(fs.shape[0], dtype=np.int64)
    size = np.zeros(fs.shape[0], dtype=np.int64)
    for idx, (c, _, aa) in enumerate(pts):
        bit = (fs >> idx) & 1
        img |= bit << np.int64(c * ni + aa)
        size += bit
    ipop = np.array([popcount(int(x)) for x in img], dtype=np.int64)
    return img, size - ipop


def _compose_lift(b: PermMatrix, a: PermMatrix, budget: int) -> Blocks:
    alpha = Fraction(b.measure.alpha)
    out: Blocks = defaultdict(lambda: defaultdict(Fraction))
    a_by_mid = defaultdict(list)
    for (jk, ik), block in a.blocks.items():
        a_by_mid[jk].append((ik, block))
    for (kk, jk), bblock in b.blocks.items():
        for ik, ablock in a_by_mid.get(jk, ()):
            nk, nj, ni = _key_size(kk), _key_size(jk), _key_size(ik)
            dst = out[(kk, ik)]
            for e, cb in bblock.items():
                for d, ca in ablock.items():
                    img, drop = _lift_pair(e, d, nk, nj, ni, budget)
                    if img.size == 0:
                        continue
                    combo = np.unique(np.stack([img, drop]), axis=1, return_counts=True)
                    for (mask, dr), cnt in zip(combo[0].T, combo[1]):
                        dst[int(mask)] += cb * ca * int(cnt) * alpha ** int(dr)
    return out


def _semiring_kind(m: MeasureSpec) -> int:
    return kernels.F2 if m.name == "mu" else kernels.BOOL


def _y_coefficients(mat: PermMatrix) -> tuple[dict[int, Fraction], int, int]:
    ts, ss = _y_dims(mat)
    r, c = prod(ts), prod(ss)
    return mobius(x_vector(mat), r * c), r, c


def _y_product_lemma(kind: int, e: int, d: int, r: int, k: int, c: int) -> int:
    """Support of 1_{Y(E)} o 1_{Y(D)} via the chain set E x_B D and its map to C x A."""
    chain = []
    for bit in bits_of(e):
        i, t = divmod(bit, k)
        for j in range(c):
            if d >> (t * c + j) & 1:
                chain.append(i * c + j)
    if not chain:
        return 0
    pi = SetMap.from_table(chain, r * c)
    return fiber_image(pi, (1 << len(chain)) - 1, "odd" if kind == kernels.F2 else "nonempty")


def _compose_y(b: PermMatrix, a: PermMatrix, lemma: bool) -> PermMatrix:
    yb, r, k = _y_coefficients(b)
    ya, k2, c = _y_coefficients(a)
    if k != k2:
        raise ArgumentError("inner dimensions differ")
    kind = _semiring_kind(b.measure)
    bm, bc = list(yb), list(yb.values())
    am, ac = list(ya), list(ya.values())
    out: dict[int, Fraction] = defaultdict(Fraction)
    if bm and am:
        if lemma:
            prods = np.array([[_y_product_lemma(kind, e, d, r, k, c) for d in am] for e in bm], dtype=np.int64)
        else:
            prods = kernels.sr_products(kind, r, k, c, bm, am)
        for x in range(len(bm)):
            row = prods[x]
            for y in np.flatnonzero(row):
                out[int(row[y])] += bc[x] * ac[y]
    return from_x_vector(b.measure, a.source, b.target, zeta(out, r * c))


def compose(b: PermMatrix, a: PermMatrix, mode: str = "fast", budget: int | None = None) -> PermMatrix:
    """B o A."""
    _check_composable(b, a)
    if mode in ("fast", "lemma"):
        return _compose_y(b, a, lemma=(mode == "lemma"))
    if mode == "oracle":
        blocks = _compose_oracle(b, a, budget_bits(DEFAULT_ORACLE_BITS) if budget is None else budget)
    elif mode == "lift":
        blocks = _compose_lift(b, a, budget_bits(DEFAULT_LIFT_BITS) if budget is None else budget)
    else:
        raise ArgumentError(f"unknown composition mode {mode!r}")
    return PermMatrix(b.measure, a.source, b.target, {k: dict(v) for k, v in blocks.items()})


def compose_auto(b: PermMatrix, a: PermMatrix) -> PermMatrix:
    """Fast path on Y-objects, lifted definition elsewhere."""
    ys = [o.y_shape() for o in (a.source, a.target, b.target)]
    return compose(b, a, "fast" if all(s is not None for s in ys) else "lift")


# --- tensor products --------------------------------------------------------


def tensor_piece_key(kp: Key, kq: Key, t_local: int) -> Key:
    """Key of the stratum T (local to L_p x L_q) of X(L_p) x X(L_q)."""
    sp, cp, mp = kp
    sq, cq, mq = kq
    ptsp, ptsq = bits_of(mp), bits_of(mq)
    nq, width = len(ptsq), prod(sq)
    flat = 0
    for bit in bits_of(t_local):
        x, y = divmod(bit, nq)
        flat |= 1 << (ptsp[x] * width + ptsq[y])
    return (sp + sq, cp + cq, flat)


def tensor_object(p: PermObject, q: PermObject) -> PermObject:
    keys = []
    for kp in p.keys:
        for kq in q.keys:
            for t in enumerate_ample((_key_size(kp), _key_size(kq))):
                keys.append(tensor_piece_key(kp, kq, t.mask))
    return sub_object(keys)


@lru_cache(maxsize=64)
def _ample_array(s: int, t: int) -> np.ndarray:
    return np.array([x.mask for x in enumerate_ample((s, t))], dtype=np.int64)


def _restricted_lifts(d1, d2, tkeys, skeys, kt, ks):
    """F in D1 x D2 projecting onto D1, D2 and onto the given target/source strata."""
    pts = [(u, v) for u in range(len(d1)) for v in range(len(d2))]
    out = []
    for tk in tkeys:
        tpts = _stratum_index(kt, tk)
        for sk in skeys:
            spts = _stratum_index(ks, sk)
            rows = [[], [], [], []]
            for u, v in pts:
                (b1, a1), (b2, a2) = d1[u], d2[v]
                rows[0].append(u)
                rows[1].append(v)
                # 62 is never a target bit, so such points are pruned
                rows[2].append(tpts.get((b1, b2), 62))
                rows[3].append(spts.get((a1, a2), 62))
            targets = [(1 << len(d1)) - 1, (1 << len(d2)) - 1, (1 << len(tpts)) - 1, (1 << len(spts)) - 1]
            fs = kernels.lift_matches(len(pts), np.array(rows, dtype=np.int64), np.array(targets, dtype=np.int64))
            out.extend((tk, sk, int(f)) for f in fs)
    return out


def _stratum_index(base: tuple[Key, Key], key: Key) -> dict[tuple[int, int], int]:
    """Local points of a product stratum, as pairs of local points of the two factors."""
    kp, kq = base
    ptsp, ptsq = bits_of(kp[2]), bits_of(kq[2])
    width = prod(kq[0])
    posp = {g: i for i, g in enumerate(ptsp)}
    posq = {g: i for i, g in enumerate(ptsq)}
    out = {}
    for idx, g in enumerate(bits_of(key[2])):
        x, y = divmod(g, width)
        out[(posp[x], posq[y])] = idx
    return out


def tensor_matrix(m1: PermMatrix, m2: PermMatrix, rows: Iterable[Key] | None = None,
                  cols: Iterable[Key] | None = None, budget: int | None = None) -> PermMatrix:
    """Kronecker product of two matrices, re-expressed on the strata of the product objects.

    An orbit of (X(B) x X(B')) x (X(A) x X(A')) is an ample F in D x D' for a
    pair of orbit keys D, D' of the factors; its value is the product of the
    two factor values. F lands in the target stratum T = image in B x B' and
    the source stratum S = image in A x A', at the local key H = F in T x S.

    ``rows``/``cols`` restrict the result to the given target/source strata
    (a direct summand); by default the full product objects are used.
    """
    if m1.measure != m2.measure:
        raise ArgumentError("measure mismatch")
    limit = budget_bits(DEFAULT_LIFT_BITS) if budget is None else budget
    rows = None if rows is None else list(rows)
    cols = None if cols is None else list(cols)
    target = tensor_object(m1.target, m2.target) if rows is None else sub_object(rows)
    source = tensor_object(m1.source, m2.source) if cols is None else sub_object(cols)
    out: Blocks = defaultdict(lambda: defaultdict(Fraction))
    row_by_base = _group_by_base(rows, m1.target, m2.target) if rows is not None else None
    col_by_base = _group_by_base(cols, m1.source, m2.source) if cols is not None else None
    for (t1, s1), b1 in m1.blocks.items():
        for (t2, s2), b2 in m2.blocks.items():
            kt, ks = (t1, t2), (s1, s2)
            if rows is not None and not row_by_base.get(kt):
                continue
            if cols is not None and not col_by_base.get(ks):
                continue
            ns2 = _key_size(s2)
            ns1 = _key_size(s1)
            for d1m, c1 in b1.items():
                d1 = [divmod(bit, ns1) for bit in bits_of(d1m)]
                for d2m, c2 in b2.items():
                    d2 = [divmod(bit, ns2) for bit in bits_of(d2m)]
                    if len(d1) * len(d2) > limit:
                        raise CapacityError("tensor orbit enumeration", len(d1) * len(d2), limit)
                    if rows is None and cols is None:
                        fs = ((None, None, int(f)) for f in _ample_array(len(d1), len(d2)))
                    else:
                        tk_list = row_by_base[kt] if rows is not None else None
                        sk_list = col_by_base[ks] if cols is not None else None
                        fs = _restricted_lifts(
                            d1, d2,
                            tk_list if tk_list is not None else _all_strata(kt),
                            sk_list if sk_list is not None else _all_strata(ks),
                            kt, ks)
                    for _, _, f in fs:
                        tk, sk, h = _place(f, d1, d2, kt, ks, len(d2))
                        out[(tk, sk)][h] += c1 * c2
    return PermMatrix(m1.measure, source, target, {k: dict(v) for k, v in out.items()})


def _all_strata(base: tuple[Key, Key]) -> list[Key]:
    kp, kq = base
    return [tensor_piece_key(kp, kq, t.mask) for t in enumerate_ample((_key_size(kp), _key_size(kq)))]


def _group_by_base(keys: list[Key], p: PermObject, q: PermObject) -> dict:
    """Map each allowed product stratum back to the pair of factor pieces it lies over."""
    out = defaultdict(list)
    for k in keys:
        for kp in p.keys:
            for kq in q.keys:
                if k[0] != kp[0] + kq[0] or k[1] != kp[1] + kq[1]:
                    continue
                width = prod(kq[0])
                pts = bits_of(k[2])
                if ({g // width for g in pts} == set(bits_of(kp[2]))
                        and {g % width for g in pts} == set(bits_of(kq[2]))):
                    out[(kp, kq)].append(k)
    return out


def _place(f: int, d1, d2, kt, ks, n2: int) -> tuple[Key, Key, int]:
    tp, sp = [], []
    for bit in bits_of(f):
        u, v = divmod(bit, n2)
        (b1, a1), (b2, a2) = d1[u], d2[v]
        tp.append((b1, b2))
        sp.append((a1, a2))
    n_t2 = _key_size(kt[1])
    n_s2 = _key_size(ks[1])
    tset = sorted(set(tp), key=lambda x: x[0] * n_t2 + x[1])
    sset = sorted(set(sp), key=lambda x: x[0] * n_s2 + x[1])
    t_local = sum(1 << (x * n_t2 + y) for x, y in tset)
    s_local = sum(1 << (x * n_s2 + y) for x, y in sset)
    tpos = {x: i for i, x in enumerate(tset)}
    spos = {x: i for i, x in enumerate(sset)}
    h = 0
    for tt, ss in zip(tp, sp):
        h |= 1 << (tpos[tt] * len(sset) + spos[ss])
    return tensor_piece_key(kt[0], kt[1], t_local), tensor_piece_key(ks[0], ks[1], s_local), h


# --- duality and trace ------------------------------------------------------


def diagonal_key(k: Key) -> Key:
    return tensor_piece_key(k, k, diagonal_mask(_key_size(k)))


def duality_data(m: MeasureSpec, obj: PermObject) -> tuple[PermMatrix, PermMatrix]:
    """(ev, coev) for a self-dual object: indicators of the diagonal strata of X(L) x X(L).

    Off-diagonal strata of obj x obj carry zero, so both maps are returned
    on the summand spanned by the diagonal strata; ``extend`` embeds them
    into the full product when needed.
    """
    diag = sub_object(diagonal_key(k) for k in obj.keys)
    unit = unit_object()
    ev = PermMatrix(m, diag, unit, {(UNIT_KEY, diagonal_key(k)): {(1 << _key_size(k)) - 1: 1} for k in obj.keys})
    coev = PermMatrix(m, unit, diag, {(diagonal_key(k), UNIT_KEY): {(1 << _key_size(k)) - 1: 1} for k in obj.keys})
    return ev, coev


def _scalar(mat: PermMatrix) -> Fraction:
    return mat.coeff(UNIT_KEY, UNIT_KEY, 1)


def trace(mat: PermMatrix, mode: str = "categorical") -> Fraction:
    if mat.source != mat.target:
        raise ArgumentError("trace needs an endomorphism")
    m = mat.measure
    if mode in ("closed", "closed_form"):
        total = Fraction(0)
        for k in mat.source.keys:
            n = _key_size(k)
            total += m.piece(n) * mat.coeff(k, k, diagonal_mask(n))
        return total
    if mode != "categorical":
        raise ArgumentError(f"unknown trace mode {mode!r}")
    obj = mat.source
    ev, coev = duality_data(m, obj)
    # ev and coev vanish off the diagonal strata, so only that summand of M x id is needed
    mid = tensor_matrix(mat, identity_matrix(m, obj), rows=ev.source.keys, cols=coev.target.keys)
    mid = extend(mid, source=coev.target, target=ev.source)
    return _scalar(compose(ev, compose(mid, coev, "lift"), "lift"))


def dimension(m: MeasureSpec, obj: PermObject, mode: str = "categorical") -> Fraction:
    return trace(identity_matrix(m, obj), mode)


def snake_composites(m: MeasureSpec, obj: PermObject) -> tuple[PermMatrix, PermMatrix]:
    """(ev x id) o (id x coev) and (id x ev) o (coev x id), both as endomorphisms of obj."""
    ev, coev = duality_data(m, obj)
    ident = identity_matrix(m, obj)
    out = []
    for right, left in ((tensor_matrix(ident, coev), tensor_matrix(ev, ident)),
                        (tensor_matrix(coev, ident), tensor_matrix(ident, ev))):
        mid = union_object(right.target, left.source)
        comp = compose(extend(left, source=mid), extend(right, target=mid), "lift")
        out.append(PermMatrix(m, obj, obj, comp.blocks))
    return out[0], out[1]


def random_matrix(m: MeasureSpec, source: PermObject, target: PermObject, rng, density: float = 0.3,
                  max_abs: int = 3) -> PermMatrix:
    """Random integer coefficients on a random subset of strata; for tests and benchmarks."""
    blocks: Blocks = {}
    for tk in target.keys:
        for sk in source.keys:
            keys = _ample_array(_key_size(tk), _key_size(sk))
            chosen = keys[rng.random(keys.shape[0]) < density]
            vals = rng.integers(-max_abs, max_abs + 1, size=chosen.shape[0])
            block = {int(k): Fraction(int(v)) for k, v in zip(chosen, vals) if v}
            if block:
                blocks[(tk, sk)] = block
    return PermMatrix(m, source, target, blocks)


__all__ = [
    "PermObject", "PermMatrix", "y_object", "x_object", "unit_object", "object_from_gset",
    "identity_matrix", "indicator_matrix", "convert_basis", "zeta", "mobius", "x_vector", "from_x_vector",
    "compose", "compose_auto", "tensor_object", "tensor_matrix", "duality_data", "trace", "dimension",
    "snake_composites", "extend", "union_object", "sub_object", "random_matrix", "piece_key",
]
