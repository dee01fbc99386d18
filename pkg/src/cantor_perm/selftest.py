"""Replays the library's headline claims and reports one status line per claim."""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from . import gsets, linmon, measures, permcat
from .finsets import SetMap, count_ample_power2, enumerate_ample


@dataclass
class CheckResult:
    name: str
    ok: bool
    detail: str
    seconds: float


def surjections(n: int, c: int):
    for table in itertools.product(range(c), repeat=n):
        if len(set(table)) == c:
            yield gsets.GMap(SetMap.from_table(table, c))


def _ample_count():
    want = {1: 1, 2: 7, 3: 193, 4: 63775}
    got = {n: (count_ample_power2(n, "enumerate"), count_ample_power2(n, "inclusion_exclusion")) for n in want}
    ok = all(got[n] == (v, v) for n, v in want.items())
    return ok, "f(1..4) = " + ", ".join(str(got[n][0]) for n in sorted(got))


def _elementary_squares():
    for n in range(2, 6):
        same = gsets.x_product_decompose(gsets.elementary_map(n, 0), gsets.elementary_map(n, 0))
        if same.size_counts() != {n: 2, n + 1: 4, n + 2: 1}:
            return False, f"same point, n={n}: {same}"
        if n >= 3:
            diff = gsets.x_product_decompose(gsets.elementary_map(n, 0), gsets.elementary_map(n, 1))
            if diff.size_counts() != {n + 1: 1}:
                return False, f"distinct points, n={n}: {diff}"
    return True, "X(n+2) + 4X(n+1) + 2X(n) and X(n+1) for n = 2..5"


def _measure_solve():
    roots = measures.solve_regular_parameters()
    expected = sorted({Fraction(measures.MU.alpha), Fraction(measures.NU.alpha)})
    ok = roots == expected and all(
        measures.eval_measure(measures.MU, gsets.FormalGSet.of([n])) == Fraction(-2) ** (n - 1)
        for n in range(1, 6))
    return ok, f"roots {[str(r) for r in roots]}, live measures {[str(e) for e in expected]}"


def _regularity(max_size: int = 4):
    count = 0
    for c in range(1, max_size + 1):
        maps = [f for a in range(c, max_size + 1) for f in surjections(a, c)]
        for f in maps:
            for g in maps:
                z = gsets.x_product_decompose(f, g)
                for m in (measures.MU, measures.NU):
                    lhs = measures.eval_measure(m, z)
                    rhs = m.piece(f.source_size) * m.piece(g.source_size) / m.piece(c)
                    if lhs != rhs:
                        return False, f"{m.name}: {f.underlying.table} x {g.underlying.table}"
                count += 1
    return True, f"{count} surjection pairs, both measures"


def _y_table():
    for m in (measures.MU, measures.NU):
        for n in range(9):
            if measures.y_measure(m, n) != measures.y_measure(m, n, "decompose"):
                return False, f"{m.name}, n={n}"
    return True, "closed form = decomposition for n <= 8"


def _theta_ring():
    x1 = measures.ThetaElement(-2, -1)
    two, four = measures.ThetaElement.scalar(2), measures.ThetaElement.scalar(4)
    if two + four * x1 + x1 * x1 != x1:
        return False, "x1 != 2 + 4 x1 + x1^2"
    for n in range(7):
        if measures.theta_of(measures.point_stabilizer_quotient(n)) != measures.theta_c(n):
            return False, f"c_{n}"
    return True, "x1 = 2 + 4x1 + x1^2; c_n odd-denominator for n <= 6"


def _phi_functor_2x2():
    for kind in ("f2", "bool"):
        mats = linmon.enumerate_nonzero(kind, 2)
        images = {a.support: linmon.phi(a) for a in mats}
        for a in mats:
            for b in mats:
                lhs = linmon.phi(linmon.sr_multiply(a, b))
                if lhs != permcat.compose(images[a.support], images[b.support], "oracle"):
                    return False, f"{kind}: {a.support:x} * {b.support:x}"
    return True, "225 pairs per semiring against the raw definition"


def _phi_kron_2x2(limit: int | None = None):
    for kind in ("f2", "bool"):
        mats = linmon.enumerate_nonzero(kind, 2)
        images = {a.support: linmon.phi(a) for a in mats}
        pairs = list(itertools.product(mats, mats))[:limit]
        for a, b in pairs:
            if linmon.phi(linmon.sr_kron(a, b)) != permcat.tensor_matrix(images[a.support], images[b.support]):
                return False, f"{kind}: {a.support:x} (x) {b.support:x}"
    return True, f"{len(pairs)} pairs per semiring"


def _phi_functor_3x3(count: int = 200, seed: int = 7):
    rng = np.random.default_rng(seed)
    for kind in ("f2", "bool"):
        for _ in range(count):
            a = linmon.SRMatrix(linmon.kind_of(kind), 3, 3, int(rng.integers(1, 512)))
            b = linmon.SRMatrix(linmon.kind_of(kind), 3, 3, int(rng.integers(1, 512)))
            if linmon.phi(linmon.sr_multiply(a, b)) != permcat.compose(linmon.phi(a), linmon.phi(b), "lemma"):
                return False, f"{kind}: {a.support:x} * {b.support:x}"
    return True, f"{count} random pairs per semiring via the chain-set route"


def _composition_paths(seed: int = 3):
    rng = np.random.default_rng(seed)
    for m in (measures.MU, measures.NU):
        for a, b, c in ((1, 2, 2), (2, 2, 2), (2, 3, 2), (3, 2, 2), (2, 2, 3)):
            x = permcat.random_matrix(m, permcat.y_object(a), permcat.y_object(b), rng, density=0.4)
            y = permcat.random_matrix(m, permcat.y_object(b), permcat.y_object(c), rng, density=0.4)
            o = permcat.compose(y, x, "oracle")
            if o != permcat.compose(y, x, "fast") or o != permcat.compose(y, x, "lemma"):
                return False, f"{m.name} shape {(a, b, c)}"
    return True, "oracle = lemma = fast on random matrices"


def _category_axioms():
    for m in (measures.MU, measures.NU):
        for n in (1, 2, 3):
            obj = permcat.x_object(n)
            ident = permcat.identity_matrix(m, obj)
            s1, s2 = permcat.snake_composites(m, obj)
            if s1 != ident or s2 != ident:
                return False, f"snake, {m.name}, X({n})"
        for n in range(1, 5):
            for obj, value in ((permcat.x_object(n), m.piece(n)), (permcat.y_object(n), measures.y_measure(m, n))):
                if permcat.dimension(m, obj) != value or permcat.dimension(m, obj, "closed") != value:
                    return False, f"dimension, {m.name}, n={n}"
    return True, "snakes for X(1..3); dimension = measure up to size 4"


def _classification():
    amp = [s.mask for s in enumerate_ample((2, 2))]
    valid = 0
    for r in range(len(amp) + 1):
        for fam in itertools.combinations(amp, r):
            f = gsets.EqRelFamily(2, frozenset(fam))
            if gsets.eqrel_validate(f):
                gsets.eqrel_classify(f)
                valid += 1
    for group in gsets.subgroups(3):
        q = gsets.eqrel_classify(gsets.eqrel_from_group(group))
        if q.base != 3 or q.group != tuple(sorted(group)):
            return False, f"group {group}"
    return valid == 3, f"{valid} valid families of 128 on [2]; all 6 subgroups of S3 recovered"


def _semisimple_small():
    for kind in ("f2", "bool"):
        for n in (1, 2):
            rep = linmon.semisimplicity_report(kind, n)
            if kind == "f2" and not rep.semisimple:
                return False, f"f2 n={n} radical_dim {rep.radical_dim}"
    return True, "f2 n=1,2 semisimple"


def _f2_n3():
    rep = linmon.semisimplicity_report("f2", 3)
    return rep.semisimple and rep.radical_dim == 0, f"f2 n=3 radical_dim = {rep.radical_dim}"


def _bool_n3():
    rep = linmon.semisimplicity_report("bool", 3)
    return (not rep.semisimple) and rep.radical_dim > 0, f"bool n=3 radical_dim = {rep.radical_dim} > 0"


def _witness():
    w = linmon.find_trace_witness(3)
    ok = w is not None and w.trace != 0 and w.element.power(w.nilpotency_exponent).is_zero()
    return ok, f"trace {w.trace}, nilpotency exponent {w.nilpotency_exponent}" if w else "no witness"


CHECKS: list[tuple[str, str, Callable]] = [
    ("ample count", "quick", _ample_count),
    ("elementary squares", "quick", _elementary_squares),
    ("measure solve", "quick", _measure_solve),
    ("regularity identity", "quick", _regularity),
    ("y measure", "quick", _y_table),
    ("theta ring", "quick", _theta_ring),
    ("phi multiplicative 2x2", "quick", _phi_functor_2x2),
    ("phi multiplicative 3x3", "quick", _phi_functor_3x3),
    ("phi kronecker 2x2", "quick", _phi_kron_2x2),
    ("composition paths", "quick", _composition_paths),
    ("category axioms", "quick", _category_axioms),
    ("classification", "quick", _classification),
    ("semisimple n<=2", "quick", _semisimple_small),
    ("f2 n=3 radical_dim = 0", "full", _f2_n3),
    ("bool n=3 radical_dim > 0", "full", _bool_n3),
    ("trace witness n=3", "full", _witness),
]


def run(level: str = "quick", only: list[str] | None = None) -> list[CheckResult]:
    levels = {"quick": ("quick",), "full": ("quick", "full")}[level]
    out = []
    for name, lvl, fn in CHECKS:
        if lvl not in levels or (only and name not in only):
            continue
        start = time.perf_counter()
        try:
            ok, detail = fn()
        except Exception as exc:  # a crashing check is a failed check
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        out.append(CheckResult(name, bool(ok), detail, time.perf_counter() - start))
    return out
