"""Acceptance gate: one test per criterion, each recording a PASS/FAIL line.

All comparisons are exact. Time limits are measured here and asserted too.
"""

import itertools
import time
from fractions import Fraction
from math import factorial

import numpy as np
import pytest

from cantor_perm import gsets, linmon, measures, permcat
from cantor_perm.errors import ArgumentError
from cantor_perm.exact import int_matvec
from cantor_perm.finsets import SetMap, count_ample_power2
from cantor_perm.measures import MU, NU

from conftest import record_criterion

MEASURES = (MU, NU)


def gate(number, name, ok, detail):
    record_criterion(number, name, bool(ok), detail)
    assert ok, detail


def surjections(a, c):
    for table in itertools.product(range(c), repeat=a):
        if len(set(table)) == c:
            yield gsets.GMap(SetMap.from_table(table, c))


def test_criterion_01_growth():
    want = [1, 7, 193, 63775]
    t0 = time.perf_counter()
    enum = [count_ample_power2(n, "enumerate") for n in range(1, 5)]
    t_enum = time.perf_counter() - t0
    t0 = time.perf_counter()
    ie = [count_ample_power2(n, "inclusion_exclusion") for n in range(1, 5)]
    t_ie = time.perf_counter() - t0
    ok = enum == want and ie == want and t_enum <= 10 and t_ie < 0.1
    gate(1, "growth", ok, f"enum {enum} in {t_enum:.2f}s, formula {ie} in {t_ie * 1000:.1f}ms")


def test_criterion_02_measure_uniqueness():
    roots = measures.solve_regular_parameters()
    t0 = time.perf_counter()
    pairs = bad = 0
    for c in range(1, 5):
        maps = [f for a in range(c, 5) for f in surjections(a, c)]
        for f, g in itertools.product(maps, maps):
            z = gsets.x_product_decompose(f, g)
            for m in MEASURES:
                if measures.eval_measure(m, z) * m.piece(c) != m.piece(f.source_size) * m.piece(g.source_size):
                    bad += 1
            pairs += 1
    elapsed = time.perf_counter() - t0
    ok = roots == [Fraction(-2), Fraction(-1)] and bad == 0 and elapsed <= 30
    gate(2, "measure uniqueness", ok,
         f"roots {[str(r) for r in roots]}; {pairs} surjection pairs, {bad} violations, {elapsed:.1f}s")


def test_criterion_03_elementary_squares():
    # n = #A = 1 + #C; at n = 1 the codomain would be empty, so no elementary map exists
    with pytest.raises(ArgumentError):
        gsets.elementary_map(1, 0)
    checked = []
    ok = True
    for n in range(2, 5):
        same = gsets.x_product_decompose(gsets.elementary_map(n, 0), gsets.elementary_map(n, 0))
        ok &= same.untagged() == gsets.FormalGSet.from_sizes({n + 2: 1, n + 1: 4, n: 2})
        checked.append(f"n={n} same: {same.untagged()}")
        if n >= 3:  # two distinct points need #C >= 2
            diff = gsets.x_product_decompose(gsets.elementary_map(n, 0), gsets.elementary_map(n, 1))
            ok &= diff.untagged() == gsets.FormalGSet.from_sizes({n + 1: 1})
            checked.append(f"n={n} distinct: {diff.untagged()}")
    gate(3, "elementary squares", ok, "; ".join(checked))


def test_criterion_04_y_measure_table():
    rows = []
    ok = True
    for n in range(9):
        mu_c, mu_d = measures.y_measure(MU, n), measures.y_measure(MU, n, "decompose")
        nu_c, nu_d = measures.y_measure(NU, n), measures.y_measure(NU, n, "decompose")
        ok &= mu_c == mu_d == n % 2 and nu_c == nu_d == (1 if n >= 1 else 0)
        rows.append(f"{mu_d}/{nu_d}")
    gate(4, "Y-measure table", ok, "mu/nu for n=0..8: " + " ".join(rows))


def test_criterion_05_theta_ring():
    x1 = measures.theta_of(gsets.FormalGSet.of([2]))
    two, four = measures.ThetaElement.scalar(2), measures.ThetaElement.scalar(4)
    ok = x1 == measures.ThetaElement(-2, -1) and two + four * x1 + x1 * x1 == x1
    cs = []
    for n in range(7):
        c = measures.theta_c(n)
        ok &= c.mu.denominator % 2 == 1
        ok &= c == measures.ThetaElement(Fraction((-2) ** n, factorial(n)), Fraction((-1) ** n, factorial(n)))
        ok &= measures.theta_of(measures.point_stabilizer_quotient(n)) == c
        cs.append(f"({c.mu},{c.nu})")
    gate(5, "theta ring", ok, f"x1 = {x1.to_json()}; c_0..c_6 = {' '.join(cs)}")


def _phi_battery(kind):
    t0 = time.perf_counter()
    k = linmon.kind_of(kind)
    mats = linmon.enumerate_nonzero(kind, 2)
    images = {a.support: linmon.phi(a) for a in mats}
    mult = sum(
        linmon.phi(linmon.sr_multiply(a, b)) == permcat.compose(images[a.support], images[b.support], "oracle")
        for a, b in itertools.product(mats, mats))
    kron = sum(
        linmon.phi(linmon.sr_kron(a, b)) == permcat.tensor_matrix(images[a.support], images[b.support])
        for a, b in itertools.product(mats, mats))
    rng = np.random.default_rng(2024 + k)
    big = 0
    for _ in range(200):
        a = linmon.SRMatrix(k, 3, 3, int(rng.integers(1, 512)))
        b = linmon.SRMatrix(k, 3, 3, int(rng.integers(1, 512)))
        big += linmon.phi(linmon.sr_multiply(a, b)) == permcat.compose(linmon.phi(a), linmon.phi(b), "lemma")
    elapsed = time.perf_counter() - t0
    ok = len(mats) == 15 and mult == 225 and kron == 225 and big == 200 and elapsed <= 120
    return ok, f"2x2 products {mult}/225 (oracle), 3x3 products {big}/200 (lemma), kronecker {kron}/225, {elapsed:.1f}s"


def test_criterion_06_phi_over_f2_with_mu():
    ok, detail = _phi_battery("f2")
    gate(6, "phi is a tensor functor over F2 (mu)", ok, detail)


def test_criterion_07_phi_over_bool_with_nu():
    ok, detail = _phi_battery("bool")
    gate(7, "phi is a tensor functor over the Boolean semiring (nu)", ok, detail)


def _stratum_basis(m, a, b):
    src, tgt = permcat.y_object(a), permcat.y_object(b)
    nbits = a * b
    return [permcat.indicator_matrix(m, a, b, d, "X") for d in range(1, 1 << nbits)], src, tgt


def test_criterion_08_composition_paths():
    modes = ("oracle", "lift", "fast", "lemma")
    exhaustive = random_ = 0
    ok = True
    for m in MEASURES:
        # exhaustive over pairs of orbit basis elements (composition is bilinear)
        for a, b, c in ((1, 2, 2), (2, 1, 2), (2, 2, 1), (2, 2, 2), (1, 3, 3), (3, 1, 3), (3, 3, 1),
                        (2, 2, 3), (2, 3, 2), (3, 2, 2)):
            lhs, _, _ = _stratum_basis(m, a, b)
            rhs, _, _ = _stratum_basis(m, b, c)
            for x in lhs:
                for y in rhs:
                    res = [permcat.compose(y, x, mode) for mode in modes]
                    ok &= all(r == res[0] for r in res[1:])
                    exhaustive += 1
        # random dense matrices up to 20 bits in the triple product
        rng = np.random.default_rng(11)
        # Y(4) x Y(4) has 2^16 strata, so the shapes with two 4-point factors use sparse matrices
        for (a, b, c), density in (((2, 2, 4), 0.5), ((2, 4, 2), 0.5), ((4, 2, 2), 0.5), ((2, 3, 3), 0.5),
                                   ((3, 2, 3), 0.5), ((3, 3, 2), 0.5), ((1, 4, 4), 0.02), ((4, 4, 1), 0.05)):
            for _ in range(2):
                x = permcat.random_matrix(m, permcat.y_object(a), permcat.y_object(b), rng, density=density)
                y = permcat.random_matrix(m, permcat.y_object(b), permcat.y_object(c), rng, density=density)
                res = [permcat.compose(y, x, mode) for mode in modes]
                ok &= all(r == res[0] for r in res[1:])
                random_ += 1
    gate(8, "composition paths agree", ok,
         f"{exhaustive} basis pairs (<= 12 bits) and {random_} random pairs (<= 20 bits), oracle = lift = fast = lemma")


def test_criterion_09_semisimple_f2():
    t0 = time.perf_counter()
    parts = []
    ok = True
    for n in (1, 2, 3):
        rep = linmon.semisimplicity_report("f2", n)
        ok &= rep.radical_dim == 0 and rep.semisimple and rep.certificate_prime is not None
        ok &= f"full rank {rep.algebra_dim}" in rep.certificate
        parts.append(f"n={n} radical_dim {rep.radical_dim} ({rep.certificate})")
    elapsed = time.perf_counter() - t0
    ok &= elapsed <= 15 * 60
    gate(9, "semisimplicity over F2", ok, "; ".join(parts) + f"; {elapsed:.1f}s")


def test_criterion_10_bool_not_semisimple():
    t0 = time.perf_counter()
    rep = linmon.semisimplicity_report("bool", 3)
    basis = linmon.radical_basis("bool", 3)
    g = linmon.gram_matrix("bool", 3)
    r = basis[0]
    vec = [r.terms.get(k, Fraction(0)) for k in range(1, 512)]
    in_kernel = not any(int_matvec(g, vec))
    k = linmon.nilpotency_exponent(r)
    elapsed = time.perf_counter() - t0
    ok = rep.radical_dim > 0 and in_kernel and k is not None and r.power(k).is_zero() and elapsed <= 30 * 60
    gate(10, "Boolean n=3 is not semisimple", ok,
         f"radical_dim {rep.radical_dim}; first kernel vector has {len(r.terms)} terms, "
         f"exact G v = 0: {in_kernel}, r^{k} = 0; {elapsed:.1f}s")


def test_criterion_11_trace_witness():
    w = linmon.find_trace_witness(3)
    categorical = permcat.trace(w.image, "categorical")
    closed = permcat.trace(w.image, "closed")
    k = w.nilpotency_exponent
    ok = (isinstance(categorical, Fraction) and categorical != 0 and categorical == closed == w.trace
          and k <= 511 and w.element.power(k).is_zero() and (k == 1 or not w.element.power(k - 1).is_zero()))
    gate(11, "trace witness", ok,
         f"radical element #{w.index} with {len(w.element.terms)} terms, r^{k} = 0, "
         f"categorical trace {categorical}, closed form {closed}")


def test_criterion_12_category_axioms():
    ok = True
    rng = np.random.default_rng(5)
    notes = []
    objs = [permcat.x_object(1), permcat.x_object(2), permcat.object_from_gset(gsets.FormalGSet.of([1, 2]))]
    for m in MEASURES:
        for p, q, r, s in itertools.product(objs, repeat=4):
            if rng.random() > 0.15:
                continue
            a = permcat.random_matrix(m, p, q, rng, density=0.6)
            b = permcat.random_matrix(m, q, r, rng, density=0.6)
            c = permcat.random_matrix(m, r, s, rng, density=0.6)
            ok &= (permcat.compose(c, permcat.compose(b, a, "lift"), "lift")
                   == permcat.compose(permcat.compose(c, b, "lift"), a, "lift"))
    notes.append("associativity on random triples")
    for m in MEASURES:
        for obj in [permcat.x_object(n) for n in (1, 2, 3)] + [permcat.y_object(2)]:
            s1, s2 = permcat.snake_composites(m, obj)
            ident = permcat.identity_matrix(m, obj)
            ok &= s1 == ident and s2 == ident
    notes.append("snakes for X(1), X(2), X(3), Y(2)")
    for m in MEASURES:
        for p, q in itertools.product(objs, repeat=2):
            a = permcat.random_matrix(m, p, q, rng, density=0.6)
            b = permcat.random_matrix(m, q, p, rng, density=0.6)
            ab, ba = permcat.compose(a, b, "lift"), permcat.compose(b, a, "lift")
            ok &= permcat.trace(ab) == permcat.trace(ba) == permcat.trace(ab, "closed")
    notes.append("tr(AB) = tr(BA)")
    count = 0
    for m in MEASURES:
        for n in range(1, 5):
            for obj, value in ((permcat.x_object(n), m.piece(n)), (permcat.y_object(n), measures.y_measure(m, n))):
                ok &= permcat.dimension(m, obj) == value == permcat.dimension(m, obj, "closed")
                count += 1
        for sizes in itertools.combinations_with_replacement(range(1, 5), 2):
            obj = permcat.object_from_gset(gsets.FormalGSet.of(list(sizes)))
            ok &= permcat.dimension(m, obj) == measures.eval_measure(m, obj.underlying())
            count += 1
    notes.append(f"dimension = measure on {count} objects with pieces up to size 4")
    gate(12, "category axioms", ok, "; ".join(notes))


def test_criterion_13_classification():
    from cantor_perm.finsets import enumerate_ample

    amp = [s.mask for s in enumerate_ample((2, 2))]
    families = [gsets.EqRelFamily(2, frozenset(f)) for r in range(len(amp) + 1) for f in itertools.combinations(amp, r)]
    valid = [f for f in families if gsets.eqrel_validate(f)]
    classes = sorted((q.base, q.order) for q in (gsets.eqrel_classify(f) for f in valid))
    groups = gsets.subgroups(3)
    round_trip = sum(
        (q.base, q.group) == (3, tuple(sorted(g)))
        for g in groups for q in [gsets.eqrel_classify(gsets.eqrel_from_group(g))])
    ok = len(families) == 128 and len(valid) == 3 and round_trip == len(groups) == 6
    gate(13, "classification", ok,
         f"{len(families)} families on [2], {len(valid)} valid, classified as (base, |group|) {classes}; "
         f"{round_trip}/6 subgroups of S3 recovered")
