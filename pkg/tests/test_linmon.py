from fractions import Fraction

import numpy as np
import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from cantor_perm import linmon, permcat
from cantor_perm.errors import ArgumentError, CapacityError
from cantor_perm.exact import solve_in_span
from cantor_perm.linmon import MonAlgElement, SRMatrix


def plain_mul(kind, a, b):
    """Row-by-column product of 0/1 lists, the textbook way."""
    n, k, m = len(a), len(b), len(b[0])
    out = []
    for i in range(n):
        row = []
        for j in range(m):
            s = sum(a[i][t] * b[t][j] for t in range(k))
            row.append(s % 2 if kind == "f2" else int(s > 0))
        out.append(row)
    return out


def matrices(n):
    return [SRMatrix(linmon.kind_of("f2"), n, n, m).to_rows() for m in range(1 << (n * n))]


def brute_gram(kind, n):
    mats = [tuple(map(tuple, r)) for r in matrices(n)][1:]
    zero = tuple((0,) * n for _ in range(n))

    def mul(a, b):
        return tuple(map(tuple, plain_mul(kind, a, b)))

    def tr(p):
        return sum(1 for c in mats if mul(p, c) == c) if p != zero else 0

    return [[tr(mul(a, b)) for b in mats] for a in mats]


@pytest.mark.parametrize("kind", ["f2", "bool"])
@given(data=st.data())
def test_sr_multiply_matches_plain(kind, data):
    r, k, c = data.draw(st.integers(1, 3)), data.draw(st.integers(1, 3)), data.draw(st.integers(1, 3))
    a = SRMatrix(linmon.kind_of(kind), r, k, data.draw(st.integers(0, (1 << (r * k)) - 1)))
    b = SRMatrix(linmon.kind_of(kind), k, c, data.draw(st.integers(0, (1 << (k * c)) - 1)))
    assert linmon.sr_multiply(a, b).to_rows() == plain_mul(kind, a.to_rows(), b.to_rows())


def test_sr_basics():
    a = SRMatrix.from_rows("bool", [[1, 1], [0, 1]])
    assert linmon.sr_multiply(a, a).to_rows() == [[1, 1], [0, 1]]
    f = SRMatrix.from_rows("f2", [[1, 1], [0, 1]])
    assert linmon.sr_multiply(f, f).to_rows() == [[1, 0], [0, 1]]
    assert linmon.sr_kron(SRMatrix.identity("f2", 2), f).to_rows()[2:] == [[0, 0, 1, 1], [0, 0, 0, 1]]
    with pytest.raises(ArgumentError):
        linmon.sr_multiply(a, f)
    with pytest.raises(ArgumentError):
        linmon.kind_of("tropical")
    with pytest.raises(CapacityError):
        linmon.enumerate_nonzero("f2", 6)


@pytest.mark.parametrize("kind", ["f2", "bool"])
def test_phi_multiplicative_small(kind):
    mats = linmon.enumerate_nonzero(kind, 2)[::3]
    for a in mats:
        for b in mats:
            lhs = linmon.phi(linmon.sr_multiply(a, b))
            assert lhs == permcat.compose(linmon.phi(a), linmon.phi(b), "oracle")


def test_phi_identity():
    for kind in ("f2", "bool"):
        ident = linmon.phi(SRMatrix.identity(kind, 2))
        assert ident == permcat.identity_matrix(linmon.measure_for(linmon.kind_of(kind)), permcat.y_object(2))


def test_element_arithmetic():
    u = MonAlgElement.basis("bool", 2, 0b0010)
    assert (u * u).is_zero()
    assert u.power(1) == u
    assert linmon.nilpotency_exponent(u) == 2
    e = MonAlgElement.basis("bool", 2, 0b1001)
    assert e * e == e and linmon.nilpotency_exponent(e) is None
    assert (u + u.scale(-1)).is_zero()
    with pytest.raises(ArgumentError):
        MonAlgElement.basis("bool", 2, 0)
    with pytest.raises(ArgumentError):
        u * MonAlgElement.basis("f2", 2, 1)


@pytest.mark.parametrize("kind", ["f2", "bool"])
@pytest.mark.parametrize("n", [1, 2])
def test_gram_matches_brute_force(kind, n):
    g = linmon.gram_matrix(kind, n)
    assert g.tolist() == brute_gram(kind, n)
    assert np.array_equal(g, g.T)


@pytest.mark.parametrize("kind", ["f2", "bool"])
@pytest.mark.parametrize("n", [1, 2])
def test_small_radicals_against_sympy(kind, n):
    g = linmon.gram_matrix(kind, n)
    rep = linmon.semisimplicity_report(kind, n)
    assert rep.radical_dim == g.shape[0] - sympy.Matrix(g.tolist()).rank()
    if kind == "f2":
        assert rep.semisimple


def test_bool_two_report():
    rep = linmon.semisimplicity_report("bool", 2)
    assert rep.algebra_dim == 15
    assert rep.to_json()["kind"] == "bool"


@pytest.fixture(scope="module")
def bool3_radical():
    return linmon.radical_basis("bool", 3)


def test_bool_three_radical_dimension(bool3_radical):
    assert len(bool3_radical) == 42
    rep = linmon.semisimplicity_report("bool", 3)
    assert rep.radical_dim == 42 and not rep.semisimple


def test_radical_is_an_ideal(bool3_radical):
    vecs = [[r.terms.get(m, Fraction(0)) for m in range(1, 512)] for r in bool3_radical]
    rng = np.random.default_rng(0)
    for r in (bool3_radical[0], bool3_radical[17], bool3_radical[-1]):
        for m in rng.integers(1, 512, size=3):
            u = MonAlgElement.basis("bool", 3, int(m))
            for prod_ in (u * r, r * u):
                target = [prod_.terms.get(k, Fraction(0)) for k in range(1, 512)]
                assert solve_in_span(vecs, target) is not None


def test_radical_elements_nilpotent(bool3_radical):
    for r in bool3_radical:
        k = linmon.nilpotency_exponent(r, limit=16)
        assert k is not None and r.power(k).is_zero()


def test_f2_three_semisimple():
    rep = linmon.semisimplicity_report("f2", 3)
    assert rep.radical_dim == 0 and rep.certificate_prime == 2147483647
    assert "full rank 511" in rep.certificate


def test_trace_witness():
    w = linmon.find_trace_witness(3)
    assert w.trace != 0 and w.trace == w.trace_closed
    assert w.trace == permcat.trace(w.image, "closed")
    assert w.element.power(w.nilpotency_exponent).is_zero()
    assert w.nilpotency_exponent <= 511
    assert linmon.find_trace_witness(2, "f2") is None


def test_indicator_trace_matches_categorical():
    for kind in ("f2", "bool"):
        m = linmon.measure_for(linmon.kind_of(kind))
        for mask in (0b1001, 0b0110, 0b1111, 0b0001):
            img = linmon.phi(SRMatrix(linmon.kind_of(kind), 2, 2, mask))
            assert linmon.indicator_trace(m, 2, mask) == permcat.trace(img)


def test_indicator_trace_closed_values():
    # k diagonal entries contribute sum_s C(k, s) alpha^(s-1)
    from cantor_perm.measures import MU, NU

    full = (1 << 9) - 1
    assert linmon.indicator_trace(NU, 3, full) == 1
    assert linmon.indicator_trace(MU, 3, full) == 1
    assert linmon.indicator_trace(MU, 3, 0b000010000) == 1
    assert [linmon.indicator_trace(MU, 2, m) for m in (0b0001, 0b1001)] == [1, 0]
    assert all(linmon.indicator_trace(NU, n, sum(1 << (i * n + i) for i in range(n))) == 1 for n in (1, 2, 3))
