from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from cantor_perm import gsets, measures
from cantor_perm.errors import ArgumentError, IntegrityError
from cantor_perm.gsets import FormalGSet, GMap
from cantor_perm.measures import MU, NU, ThetaElement


def test_piece_values():
    assert [MU.piece(n) for n in range(1, 5)] == [1, -2, 4, -8]
    assert [NU.piece(n) for n in range(1, 5)] == [1, -1, 1, -1]


def test_unknown_measure():
    with pytest.raises(ArgumentError):
        measures.measure_by_name("lambda")
    with pytest.raises(ArgumentError):
        measures.MeasureSpec(3, "mu")


def test_eval_is_additive():
    a, b = FormalGSet.of([1, 3]), FormalGSet.from_sizes({2: 3})
    for m in (MU, NU):
        assert measures.eval_measure(m, a + b) == measures.eval_measure(m, a) + measures.eval_measure(m, b)


def test_map_measure_is_multiplicative():
    f = GMap.from_table([0, 1, 2, 2])
    g = GMap.from_table([0, 0, 1])
    for m in (MU, NU):
        assert measures.map_measure(m, g.compose(f)) == measures.map_measure(m, g) * measures.map_measure(m, f)


def test_constraints_polynomials():
    cons = measures.regularity_constraints(4)
    same = [c for c in cons if c.case == "same_point"]
    for c in same:
        assert c.residual(-2) == 0 and c.residual(-1) == 0
        assert c.residual(1) != 0
    distinct = [c for c in cons if c.case == "distinct_points"]
    assert all(c.poly.is_zero for c in distinct)


def test_solve_regular_parameters():
    assert measures.solve_regular_parameters() == [Fraction(-2), Fraction(-1)]


@given(st.integers(1, 3), st.data())
def test_regularity_identity_random(c, data):
    def surj():
        n = data.draw(st.integers(c, 4))
        t = data.draw(st.lists(st.integers(0, c - 1), min_size=n, max_size=n).filter(lambda t: len(set(t)) == c))
        return GMap.from_table(t, c)

    f, g = surj(), surj()
    z = gsets.x_product_decompose(f, g)
    for m in (MU, NU):
        assert measures.eval_measure(m, z) * m.piece(c) == m.piece(f.source_size) * m.piece(g.source_size)


@pytest.mark.parametrize("n", range(9))
def test_y_measure(n):
    assert measures.y_measure(MU, n) == measures.y_measure(MU, n, "decompose") == n % 2
    assert measures.y_measure(NU, n) == measures.y_measure(NU, n, "decompose") == (1 if n else 0)


def test_quotient_measure():
    q = gsets.QuotientDescription(2, [(0, 1), (1, 0)])
    assert measures.quotient_measure(MU, q) == -1
    assert measures.quotient_measure(NU, q) == Fraction(-1, 2)


def test_theta_even_denominator_rejected():
    with pytest.raises(IntegrityError):
        ThetaElement(Fraction(1, 2), 0)


def test_theta_fixed_point_equation():
    x1 = measures.theta_of(FormalGSet.of([2]))
    assert x1 == ThetaElement(-2, -1)
    assert ThetaElement.scalar(2) + ThetaElement.scalar(4) * x1 + x1 * x1 == x1
    assert measures.theta_arith(x1, x1, "mul") == ThetaElement(4, 1)
    with pytest.raises(ArgumentError):
        measures.theta_arith(x1, x1, "div")


@pytest.mark.parametrize("n", range(7))
def test_theta_c(n):
    c = measures.theta_c(n)
    assert c.mu.denominator % 2 == 1
    assert measures.theta_of(measures.point_stabilizer_quotient(n)) == c


def test_theta_of_s2_quotient():
    q = gsets.QuotientDescription(2, gsets.symmetric_group(2))
    assert measures.theta_of(q).to_json() == {"mu": "-1/1", "nu": "-1/2"}
    assert measures.theta_of(measures.point_stabilizer_quotient(2)).to_json() == {"mu": "2/1", "nu": "1/2"}
