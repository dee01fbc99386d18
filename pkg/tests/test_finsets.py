from itertools import product

import pytest
from hypothesis import given
from hypothesis import strategies as st

from cantor_perm.errors import ArgumentError, CapacityError
from cantor_perm.finsets import (
    FinSet,
    ProductSubset,
    SetMap,
    bits_of,
    count_ample_power2,
    enumerate_ample,
    fiber_image,
    fiber_product_subset,
    hex_to_mask,
    is_ample,
    mask_to_hex,
    project_subset,
    rank,
    unrank,
)


def brute_ample(sizes):
    """Every subset of the product, filtered by a direct surjectivity scan."""
    pts = list(product(*(range(n) for n in sizes)))
    out = []
    for mask in range(1, 1 << len(pts)):
        chosen = [p for k, p in enumerate(pts) if mask >> k & 1]
        if all({p[i] for p in chosen} == set(range(n)) for i, n in enumerate(sizes)):
            out.append(mask)
    return out


def test_finset_basics():
    assert FinSet(3) == FinSet(3)
    assert list(FinSet(3)) == [0, 1, 2]
    with pytest.raises(ArgumentError):
        FinSet(-1)


def test_setmap_validation_and_surjectivity():
    f = SetMap.from_table([0, 0, 1])
    assert f.surjective and f.cod.size == 2
    assert not SetMap.from_table([0, 0], 2).surjective
    with pytest.raises(ArgumentError):
        SetMap(FinSet(2), FinSet(1), (0, 1))
    g = SetMap.from_table([1, 0])
    assert g.compose(f).table == (1, 1, 0)


def test_mask_bit_order_is_last_coordinate_fastest():
    s = ProductSubset.from_points((2, 3), [(1, 2)])
    assert s.mask == 1 << 5
    assert rank((2, 3, 4), (1, 2, 3)) == (1 * 3 + 2) * 4 + 3


def test_mask_out_of_range_rejected():
    with pytest.raises(ArgumentError):
        ProductSubset((2, 2), 1 << 4)


@pytest.mark.parametrize(
    "points, coords, expected",
    [
        ([(0, 0), (1, 1)], [0], 0b11),
        ([(0, 0), (0, 1), (1, 0), (1, 1)], [1], 0b11),
        ([(0, 0), (0, 1)], [0], 0b01),
    ],
)
def test_project_subset(points, coords, expected):
    s = ProductSubset.from_points((2, 2), points)
    assert project_subset(s, coords).mask == expected


@pytest.mark.parametrize("coords", [[], [2], [1, 0], [0, 0]])
def test_project_subset_rejects_bad_coords(coords):
    with pytest.raises(ArgumentError):
        project_subset(ProductSubset.full((2, 2)), coords)


def test_is_ample_examples():
    assert is_ample(ProductSubset.from_points((2, 2), [(0, 0), (1, 1)]))
    assert not is_ample(ProductSubset.from_points((2, 2), [(0, 0), (0, 1)]))
    assert not is_ample(ProductSubset((1, 1), 0))


@pytest.mark.parametrize("sizes", [(2, 2), (1, 1), (2, 1), (3, 2), (2, 2, 2), (1, 3)])
def test_enumerate_ample_matches_brute_force(sizes):
    assert [s.mask for s in enumerate_ample(sizes)] == brute_ample(sizes)


def test_enumerate_ample_small_cases():
    assert len(enumerate_ample((2, 2))) == 7
    assert [s.mask for s in enumerate_ample((1, 1))] == [1]
    assert [s.mask for s in enumerate_ample((2, 1))] == [0b11]


def test_enumerate_ample_budget():
    with pytest.raises(CapacityError) as err:
        enumerate_ample((5, 5))
    assert "24" in str(err.value)
    assert len(enumerate_ample((2, 2), budget=4)) == 7


def test_budget_env_override(monkeypatch):
    monkeypatch.setenv("CANTOR_PERM_BUDGET_BITS", "3")
    with pytest.raises(CapacityError):
        enumerate_ample((2, 2))


def test_growth_counts():
    for n, want in {0: 1, 1: 1, 2: 7, 3: 193, 4: 63775}.items():
        assert count_ample_power2(n, "enumerate") == want
        assert count_ample_power2(n, "inclusion_exclusion") == want


def test_growth_enumerate_budget():
    with pytest.raises(CapacityError):
        count_ample_power2(5, "enumerate")
    # exact big integers on the formula side
    assert count_ample_power2(6, "ie") > 2 ** 63


def test_fiber_image_examples():
    const = SetMap.from_table([0, 0], 1)
    assert fiber_image(const, 0b11, "odd") == 0
    assert fiber_image(const, 0b11, "nonempty") == 0b1
    assert fiber_image(SetMap.identity(3), 0b101, "odd") == 0b101


def test_fiber_product_examples():
    const = SetMap.from_table([0, 0], 1)
    assert fiber_product_subset(const, const).mask == 0b1111
    ident = SetMap.identity(2)
    assert fiber_product_subset(ident, ident).mask == 0b1001
    f = SetMap.from_table([0, 0, 1])
    assert set(fiber_product_subset(f, ident).points()) == {(0, 0), (1, 0), (2, 1)}
    with pytest.raises(ArgumentError):
        fiber_product_subset(f, SetMap.identity(3))


def test_json_round_trip():
    s = ProductSubset.from_points((3, 4), [(2, 3), (0, 1)])
    data = s.to_json()
    assert data["mask_hex"] == mask_to_hex(s.mask) == format(s.mask, "x")
    assert ProductSubset.from_json(data) == s
    assert hex_to_mask("0xFF") == 255


sizes_st = st.lists(st.integers(1, 4), min_size=1, max_size=3)


@given(sizes_st, st.data())
def test_rank_unrank_round_trip(sizes, data):
    pt = tuple(data.draw(st.integers(0, n - 1)) for n in sizes)
    assert unrank(sizes, rank(sizes, pt)) == pt


@given(st.integers(1, 4), st.integers(1, 4), st.data())
def test_ample_iff_single_projections_full(a, b, data):
    mask = data.draw(st.integers(0, (1 << (a * b)) - 1))
    s = ProductSubset((a, b), mask)
    direct = mask != 0 and all(project_subset(s, [i]).mask == (1 << n) - 1 for i, n in enumerate((a, b)))
    assert is_ample(s) == direct


@given(st.lists(st.integers(0, 3), min_size=1, max_size=6), st.data())
def test_odd_image_inside_image(table, data):
    f = SetMap.from_table(table, 4)
    s = data.draw(st.integers(0, (1 << len(table)) - 1))
    odd, nonempty = fiber_image(f, s, "odd"), fiber_image(f, s, "nonempty")
    assert odd & ~nonempty == 0
    assert nonempty == sum(1 << b for b in {table[k] for k in bits_of(s)})
