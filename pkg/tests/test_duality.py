from fractions import Fraction as F

import pytest

from plmpoly import (
    ExtReal,
    NEG_INF,
    POS_INF,
    Side,
    TropVector,
    check_fixed_negation,
    co_yoneda,
    dual_decompose,
    funk,
    map_a,
    map_b,
    membership,
    metric_from_plm,
    random_extended_vector,
    random_member,
    random_plm,
    side_map,
    vector_to_strings,
    yoneda,
)
from conftest import seeded


def test_map_a_frozen(ex1):
    d = metric_from_plm(ex1)
    # A applied to the co-generator of r: (0, -inf, -log 2)
    out = map_a(d, co_yoneda(d, 0))
    assert out.coords == (
        ExtReal.from_prob(1),
        NEG_INF,
        ExtReal.from_prob(2),
    )


def test_negated_yoneda_frozen(ex1):
    d = metric_from_plm(ex1)
    x = yoneda(d, 2).negated()
    assert vector_to_strings(x) == ["2", "3", "1"]


def test_adjunction_exact_random():
    rng = seeded(17)
    for _ in range(50):
        m = random_plm(rng)
        d = metric_from_plm(m)
        for _ in range(8):
            y = random_extended_vector(rng, d.n)
            x = random_extended_vector(rng, d.n)
            assert funk(map_a(d, y), x) == funk(map_b(d, x), y)


def test_fixed_negation_on_members(ex1):
    d = metric_from_plm(ex1)
    for k in range(3):
        assert check_fixed_negation(d, yoneda(d, k), Side.LOWER)
        assert check_fixed_negation(d, co_yoneda(d, k), Side.UPPER)
    with pytest.raises(ValueError):
        check_fixed_negation(d, TropVector.from_probs([F(1, 4), F(1, 3), 1]), Side.LOWER)


def test_fixed_negation_random():
    rng = seeded(23)
    for _ in range(30):
        m = random_plm(rng, n=rng.randint(3, 6))
        d = metric_from_plm(m)
        for side in (Side.LOWER, Side.UPPER):
            dm = d if side is Side.LOWER else d.transpose()
            x = random_member(rng, dm)
            assert membership(x, d, side)
            assert check_fixed_negation(d, x, side)


def test_maps_interchange_polyhedra():
    rng = seeded(29)
    for _ in range(25):
        m = random_plm(rng, n=rng.randint(3, 6))
        d = metric_from_plm(m)
        x = random_member(rng, d)  # lower member
        y = map_b(d, x)
        assert y == x.negated()
        # round trip A(B(x)) returns x on the lower polyhedron
        assert map_a(d, y) == x


def test_dual_decompose_verifies(ex1, ex1_full):
    for m in (ex1, ex1_full):
        d = metric_from_plm(m)
        for k in range(d.n):
            rep = dual_decompose(d, k)
            assert rep.yoneda == yoneda(d, k)
            assert rep.negated == yoneda(d, k).negated()
    with pytest.raises(IndexError):
        dual_decompose(metric_from_plm(ex1), 7)


def test_dual_decompose_random():
    rng = seeded(31)
    for _ in range(30):
        m = random_plm(rng)
        d = metric_from_plm(m)
        for k in range(d.n):
            dual_decompose(d, k)  # internal exact asserts


def test_negation_pairs_off_order_coordinates(ex1):
    d = metric_from_plm(ex1)
    # Y(r) = (0, +inf, +inf): its negation must flip the +inf to -inf
    out = side_map(d, yoneda(d, 0), Side.LOWER)
    assert out.coords == (ExtReal.from_prob(1), NEG_INF, NEG_INF)
    assert out == yoneda(d, 0).negated()
    assert POS_INF not in out.coords
