import random
from fractions import Fraction as F

import pytest

from plmpoly import DirectedMetric, ExtReal, Plm, TropMatrix


@pytest.fixture
def ex1():
    """Three texts r, c, rc with Pr(rc|r)=1/2, Pr(rc|c)=1/3."""
    return Plm(
        [("r",), ("c",), ("r", "c")],
        "two-sided",
        {(0, 2): F(1, 2), (1, 2): F(1, 3)},
    )


@pytest.fixture
def ex1_full():
    """Same model with the empty text adjoined below everything."""
    return Plm(
        [(), ("r",), ("c",), ("r", "c")],
        "two-sided",
        {
            (0, 1): F(1, 3),
            (0, 2): F(1, 2),
            (0, 3): F(1, 6),
            (1, 3): F(1, 2),
            (2, 3): F(1, 3),
        },
    )


def make_d2(t, n=3) -> DirectedMetric:
    """All off-diagonal distances equal to -log t, 0 < t < 1."""
    t = F(t)
    assert 0 < t < 1
    rows = [
        [ExtReal.from_prob(1 if i == j else t) for j in range(n)]
        for i in range(n)
    ]
    return DirectedMetric(TropMatrix(rows))


@pytest.fixture(params=[F(1, 3), F(1, 2), F(9, 10)])
def d2(request):
    return make_d2(request.param)


def seeded(seed: int) -> random.Random:
    return random.Random(seed)
