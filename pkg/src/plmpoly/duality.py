"""Order-reversing duality between the lower and upper polyhedra.

Over the extended reals (-inf legal, (min,+) convention) the maps
A(y) = d_min(-y) and B(x) = d_min^t(-x) form an adjoint pair,
D(A y, x) = D^t(y, B x), restrict to mutually inverse anti-isometries
between the two extended polyhedra, and act there as plain negation.
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import DirectedMetric
from .polyhedron import Side, membership
from .tropical import TropVector, min_plus_apply, neg, tmin_all, tmul


def map_a(d: DirectedMetric, y: TropVector) -> TropVector:
    """A(y) = d applied (min,+) to the negated vector."""
    return min_plus_apply(d.mat, y.negated())


def map_b(d: DirectedMetric, x: TropVector) -> TropVector:
    """B(x) = transposed d applied (min,+) to the negated vector."""
    return min_plus_apply(d.mat.transpose(), x.negated())


def side_map(d: DirectedMetric, x: TropVector, side: Side) -> TropVector:
    """The map whose fixed-part domain is the given side: B on lower, A on upper."""
    return map_b(d, x) if side is Side.LOWER else map_a(d, x)


def check_fixed_negation(d: DirectedMetric, x: TropVector, side: Side) -> bool:
    """On members of a side's extended polyhedron the side map is negation."""
    if not membership(x, d, side):
        raise ValueError("vector is not in the side's extended polyhedron")
    return side_map(d, x, side) == x.negated()


@dataclass(frozen=True)
class DualityReport:
    """Both linear-system identities for one generator, already verified."""

    index: int
    yoneda: TropVector  # column of d, written as a span of columns
    negated: TropVector  # its negation, written as a span of rows


def dual_decompose(d: DirectedMetric, k: int) -> DualityReport:
    """Exactly verify both decompositions attached to generator k.

    Column identity: d[:,k] equals the (min,+) span of the columns d[:,j]
    with coefficients d[j,k].  Negated identity: -d[:,k] equals the span of
    the *rows* d[j,:] with the negated coefficients -d[j,k].  Both run over
    every j: the (min,+) rule (-inf) + (+inf) = +inf keeps +inf coefficients
    harmless in the first sum, and in the second the term j = i supplies the
    -inf coordinates wherever d[i,k] = +inf.
    """
    if not 0 <= k < d.n:
        raise IndexError(f"index {k} out of range")
    n = d.n
    primal = TropVector(
        tmin_all(tmul(d[j, k], d[i, j]) for j in range(n)) for i in range(n)
    )
    assert primal.coords == d.mat.column(k)

    negated = TropVector(
        (
            tmin_all(tmul(neg(d[j, k]), d[j, i]) for j in range(n))
            for i in range(n)
        ),
        extended=True,
    )
    expected = TropVector(d.mat.column(k)).negated()
    assert negated == expected
    return DualityReport(index=k, yoneda=primal, negated=negated)
