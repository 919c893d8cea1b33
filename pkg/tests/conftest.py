"""Shared instances used across the suite.

The fixtures build the small canonical problems every layer gets tested
against: a quartic with two isolated minimizers, the quadratic whose
clique graph is a 3-cycle (sparse relaxation unbounded, dense exact), a
coupled quartic where the sparse bound is strictly below the dense one,
and the four-variable AM-GM polynomial.
"""

import pytest

from sparsesos.poly import Clique, Polynomial, SparseSum, parse_polynomial


def as_sum(n, parts):
    """Build a SparseSum from (variables, polynomial text) pairs."""
    return SparseSum(
        n, [(Clique(v), parse_polynomial(t, n)) for v, t in parts]
    )


@pytest.fixture
def worked_quartic():
    """(x1^2 - 1)^2 + (x1 - x2)^4 + (x2 - x3)^4, minimized at +-(1, 1, 1)."""
    return as_sum(
        3,
        [
            ((1,), "x1^4 - 2*x1^2 + 1"),
            ((1, 2), "x1^4 - 4*x1^3*x2 + 6*x1^2*x2^2 - 4*x1*x2^3 + x2^4"),
            ((2, 3), "x2^4 - 4*x2^3*x3 + 6*x2^2*x3^2 - 4*x2*x3^3 + x3^4"),
        ],
    )


@pytest.fixture
def triangle_quadratic():
    """Cliques {1,2}, {2,3}, {1,3}: f = (x1 + x2 + x3)^2.

    The clique graph is a 3-cycle, so no running intersection order
    exists; the per-clique relaxation has no lower bound while the dense
    relaxation is exact with value 0.
    """
    return as_sum(
        3,
        [
            ((1, 2), "0.5*x1^2 + 2*x1*x2 + 0.5*x2^2"),
            ((2, 3), "0.5*x2^2 + 2*x2*x3 + 0.5*x3^2"),
            ((1, 3), "0.5*x1^2 + 2*x1*x3 + 0.5*x3^2"),
        ],
    )


@pytest.fixture
def coupled_quartic():
    """x1^4 + (x1 x2 - 1)^2 + x2^2 x3^2 + (x3^2 - 1)^2.

    A chain-structured quartic where the summand-wise bound sits
    strictly below the dense bound, which itself sits below the true
    minimum (about 0.8650): certified gaps at every level.
    """
    return as_sum(
        3,
        [
            ((1, 2), "x1^4 + x1^2*x2^2 - 2*x1*x2 + 1"),
            ((2, 3), "x2^2*x3^2 + x3^4 - 2*x3^2 + 1"),
        ],
    )


@pytest.fixture
def amgm_quartic():
    """x1^4 + x2^4 + x3^4 + x4^4 - 4 x1 x2 x3 x4, nonnegative by AM-GM."""
    return parse_polynomial("x1^4 + x2^4 + x3^4 + x4^4 - 4*x1*x2*x3*x4", 4)
