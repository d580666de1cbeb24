"""
Tests for exact rational scalars and matrices
"""

from fractions import Fraction

import numpy as np
import pytest

from tropnet.exact import ExactMatrix, as_fraction, exactify, format_rational, parse_rational, rank
from tropnet.exceptions import DimensionMismatchError, NonFiniteValueError, ValidationError


def test_exactify_is_exact_for_doubles():
    """0.1 as a double is a dyadic rational, not one tenth"""
    q = exactify(0.1)
    assert q != Fraction(1, 10)
    assert q.denominator == 2**55
    assert float(q) == 0.1


@pytest.mark.parametrize("value", [float("nan"), float("inf"), float("-inf")])
def test_exactify_rejects_non_finite(value):
    with pytest.raises(NonFiniteValueError):
        exactify(value)


def test_parse_and_format_rationals():
    assert parse_rational("3/4") == Fraction(3, 4)
    assert parse_rational(" -6/8 ") == Fraction(-3, 4)
    assert parse_rational("0.1") == Fraction(1, 10)
    assert parse_rational("7") == Fraction(7)
    assert format_rational(Fraction(3)) == "3"
    assert format_rational(Fraction(-3, 4)) == "-3/4"
    assert parse_rational(format_rational(Fraction(22, 7))) == Fraction(22, 7)


@pytest.mark.parametrize("text", ["", "abc", "1/0", "1//2"])
def test_parse_rational_rejects_garbage(text):
    with pytest.raises(ValidationError):
        parse_rational(text)


def test_as_fraction_rejects_booleans():
    with pytest.raises(ValidationError):
        as_fraction(True)


@pytest.mark.parametrize(
    "rows, expected",
    [
        ([[1, 2], [2, 4]], 1),
        ([[1, 0, 0], [0, 1, 0], [0, 0, 1]], 3),
        ([[Fraction(1, 2), Fraction(1, 3)], [Fraction(1, 4), Fraction(1, 6)]], 1),
        ([[0, 1], [1, 0]], 2),
        ([[1, 2, 3], [4, 5, 6], [7, 8, 9]], 2),
        ([[0, 0, 1], [0, 0, 2]], 1),
        ([[0, 0], [0, 0]], 0),
    ],
)
def test_rank(rows, expected):
    assert rank(ExactMatrix.from_rows(rows)) == expected


def test_matrix_shape_checks():
    with pytest.raises(DimensionMismatchError):
        ExactMatrix.from_rows([[1, 2], [3]])
    M = ExactMatrix.from_rows([[1, 2], [3, 4]])
    with pytest.raises(DimensionMismatchError):
        M.matvec([Fraction(1)])


def test_matrix_operations():
    M = ExactMatrix.from_rows([[1, 2, 3], [4, 5, 6]])
    assert M.shape == (2, 3)
    assert M.transpose().row(0) == (1, 4)
    assert M.matvec([1, 0, -1]) == (Fraction(-2), Fraction(-2))
    assert M.scale(Fraction(1, 2))[1, 1] == Fraction(5, 2)
    assert ExactMatrix.vstack([M, M]).rows == 4
    assert ExactMatrix.from_json(M.to_json()) == M


def test_exactify_examples():
    assert exactify(0.5) == Fraction(1, 2)
    assert exactify(0.0) == 0
    assert exactify(0.1) == Fraction(3602879701896397, 36028797018963968)


def test_exactify_is_injective_and_round_trips():
    rng = np.random.default_rng(0)
    values = rng.normal(scale=1e3, size=200).tolist() + [5e-324, -0.0, 1e308]
    exact = [exactify(v) for v in values]
    assert all(float(q) == v for q, v in zip(exact, values))
    distinct = {v for v in values if v != 0.0}
    assert len({exactify(v) for v in distinct}) == len(distinct)


def test_rank_of_dependent_rows():
    assert rank(ExactMatrix.from_rows([[1, 0, 1], [0, 1, 1], [1, 1, 2]])) == 2


def test_rank_is_transpose_invariant():
    rng = np.random.default_rng(4)
    for _ in range(20):
        rows, cols = rng.integers(1, 5, size=2)
        M = ExactMatrix.from_rows(
            [[Fraction(int(v), 3) for v in row] for row in rng.integers(-2, 3, size=(rows, cols))]
        )
        assert rank(M) == rank(M.transpose())


def test_field_axioms_hold_exactly():
    rng = np.random.default_rng(6)
    for _ in range(50):
        a, b, c = (exactify(float(v)) for v in rng.normal(size=3))
        assert (a + b) + c == a + (b + c)
        assert a * (1 / a) == 1
