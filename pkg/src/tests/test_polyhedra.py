"""
Tests for exact polyhedra
"""

from fractions import Fraction
from itertools import combinations

import numpy as np
import pytest

from tropnet.exceptions import DimensionMismatchError, EmptyPolyhedronError
from tropnet.polyhedra import (
    Polyhedron,
    connected_components,
    contains,
    dimension,
    implicit_split,
    interior_point,
    intersect,
    is_bounded,
    is_empty,
    is_full_dimensional,
)
from tropnet.tropical import monomial_region

SQUARE = Polyhedron.from_rows([[1, 0], [-1, 0], [0, 1], [0, -1]], [1, 0, 1, 0])
SEGMENT = Polyhedron.from_rows([[1, 1], [-1, -1], [1, 0], [-1, 0]], [1, -1, 1, 0])
ORIGIN = Polyhedron.from_rows([[1, 0], [-1, 0], [0, 1], [0, -1]], [0, 0, 0, 0])
EMPTY = Polyhedron.from_rows([[1], [-1]], [0, -1])


def interval(lo, hi):
    return Polyhedron.from_rows([[1], [-1]], [hi, -lo])


def random_polyhedron(rng, n=2, m=4):
    rows = rng.integers(-3, 4, size=(m, n)).tolist()
    b = rng.integers(-2, 5, size=m).tolist()
    return Polyhedron.from_rows(rows, b, nvars=n)


def random_points(rng, n, count, radius=5):
    nums = rng.integers(-12 * radius, 12 * radius + 1, size=(count, n))
    return [tuple(Fraction(int(v), 12) for v in row) for row in nums]


def test_membership_and_box():
    assert contains(SQUARE, (Fraction(1, 2), Fraction(1)))
    assert not contains(SQUARE, (Fraction(3, 2), Fraction(0)))
    box = Polyhedron.box([1, -1], Fraction(1, 2))
    assert (Fraction(3, 2), Fraction(-1, 2)) in box
    assert (Fraction(2), Fraction(-1)) not in box
    with pytest.raises(DimensionMismatchError):
        contains(SQUARE, (Fraction(0),))


def test_emptiness():
    assert is_empty(EMPTY)
    assert not is_empty(SQUARE)
    assert is_empty(intersect(interval(0, 1), interval(2, 3)))
    assert not is_empty(intersect(interval(0, 1), interval(1, 3)))


def test_dimension():
    assert dimension(SQUARE) == 2
    assert dimension(SEGMENT) == 1
    assert dimension(ORIGIN) == 0
    assert dimension(EMPTY) == -1
    assert dimension(Polyhedron.whole_space(3)) == 3


def test_implicit_split():
    split = implicit_split(SEGMENT)
    assert split.equality_indices == (0, 1)
    assert split.strict_indices == (2, 3)
    assert implicit_split(SQUARE).equality_indices == ()
    with pytest.raises(EmptyPolyhedronError):
        implicit_split(EMPTY)


def test_full_dimensional():
    assert is_full_dimensional(SQUARE)
    assert not is_full_dimensional(SEGMENT)
    assert not is_full_dimensional(EMPTY)
    assert is_full_dimensional(Polyhedron.whole_space(2))
    assert not is_full_dimensional(Polyhedron.from_rows([[0, 0]], [-1]))


def test_interior_point_is_relatively_interior():
    x = interior_point(SQUARE)
    assert all(0 < v < 1 for v in x)
    y = interior_point(SEGMENT)
    assert y[0] + y[1] == 1
    assert 0 < y[0] < 1


def test_boundedness():
    assert is_bounded(SQUARE)
    assert not is_bounded(Polyhedron.from_rows([[1, 0]], [0]))
    with pytest.raises(EmptyPolyhedronError):
        is_bounded(EMPTY)


def test_connected_components():
    pieces = [interval(0, 1), interval(3, 4), interval(1, 2), interval(2, 3), interval(6, 7)]
    assert connected_components(pieces) == [[0, 1, 2, 3], [4]]
    assert connected_components([]) == []


def test_intersect_dimension_mismatch():
    with pytest.raises(DimensionMismatchError):
        intersect(SQUARE, EMPTY)


def test_json_round_trip():
    assert Polyhedron.from_json(SEGMENT.to_json()) == SEGMENT


def test_intersection_membership_on_random_points():
    rng = np.random.default_rng(5)
    for _ in range(10):
        P, Q = random_polyhedron(rng), random_polyhedron(rng)
        both = intersect(P, Q)
        for x in random_points(rng, 2, 200):
            assert contains(both, x) == (contains(P, x) and contains(Q, x))


def test_intersection_dimension_never_grows():
    rng = np.random.default_rng(6)
    pool = [SQUARE, SEGMENT, ORIGIN, Polyhedron.whole_space(2)]
    pool += [random_polyhedron(rng) for _ in range(6)]
    for P, Q in combinations(pool, 2):
        assert dimension(intersect(P, Q)) <= min(dimension(P), dimension(Q))


def test_triangle_meets_square():
    triangle = Polyhedron.from_rows([[1, 1], [1, 0], [0, 1]], [0, 1, 1])
    square = Polyhedron.from_rows([[1, 0], [0, 1], [-1, 0], [0, -1]], [1, 1, 1, 1])
    expected = Polyhedron.from_rows(
        [[1, 1], [1, 0], [0, 1], [1, 0], [0, 1], [-1, 0], [0, -1]], [0, 1, 1, 1, 1, 1, 1]
    )
    both = intersect(triangle, square)
    assert both == expected
    rng = np.random.default_rng(0)
    for x in random_points(rng, 2, 300, radius=2):
        assert contains(both, x) == contains(expected, x)
    assert dimension(both) == 2
    assert is_bounded(both)
    assert not is_bounded(triangle)


def test_redundant_monomial_region_is_empty(worked_examples):
    f = worked_examples[4]
    assert is_empty(monomial_region(f, 1))
    left, right = monomial_region(f, 0), monomial_region(f, 2)
    assert contains(left, [Fraction(-1, 2)]) and contains(right, [Fraction(-1, 2)])
    assert not contains(left, [Fraction(-1, 4)])
    assert not contains(right, [Fraction(-3, 4)])


@pytest.mark.parametrize("seed", range(4))
def test_connected_components_partition(seed):
    rng = np.random.default_rng(seed)
    pieces = [
        Polyhedron.box([int(c) for c in rng.integers(-4, 5, size=2)], 1) for _ in range(7)
    ]
    components = connected_components(pieces)
    members = [i for component in components for i in component]
    assert sorted(members) == list(range(len(pieces)))
    for first, second in combinations(components, 2):
        for i in first:
            for j in second:
                assert is_empty(intersect(pieces[i], pieces[j]))
    for component in components:
        if len(component) > 1:
            for i in component:
                assert any(
                    not is_empty(intersect(pieces[i], pieces[j])) for j in component if j != i
                )
