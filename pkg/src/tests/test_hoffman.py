"""
Tests for Hoffman constants and effective radii
"""

import itertools
from fractions import Fraction

import numpy as np
import pytest

from tropnet.exact import ExactMatrix
from tropnet.exceptions import SubsetCapExceededError, ValidationError
from tropnet.experiments import hoffman_tables
from tropnet.hoffman import (
    HoffmanKind,
    effective_rows,
    hoffman_exact,
    hoffman_lower,
    hoffman_tropical,
    hoffman_upper,
    radius_bound,
    radius_bound_polynomial,
    stacked_matrix,
    surjectivity_value,
)
from tropnet.polyhedra import Polyhedron, intersect, is_empty
from tropnet.regions import polynomial_regions, rational_regions
from tropnet.tropical import TropicalPolynomial, TropicalRationalMap, random_rational_map


def matrix(rows):
    return ExactMatrix.from_rows(rows)


def _solve(M, rhs):
    """Gauss-Jordan over fractions; None when M is singular."""
    n = len(M)
    aug = [list(map(Fraction, row)) + [Fraction(b)] for row, b in zip(M, rhs)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if pivot is None:
            return None
        aug[col], aug[pivot] = aug[pivot], aug[col]
        p = aug[col][col]
        aug[col] = [v / p for v in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                factor = aug[r][col]
                aug[r] = [a - factor * b for a, b in zip(aug[r], aug[col])]
    return [aug[r][n] for r in range(n)]


def vertex_surjectivity(A, J):
    """min ||A_J^T v||_1 over the simplex, by checking every vertex of the sign arrangement."""
    k, n = len(J), A.cols
    hyperplanes = [[Fraction(int(r == s)) for s in range(k)] for r in range(k)]
    hyperplanes += [[A[J[r], c] for r in range(k)] for c in range(n)]
    best = None
    for chosen in itertools.combinations(hyperplanes, k - 1):
        v = _solve(list(chosen) + [[1] * k], [0] * (k - 1) + [1])
        if v is None or any(x < 0 for x in v):
            continue
        value = sum(abs(sum(v[r] * A[J[r], c] for r in range(k))) for c in range(n))
        best = value if best is None else min(best, value)
    return best


def vertex_hoffman(A):
    best = Fraction(0)
    for size in range(1, A.rows + 1):
        for J in itertools.combinations(range(A.rows), size):
            t = vertex_surjectivity(A, J)
            if t > 0:
                best = max(best, 1 / t)
    return best


def small_integer_matrix(rng, rows, cols):
    return matrix(rng.integers(-3, 4, size=(rows, cols)).tolist())


def test_surjectivity_values():
    A = matrix([[1], [-1]])
    assert surjectivity_value(A, [0, 1]) == 0
    assert surjectivity_value(A, [0]) == 1
    ones = matrix([[1, 1]] * 3)
    assert surjectivity_value(ones, [0, 1, 2]) == 2
    with pytest.raises(ValidationError):
        surjectivity_value(A, [])


def test_exact_constants_of_small_matrices():
    assert hoffman_exact(matrix([[1], [-1]])).value == 1
    assert hoffman_exact(matrix([[Fraction(-3, 2)]])).value == Fraction(2, 3)
    assert hoffman_exact(ExactMatrix.identity(2)).value == 1
    assert hoffman_exact(matrix([[1, 1], [1, -1]])).value == 1
    result = hoffman_exact(matrix([[2], [Fraction(1, 4)], [0]]))
    assert result.value == 4
    assert result.kind is HoffmanKind.EXACT
    assert result.witness_subset == (1,)


def test_zero_and_repeated_rows_are_ignored():
    A = matrix([[1, 2], [0, 0], [1, 2], [3, -1]])
    assert effective_rows(A) == [0, 3]
    assert hoffman_exact(A).value == hoffman_exact(matrix([[1, 2], [3, -1]])).value


def test_subset_cap():
    A = matrix([[k, 1] for k in range(1, 6)])
    with pytest.raises(SubsetCapExceededError):
        hoffman_exact(A, cap=4)
    assert hoffman_exact(A, cap=5).value > 0


def test_exact_matches_vertex_enumeration():
    rng = np.random.default_rng(2024)
    for _ in range(12):
        rows = int(rng.integers(2, 5))
        A = small_integer_matrix(rng, rows, 2)
        assert hoffman_exact(A).value == vertex_hoffman(A)


def test_single_column_closed_form():
    rng = np.random.default_rng(5)
    for _ in range(10):
        column = [Fraction(int(rng.integers(-9, 10)), int(rng.integers(1, 5))) for _ in range(4)]
        if not any(column):
            continue
        expected = 1 / min(abs(a) for a in column if a)
        assert hoffman_exact(matrix([[a] for a in column])).value == expected


def test_scale_covariance():
    rng = np.random.default_rng(8)
    c = Fraction(7, 3)
    for _ in range(5):
        A = small_integer_matrix(rng, 3, 2)
        assert hoffman_exact(A.scale(c)).value == hoffman_exact(A).value / c


def test_lower_bound():
    A = matrix([[1, 0], [1, 1], [0, -2]])
    exact = hoffman_exact(A).value
    assert hoffman_lower(A, iterations=200, seed=0).value == exact
    assert hoffman_lower(A, iterations=3, seed=1).value <= exact
    assert hoffman_lower(ExactMatrix.zeros(2, 1), iterations=1, seed=0).value == 0


def test_upper_bounds():
    assert hoffman_upper(ExactMatrix.identity(2)).value == pytest.approx(1.0)
    assert hoffman_upper(matrix([[2, 0], [0, Fraction(1, 2)]])).value == pytest.approx(2.0)
    assert hoffman_upper(ExactMatrix.identity(2), certified=True).value == pytest.approx(2**0.5)
    with pytest.raises(ValidationError):
        hoffman_upper(ExactMatrix.identity(2), mode="guess")


def test_uncertified_upper_can_undershoot():
    A = matrix([[1, 1], [1, -1]])
    assert hoffman_upper(A).value < hoffman_exact(A).value
    assert hoffman_upper(A, certified=True).value >= hoffman_exact(A).value


def test_sandwich_on_stacked_matrices():
    for seed in range(8):
        f = random_rational_map(3, 2, 2, seed)
        for i, j in itertools.product(range(2), range(2)):
            M = stacked_matrix(f.numerator, f.denominator, i, j)
            exact = hoffman_exact(M).value
            assert hoffman_lower(M, iterations=50, seed=seed).value <= exact
            assert exact <= hoffman_upper(M, certified=True).value + 1e-9


@pytest.mark.slow
def test_sandwich_table():
    report = hoffman_tables(shapes=((2, 3, 6),), instances=8, iterations=100, seed=0, threads=1)
    assert report.summary["sandwich_holds"]


def test_tropical_constants(worked_examples):
    f = worked_examples[1]
    assert hoffman_tropical(f).value == 1
    assert hoffman_tropical(TropicalPolynomial.monomial(2, [1, 3])).value == 0
    as_map = TropicalRationalMap.from_polynomial(f)
    assert hoffman_tropical(as_map).value == hoffman_tropical(f).value


def test_tropical_fallback_to_bounds():
    f = random_rational_map(2, 4, 3, seed=4)
    result = hoffman_tropical(f, cap=4, iterations=40, seed=0)
    assert result.exact is None
    assert result.lower.value <= result.upper.value + 1e-9


def test_radius_bound_of_first_example(worked_examples):
    f = TropicalRationalMap.from_polynomial(worked_examples[1])
    r = radius_bound(f, [0])
    assert r == 1
    box = Polyhedron.box([0], r)
    for region in rational_regions(f):
        assert any(not is_empty(intersect(piece, box)) for piece in region.pieces)
    assert radius_bound_polynomial(worked_examples[1], [0]) == 1


def test_constant_map_has_zero_radius():
    f = TropicalRationalMap(TropicalPolynomial.constant(3, 2), TropicalPolynomial.constant(1, 2))
    assert radius_bound(f, [5, -5]) == 0


def _random_small_polynomial(rng, n, m):
    return TropicalPolynomial(
        [
            (
                Fraction(int(rng.integers(-4, 5)), int(rng.integers(1, 4))),
                [Fraction(int(rng.integers(0, 5)), int(rng.integers(1, 3))) for _ in range(n)],
            )
            for _ in range(m)
        ],
        n,
    )


def test_ball_of_effective_radius_meets_every_region():
    rng = np.random.default_rng(77)
    for _ in range(10):
        n = int(rng.integers(1, 3))
        p = _random_small_polynomial(rng, n, int(rng.integers(2, 4)))
        q = _random_small_polynomial(rng, n, int(rng.integers(2, 4)))
        f = TropicalRationalMap(p, q)
        x = [Fraction(int(rng.integers(-3, 4))) for _ in range(n)]
        r = radius_bound(f, x)
        box = Polyhedron.box(x, r)
        for region in rational_regions(f):
            assert any(not is_empty(intersect(piece, box)) for piece in region.pieces)


def test_polynomial_radius_meets_every_region():
    rng = np.random.default_rng(13)
    for _ in range(10):
        f = _random_small_polynomial(rng, 2, 4)
        x = [Fraction(int(rng.integers(-3, 4))) for _ in range(2)]
        box = Polyhedron.box(x, radius_bound_polynomial(f, x))
        for region in polynomial_regions(f):
            assert not is_empty(intersect(region.pieces[0], box))
