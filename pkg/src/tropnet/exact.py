"""
Exact rational scalars and dense matrices

Every symbolic computation in tropnet runs on ``fractions.Fraction``, which is always
kept in lowest terms with a positive denominator. Doubles enter through
:func:`exactify` and leave through ``float()``.
"""

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, List, Sequence, Tuple, Union

import numpy as np

from .exceptions import DimensionMismatchError, NonFiniteValueError, ValidationError

Vector = Tuple[Fraction, ...]
RationalLike = Union[int, float, str, Fraction]

_RATIONAL_PATTERN = re.compile(r"^\s*[+-]?\d+\s*(/\s*\d+\s*)?$")


def exactify(x: float) -> Fraction:
    """Return the dyadic rational exactly equal to a finite double."""
    if isinstance(x, Fraction):
        return x
    value = float(x)
    if not math.isfinite(value):
        raise NonFiniteValueError(f"Cannot represent non-finite value {x!r} exactly")
    return Fraction(value)


def as_fraction(value: RationalLike) -> Fraction:
    """Coerce ints, strings, doubles and fractions to a Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise ValidationError(f"Boolean {value!r} is not a rational number")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return parse_rational(value)
    if isinstance(value, (float, np.floating)):
        return exactify(float(value))
    if isinstance(value, np.integer):
        return Fraction(int(value))
    raise ValidationError(f"Unsupported scalar type {type(value).__name__}")


def as_vector(values: Iterable[RationalLike]) -> Vector:
    return tuple(as_fraction(v) for v in values)


def format_rational(q: Fraction) -> str:
    """Serialize as "p/q", dropping the denominator when it is 1."""
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def parse_rational(text: str) -> Fraction:
    """Parse "p/q", an integer or a decimal literal."""
    if not isinstance(text, str):
        return as_fraction(text)
    cleaned = text.strip()
    if not cleaned:
        raise ValidationError("Empty string is not a rational number")
    try:
        if _RATIONAL_PATTERN.match(cleaned):
            return Fraction(cleaned.replace(" ", ""))
        # Decimal literals are read in base ten, e.g. "0.1" is 1/10
        result = Fraction(cleaned)
    except (ValueError, ZeroDivisionError) as e:
        raise ValidationError(f"Cannot parse rational from '{text}': {e}") from e
    return result


def dot(u: Sequence[Fraction], v: Sequence[Fraction]) -> Fraction:
    if len(u) != len(v):
        raise DimensionMismatchError(f"Cannot take dot product of lengths {len(u)} and {len(v)}")
    return sum((a * b for a, b in zip(u, v)), Fraction(0))


@dataclass(frozen=True)
class ExactMatrix:
    """Dense row-major matrix of fractions."""

    rows: int
    cols: int
    entries: Tuple[Fraction, ...]

    def __post_init__(self):
        if self.rows < 0 or self.cols < 0:
            raise DimensionMismatchError("Matrix shape must be nonnegative")
        if len(self.entries) != self.rows * self.cols:
            raise DimensionMismatchError(
                f"{self.rows}x{self.cols} matrix needs {self.rows * self.cols} entries, "
                f"got {len(self.entries)}"
            )

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable[RationalLike]], cols: int = None) -> "ExactMatrix":
        materialized = [as_vector(row) for row in rows]
        if cols is None:
            if not materialized:
                raise DimensionMismatchError("Column count is needed for a matrix without rows")
            cols = len(materialized[0])
        for i, row in enumerate(materialized):
            if len(row) != cols:
                raise DimensionMismatchError(f"Row {i} has {len(row)} entries, expected {cols}")
        entries = tuple(x for row in materialized for x in row)
        return cls(len(materialized), cols, entries)

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "ExactMatrix":
        return cls(rows, cols, (Fraction(0),) * (rows * cols))

    @classmethod
    def identity(cls, n: int) -> "ExactMatrix":
        return cls.from_rows(
            [[Fraction(int(i == j)) for j in range(n)] for i in range(n)], cols=n
        )

    @classmethod
    def vstack(cls, blocks: Sequence["ExactMatrix"]) -> "ExactMatrix":
        if not blocks:
            raise DimensionMismatchError("Cannot stack an empty list of matrices")
        cols = blocks[0].cols
        for block in blocks:
            if block.cols != cols:
                raise DimensionMismatchError(
                    f"Cannot stack matrices with {cols} and {block.cols} columns"
                )
        entries = tuple(x for block in blocks for x in block.entries)
        return cls(sum(block.rows for block in blocks), cols, entries)

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.rows, self.cols)

    def __getitem__(self, index: Tuple[int, int]) -> Fraction:
        i, j = index
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> Vector:
        return self.entries[i * self.cols : (i + 1) * self.cols]

    def column(self, j: int) -> Vector:
        return tuple(self.entries[i * self.cols + j] for i in range(self.rows))

    def row_list(self) -> List[Vector]:
        return [self.row(i) for i in range(self.rows)]

    def transpose(self) -> "ExactMatrix":
        return ExactMatrix.from_rows([self.column(j) for j in range(self.cols)], cols=self.rows)

    def submatrix(self, row_indices: Iterable[int]) -> "ExactMatrix":
        return ExactMatrix.from_rows([self.row(i) for i in row_indices], cols=self.cols)

    def matvec(self, x: Sequence[Fraction]) -> Vector:
        if len(x) != self.cols:
            raise DimensionMismatchError(
                f"Cannot multiply {self.rows}x{self.cols} matrix by vector of length {len(x)}"
            )
        return tuple(dot(self.row(i), x) for i in range(self.rows))

    def scale(self, c: RationalLike) -> "ExactMatrix":
        c = as_fraction(c)
        return ExactMatrix(self.rows, self.cols, tuple(c * x for x in self.entries))

    def to_float(self) -> np.ndarray:
        return np.array(
            [[float(x) for x in self.row(i)] for i in range(self.rows)], dtype=float
        ).reshape(self.rows, self.cols)

    def to_json(self) -> List[List[str]]:
        return [[format_rational(x) for x in self.row(i)] for i in range(self.rows)]

    @classmethod
    def from_json(cls, data: Sequence[Sequence[RationalLike]], cols: int = None) -> "ExactMatrix":
        return cls.from_rows(data, cols=cols)


def _integer_rows(M: ExactMatrix) -> List[List[int]]:
    """Scale each row by the lcm of its denominators."""
    rows = []
    for row in M.row_list():
        scale = 1
        for x in row:
            scale = math.lcm(scale, x.denominator)
        rows.append([int(x * scale) for x in row])
    return rows


def rank(M: ExactMatrix) -> int:
    """
    Exact rank by fraction-free (Bareiss) elimination.

    Rows are first cleared of denominators, which leaves the rank unchanged, so the
    elimination runs on Python integers and every division is exact.
    """
    work = _integer_rows(M)
    nrows, ncols = M.rows, M.cols
    r = 0
    previous = 1
    for col in range(ncols):
        if r == nrows:
            break
        pivot = next((i for i in range(r, nrows) if work[i][col] != 0), None)
        if pivot is None:
            continue
        work[r], work[pivot] = work[pivot], work[r]
        p = work[r][col]
        for i in range(r + 1, nrows):
            lead = work[i][col]
            for j in range(col + 1, ncols):
                work[i][j] = (work[i][j] * p - lead * work[r][j]) // previous
            work[i][col] = 0
        previous = p
        r += 1
    return r
