"""
Exact rational linear programming

A dense two-phase simplex over ``Fraction`` with Bland's pivoting rule. Problems are
stated as ``optimize c.x subject to A x <= b`` with an optional per-variable
nonnegativity mask. Every outcome is checked by substitution before it is returned:
optimal witnesses and unbounded rays against the constraints, infeasibility against a
Farkas certificate read off the final phase-one tableau.
"""

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from .exact import ExactMatrix, Vector, as_vector, dot
from .exceptions import DimensionMismatchError, SolverError
from .logging_config import log

ZERO = Fraction(0)
ONE = Fraction(1)


class Sense(str, Enum):
    MAXIMIZE = "maximize"
    MINIMIZE = "minimize"


class LpStatus(str, Enum):
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"
    OPTIMAL = "optimal"


@dataclass(frozen=True)
class LpProblem:
    """optimize ``objective . x`` subject to ``constraint_matrix x <= rhs``"""

    objective: Vector
    constraint_matrix: ExactMatrix
    rhs: Vector
    sense: Sense = Sense.MAXIMIZE
    nonneg_mask: Tuple[bool, ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "objective", as_vector(self.objective))
        object.__setattr__(self, "rhs", as_vector(self.rhs))
        object.__setattr__(self, "sense", Sense(self.sense))
        if not self.nonneg_mask:
            object.__setattr__(self, "nonneg_mask", (False,) * self.constraint_matrix.cols)
        else:
            object.__setattr__(self, "nonneg_mask", tuple(bool(f) for f in self.nonneg_mask))

        n = self.constraint_matrix.cols
        if len(self.objective) != n:
            raise DimensionMismatchError(
                f"Objective has length {len(self.objective)} but the matrix has {n} columns"
            )
        if len(self.rhs) != self.constraint_matrix.rows:
            raise DimensionMismatchError(
                f"Right-hand side has length {len(self.rhs)} but the matrix has "
                f"{self.constraint_matrix.rows} rows"
            )
        if len(self.nonneg_mask) != n:
            raise DimensionMismatchError(
                f"Nonnegativity mask has length {len(self.nonneg_mask)}, expected {n}"
            )

    @property
    def nvars(self) -> int:
        return self.constraint_matrix.cols

    @property
    def ncons(self) -> int:
        return self.constraint_matrix.rows


@dataclass(frozen=True)
class LpOutcome:
    status: LpStatus
    value: Optional[Fraction] = None
    witness: Optional[Vector] = None
    ray: Optional[Vector] = None
    farkas: Optional[Vector] = None

    @property
    def is_optimal(self) -> bool:
        return self.status is LpStatus.OPTIMAL

    @property
    def is_feasible(self) -> bool:
        return self.status is not LpStatus.INFEASIBLE


class _Tableau:
    """Equality-form tableau ``T y = rhs`` with an explicit basis and reduced-cost row."""

    def __init__(
        self, rows: List[List[Fraction]], rhs: List[Fraction], basis: List[int], ncols: int
    ):
        self.rows = rows
        self.rhs = rhs
        self.basis = basis
        self.ncols = ncols
        self.reduced: List[Fraction] = []
        self.objective_value = ZERO

    def set_cost(self, cost: Sequence[Fraction]) -> None:
        reduced = list(cost)
        value = ZERO
        for i, b in enumerate(self.basis):
            cb = cost[b]
            if cb:
                row = self.rows[i]
                for k in range(self.ncols):
                    if row[k]:
                        reduced[k] -= cb * row[k]
                value += cb * self.rhs[i]
        self.reduced = reduced
        self.objective_value = value

    def pivot(self, r: int, c: int) -> None:
        pivot_row = self.rows[r]
        p = pivot_row[c]
        if p != ONE:
            pivot_row[:] = [x / p for x in pivot_row]
            self.rhs[r] /= p
        nonzero = [k for k in range(self.ncols) if pivot_row[k]]
        for i, row in enumerate(self.rows):
            if i == r:
                continue
            factor = row[c]
            if factor:
                for k in nonzero:
                    row[k] -= factor * pivot_row[k]
                self.rhs[i] -= factor * self.rhs[r]
        factor = self.reduced[c]
        if factor:
            for k in nonzero:
                self.reduced[k] -= factor * pivot_row[k]
            self.objective_value += factor * self.rhs[r]
        self.basis[r] = c

    def minimize(self, allowed: Sequence[bool]) -> Optional[int]:
        """Run Bland's rule to optimality; return an entering column if unbounded."""
        iterations = 0
        while True:
            entering = next(
                (k for k in range(self.ncols) if allowed[k] and self.reduced[k] < 0), None
            )
            if entering is None:
                log.trace(f"Simplex converged after {iterations} pivots")
                return None
            leaving = None
            best = None
            for i, row in enumerate(self.rows):
                a = row[entering]
                if a > 0:
                    ratio = self.rhs[i] / a
                    if (
                        best is None
                        or ratio < best
                        or (ratio == best and self.basis[i] < self.basis[leaving])
                    ):
                        best = ratio
                        leaving = i
            if leaving is None:
                return entering
            self.pivot(leaving, entering)
            iterations += 1

    def basic_solution(self) -> List[Fraction]:
        y = [ZERO] * self.ncols
        for i, b in enumerate(self.basis):
            y[b] = self.rhs[i]
        return y


def _structural_columns(problem: LpProblem) -> List[Tuple[int, int]]:
    """Map each original variable to its (column, sign) in the nonnegative reformulation."""
    columns = []
    for j in range(problem.nvars):
        columns.append((j, 1))
        if not problem.nonneg_mask[j]:
            columns.append((j, -1))
    return columns


def _to_original(y: Sequence[Fraction], columns: List[Tuple[int, int]], n: int) -> Vector:
    x = [ZERO] * n
    for k, (j, sign) in enumerate(columns):
        if y[k]:
            x[j] += sign * y[k]
    return tuple(x)


def _verify_feasible(problem: LpProblem, x: Vector) -> None:
    A = problem.constraint_matrix
    for i in range(problem.ncons):
        if dot(A.row(i), x) > problem.rhs[i]:
            raise SolverError(f"Witness violates constraint {i}")
    for j, nonneg in enumerate(problem.nonneg_mask):
        if nonneg and x[j] < 0:
            raise SolverError(f"Witness violates nonnegativity of variable {j}")


def _verify_farkas(problem: LpProblem, y: Vector) -> None:
    A = problem.constraint_matrix
    if any(v < 0 for v in y):
        raise SolverError("Farkas certificate has a negative multiplier")
    for j in range(problem.nvars):
        combo = sum((y[i] * A[i, j] for i in range(problem.ncons) if y[i]), ZERO)
        if problem.nonneg_mask[j]:
            if combo < 0:
                raise SolverError(f"Farkas certificate fails on nonnegative column {j}")
        elif combo != 0:
            raise SolverError(f"Farkas certificate fails on free column {j}")
    if dot(y, problem.rhs) >= 0:
        raise SolverError("Farkas certificate does not separate the right-hand side")


def _verify_ray(problem: LpProblem, d: Vector, direction: Sequence[Fraction]) -> None:
    A = problem.constraint_matrix
    for i in range(problem.ncons):
        if dot(A.row(i), d) > 0:
            raise SolverError(f"Unbounded ray leaves constraint {i}")
    for j, nonneg in enumerate(problem.nonneg_mask):
        if nonneg and d[j] < 0:
            raise SolverError(f"Unbounded ray leaves the orthant in variable {j}")
    if dot(direction, d) <= 0:
        raise SolverError("Unbounded ray does not improve the objective")


def solve(problem: LpProblem) -> LpOutcome:
    """
    Solve a linear program exactly.

    Args:
        problem: The program to solve

    Returns:
        LpOutcome with a verified witness (optimal), a verified ray and feasible point
        (unbounded) or a verified Farkas certificate (infeasible)

    Raises:
        SolverError: If a returned object fails its substitution check
    """
    A = problem.constraint_matrix
    m, n = problem.ncons, problem.nvars
    columns = _structural_columns(problem)
    nstruct = len(columns)

    # Rows with negative right-hand side are negated and receive an artificial variable
    signs = [(-1 if problem.rhs[i] < 0 else 1) for i in range(m)]
    artificial_rows = [i for i in range(m) if signs[i] < 0]
    nslack = m
    nart = len(artificial_rows)
    ncols = nstruct + nslack + nart

    rows: List[List[Fraction]] = []
    rhs: List[Fraction] = []
    basis: List[int] = []
    art_col = {}
    for idx, i in enumerate(artificial_rows):
        art_col[i] = nstruct + nslack + idx
    for i in range(m):
        s = signs[i]
        row = [ZERO] * ncols
        a_row = A.row(i)
        for k, (j, sign) in enumerate(columns):
            if a_row[j]:
                row[k] = s * sign * a_row[j]
        row[nstruct + i] = Fraction(s)
        if s < 0:
            row[art_col[i]] = ONE
            basis.append(art_col[i])
        else:
            basis.append(nstruct + i)
        rows.append(row)
        rhs.append(s * problem.rhs[i])

    tableau = _Tableau(rows, rhs, basis, ncols)
    initial_basis = list(basis)

    if nart:
        cost1 = [ZERO] * ncols
        for i in artificial_rows:
            cost1[art_col[i]] = ONE
        tableau.set_cost(cost1)
        tableau.minimize([True] * ncols)
        if tableau.objective_value > 0:
            # pi_i = c_i - reduced_i for the initial identity basis; y = -sign * pi
            farkas = []
            for i in range(m):
                col = initial_basis[i]
                pi = cost1[col] - tableau.reduced[col]
                farkas.append(-signs[i] * pi)
            certificate = tuple(farkas)
            _verify_farkas(problem, certificate)
            log.trace(f"LP infeasible with phase-one value {tableau.objective_value}")
            return LpOutcome(LpStatus.INFEASIBLE, farkas=certificate)

        # Drive remaining zero-level artificials out of the basis, dropping redundant rows
        is_artificial = [False] * ncols
        for i in artificial_rows:
            is_artificial[art_col[i]] = True
        r = 0
        while r < len(tableau.rows):
            if is_artificial[tableau.basis[r]]:
                entering = next(
                    (
                        k
                        for k in range(nstruct + nslack)
                        if tableau.rows[r][k] != 0
                    ),
                    None,
                )
                if entering is None:
                    del tableau.rows[r]
                    del tableau.rhs[r]
                    del tableau.basis[r]
                    continue
                tableau.pivot(r, entering)
            r += 1
        allowed = [not flag for flag in is_artificial]
    else:
        allowed = [True] * ncols

    sign = -1 if problem.sense is Sense.MAXIMIZE else 1
    cost2 = [ZERO] * ncols
    for k, (j, s) in enumerate(columns):
        cost2[k] = sign * s * problem.objective[j]
    tableau.set_cost(cost2)
    entering = tableau.minimize(allowed)

    y = tableau.basic_solution()
    point = _to_original(y, columns, n)
    _verify_feasible(problem, point)

    if entering is not None:
        dy = [ZERO] * ncols
        dy[entering] = ONE
        for i, b in enumerate(tableau.basis):
            dy[b] = -tableau.rows[i][entering]
        ray = _to_original(dy, columns, n)
        direction = problem.objective if sign < 0 else tuple(-c for c in problem.objective)
        _verify_ray(problem, ray, direction)
        return LpOutcome(LpStatus.UNBOUNDED, witness=point, ray=ray)

    value = dot(problem.objective, point)
    if value != sign * tableau.objective_value:
        raise SolverError(
            f"Objective at witness {value} differs from tableau value {sign * tableau.objective_value}"
        )
    return LpOutcome(LpStatus.OPTIMAL, value=value, witness=point)


def feasible_point(A: ExactMatrix, b: Sequence[Fraction]) -> Optional[Vector]:
    """Return some x with A x <= b, or None when the system is infeasible."""
    outcome = solve(LpProblem((ZERO,) * A.cols, A, tuple(b)))
    return outcome.witness if outcome.is_feasible else None
