"""
Exact polyhedra ``P(A, b) = {x : A x <= b}`` and the predicates region enumeration needs
"""

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple

from .exact import ExactMatrix, RationalLike, Vector, as_vector, format_rational, rank
from .exceptions import DimensionMismatchError, EmptyPolyhedronError, SolverError
from .logging_config import log
from .lp import LpOutcome, LpProblem, LpStatus, Sense, solve
from .parallel import parallel_map

ZERO = Fraction(0)
ONE = Fraction(1)


@dataclass(frozen=True)
class Polyhedron:
    A: ExactMatrix
    b: Vector

    def __post_init__(self):
        object.__setattr__(self, "b", as_vector(self.b))
        if self.A.cols < 1:
            raise DimensionMismatchError("Polyhedra need an ambient dimension of at least 1")
        if len(self.b) != self.A.rows:
            raise DimensionMismatchError(
                f"Right-hand side has length {len(self.b)} but A has {self.A.rows} rows"
            )

    @classmethod
    def from_rows(
        cls, rows: Sequence[Sequence[RationalLike]], b: Sequence[RationalLike], nvars: int = None
    ) -> "Polyhedron":
        return cls(ExactMatrix.from_rows(rows, cols=nvars), as_vector(b))

    @classmethod
    def whole_space(cls, n: int) -> "Polyhedron":
        """R^n written as the single trivial inequality 0 <= 0."""
        return cls(ExactMatrix.zeros(1, n), (ZERO,))

    @classmethod
    def box(cls, center: Sequence[RationalLike], radius: RationalLike) -> "Polyhedron":
        """Closed infinity-norm ball around ``center``."""
        c = as_vector(center)
        r = as_vector([radius])[0]
        n = len(c)
        rows = []
        rhs = []
        for j in range(n):
            e = [ZERO] * n
            e[j] = ONE
            rows.append(e)
            rhs.append(c[j] + r)
            rows.append([-v for v in e])
            rhs.append(r - c[j])
        return cls.from_rows(rows, rhs, nvars=n)

    @property
    def nvars(self) -> int:
        return self.A.cols

    @property
    def nrows(self) -> int:
        return self.A.rows

    def slack(self, x: Sequence[Fraction]) -> Vector:
        """``b - A x`` row by row."""
        return tuple(bi - ai for ai, bi in zip(self.A.matvec(tuple(x)), self.b))

    def __contains__(self, x: Sequence[Fraction]) -> bool:
        return contains(self, x)

    def to_json(self) -> Dict[str, Any]:
        return {"A": self.A.to_json(), "b": [format_rational(v) for v in self.b]}

    @classmethod
    def from_json(cls, data: Dict[str, Any], nvars: int = None) -> "Polyhedron":
        return cls(ExactMatrix.from_json(data["A"], cols=nvars), as_vector(data["b"]))


@dataclass(frozen=True)
class ImplicitSplit:
    equality_indices: Tuple[int, ...]
    strict_indices: Tuple[int, ...]


def contains(P: Polyhedron, x: Sequence[Fraction]) -> bool:
    if len(x) != P.nvars:
        raise DimensionMismatchError(f"Point has length {len(x)}, polyhedron lives in R^{P.nvars}")
    return all(s >= 0 for s in P.slack(as_vector(x)))


def intersect(P: Polyhedron, Q: Polyhedron) -> Polyhedron:
    """Stack the two systems, rows of P first."""
    if P.nvars != Q.nvars:
        raise DimensionMismatchError(
            f"Cannot intersect polyhedra in R^{P.nvars} and R^{Q.nvars}"
        )
    return Polyhedron(ExactMatrix.vstack([P.A, Q.A]), P.b + Q.b)


def optimize(P: Polyhedron, objective: Sequence[RationalLike], sense: Sense) -> LpOutcome:
    """Optimize a linear objective over P."""
    return solve(LpProblem(as_vector(objective), P.A, P.b, sense))


def find_point(P: Polyhedron) -> Optional[Vector]:
    """Some point of P, or None when P is empty."""
    outcome = optimize(P, (ZERO,) * P.nvars, Sense.MAXIMIZE)
    if outcome.status is LpStatus.INFEASIBLE:
        return None
    return outcome.witness


def is_empty(P: Polyhedron) -> bool:
    return find_point(P) is None


def implicit_split(P: Polyhedron) -> ImplicitSplit:
    """
    Partition the rows of P into implicit equalities and the rest.

    Rows that are already slack at one feasible point cannot be implicit equalities;
    every other row gets its own minimization LP.

    Raises:
        EmptyPolyhedronError: If P has no points
    """
    witness = find_point(P)
    if witness is None:
        raise EmptyPolyhedronError("Implicit equalities are undefined for an empty polyhedron")
    slack = P.slack(witness)
    equalities = []
    strict = []
    for i in range(P.nrows):
        if slack[i] > 0:
            strict.append(i)
            continue
        outcome = optimize(P, P.A.row(i), Sense.MINIMIZE)
        if outcome.status is LpStatus.OPTIMAL and outcome.value == P.b[i]:
            equalities.append(i)
        else:
            strict.append(i)
    return ImplicitSplit(tuple(equalities), tuple(strict))


def dimension(P: Polyhedron) -> int:
    """``-1`` for the empty set, otherwise ``n - rank(A=)``."""
    if is_empty(P):
        return -1
    split = implicit_split(P)
    if not split.equality_indices:
        return P.nvars
    return P.nvars - rank(P.A.submatrix(split.equality_indices))


def _max_uniform_slack(P: Polyhedron, rows: Sequence[int]) -> LpOutcome:
    """maximize t subject to A_i x + t <= b_i on ``rows``, the other rows as given, t <= 1."""
    n = P.nvars
    marked = set(rows)
    constraint_rows = []
    for i in range(P.nrows):
        constraint_rows.append(P.A.row(i) + ((ONE if i in marked else ZERO),))
    constraint_rows.append((ZERO,) * n + (ONE,))
    A = ExactMatrix.from_rows(constraint_rows, cols=n + 1)
    objective = (ZERO,) * n + (ONE,)
    return solve(LpProblem(objective, A, P.b + (ONE,), Sense.MAXIMIZE))


def is_full_dimensional(P: Polyhedron) -> bool:
    """
    Decide ``dimension(P) == n`` with a single LP.

    P is full-dimensional exactly when some point satisfies every nonzero row strictly;
    zero rows only need ``0 <= b_i``.
    """
    nonzero = []
    for i in range(P.nrows):
        if any(P.A.row(i)):
            nonzero.append(i)
        elif P.b[i] < 0:
            return False
    if not nonzero:
        return True
    outcome = _max_uniform_slack(P, nonzero)
    return outcome.status is LpStatus.OPTIMAL and outcome.value > 0


def interior_point(P: Polyhedron) -> Vector:
    """
    A point of the relative interior: ``A= x = b=`` and ``A+ x < b+``.

    Raises:
        EmptyPolyhedronError: If P has no points
    """
    split = implicit_split(P)
    if not split.strict_indices:
        point = find_point(P)
        assert point is not None
        return point
    outcome = _max_uniform_slack(P, split.strict_indices)
    if outcome.status is not LpStatus.OPTIMAL or outcome.value <= 0:
        raise SolverError("No strictly feasible point found for the non-implicit rows")
    point = outcome.witness[: P.nvars]
    slack = P.slack(point)
    if any(slack[i] != 0 for i in split.equality_indices) or any(
        slack[i] <= 0 for i in split.strict_indices
    ):
        raise SolverError("Interior point failed its strictness check")
    return point


def is_bounded(P: Polyhedron) -> bool:
    """
    True when every coordinate is bounded above and below on P (2n LPs).

    Raises:
        EmptyPolyhedronError: If P has no points
    """
    if is_empty(P):
        raise EmptyPolyhedronError("Boundedness is undefined for an empty polyhedron")
    for j in range(P.nvars):
        e = [ZERO] * P.nvars
        e[j] = ONE
        for sense in (Sense.MAXIMIZE, Sense.MINIMIZE):
            if optimize(P, e, sense).status is LpStatus.UNBOUNDED:
                return False
    return True


def _pair_meets(pair: Tuple[Polyhedron, Polyhedron]) -> bool:
    P, Q = pair
    return not is_empty(intersect(P, Q))


def connected_components(
    polyhedra: Sequence[Polyhedron], threads: Optional[int] = None
) -> List[List[int]]:
    """
    Group polyhedra whose closed union is connected.

    Two polyhedra are adjacent when they share at least one point. Components are
    listed by their smallest member and each component is sorted.
    """
    count = len(polyhedra)
    if count == 0:
        return []
    for P in polyhedra:
        if P.nvars != polyhedra[0].nvars:
            raise DimensionMismatchError("All polyhedra must share one ambient dimension")

    pairs = [(i, j) for i in range(count) for j in range(i + 1, count)]
    meets = parallel_map(_pair_meets, [(polyhedra[i], polyhedra[j]) for i, j in pairs], threads)
    adjacency: List[List[int]] = [[] for _ in range(count)]
    for (i, j), met in zip(pairs, meets):
        if met:
            adjacency[i].append(j)
            adjacency[j].append(i)

    seen = [False] * count
    components = []
    for start in range(count):
        if seen[start]:
            continue
        seen[start] = True
        queue = deque([start])
        component = []
        while queue:
            node = queue.popleft()
            component.append(node)
            for neighbour in adjacency[node]:
                if not seen[neighbour]:
                    seen[neighbour] = True
                    queue.append(neighbour)
        components.append(sorted(component))
    log.debug(f"{count} polyhedra form {len(components)} connected components")
    return components
