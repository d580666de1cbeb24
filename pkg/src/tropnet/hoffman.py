"""
Hoffman constants of matrices and of tropical expressions

All norms are infinity-norms. For a row subset ``J`` the surjectivity value

    t(J) = min ||A_J^T v||_1  subject to  v >= 0, sum(v) = 1

is positive exactly when ``J`` is A-surjective, and ``H(A) = max_J 1/t(J)`` over those sets.
Exact values are rationals; the singular-value upper bound is a double.
"""

import itertools
import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .config import settings
from .exact import ExactMatrix, RationalLike, Vector, as_vector, format_rational
from .exceptions import SolverError, SubsetCapExceededError, ValidationError
from .logging_config import log
from .lp import LpProblem, Sense, solve
from .parallel import parallel_map
from .tropical import TropicalPolynomial, TropicalRationalMap, irredundant_indices
from .tropical import monomial_region

ZERO = Fraction(0)
ONE = Fraction(1)

Number = Union[Fraction, float]


class HoffmanKind(str, Enum):
    EXACT = "exact"
    LOWER = "lower"
    UPPER = "upper"


@dataclass(frozen=True)
class HoffmanResult:
    value: Number
    kind: HoffmanKind
    witness_subset: Optional[Tuple[int, ...]] = None

    def to_json(self) -> Dict[str, Any]:
        value = self.value if isinstance(self.value, float) else format_rational(self.value)
        return {
            "value": value,
            "kind": self.kind.value,
            "witness_subset": list(self.witness_subset) if self.witness_subset is not None else None,
        }


@dataclass(frozen=True)
class TropicalHoffman:
    """
    Hoffman constant of a tropical expression.

    ``exact`` is set when every block fits the subset cap; otherwise ``lower`` and ``upper``
    hold the bound pair. ``block`` is the monomial index (or index pair) of the maximizing block.
    """

    exact: Optional[HoffmanResult] = None
    lower: Optional[HoffmanResult] = None
    upper: Optional[HoffmanResult] = None
    block: Optional[Tuple[int, ...]] = None

    @property
    def value(self) -> Number:
        """The exact constant, or the upper bound when only bounds are known."""
        if self.exact is not None:
            return self.exact.value
        assert self.upper is not None
        return self.upper.value

    def to_json(self) -> Dict[str, Any]:
        return {
            "exact": self.exact.to_json() if self.exact else None,
            "lower": self.lower.to_json() if self.lower else None,
            "upper": self.upper.to_json() if self.upper else None,
            "block": list(self.block) if self.block is not None else None,
        }


def surjectivity_value(A: ExactMatrix, J: Sequence[int]) -> Fraction:
    """
    Exact optimum ``t(J)`` of the surjectivity LP.

    Variables are ``(v_1..v_k, s_1..s_n)`` with ``-s <= A_J^T v <= s`` linearizing the
    1-norm.
    """
    J = tuple(J)
    if not J:
        raise ValidationError("Surjectivity is defined for non-empty row subsets")
    if any(not 0 <= i < A.rows for i in J):
        raise ValidationError(f"Row subset {list(J)} out of range for {A.rows} rows")
    k, n = len(J), A.cols
    rows: List[List[Fraction]] = []
    rhs: List[Fraction] = []
    for c in range(n):
        column = [A[i, c] for i in J]
        slack = [ZERO] * n
        slack[c] = -ONE
        rows.append(column + slack)
        rows.append([-a for a in column] + slack)
        rhs.extend([ZERO, ZERO])
    rows.append([ONE] * k + [ZERO] * n)
    rows.append([-ONE] * k + [ZERO] * n)
    rhs.extend([ONE, -ONE])
    problem = LpProblem(
        objective=(ZERO,) * k + (ONE,) * n,
        constraint_matrix=ExactMatrix.from_rows(rows, cols=k + n),
        rhs=tuple(rhs),
        sense=Sense.MINIMIZE,
        nonneg_mask=(True,) * (k + n),
    )
    outcome = solve(problem)
    if not outcome.is_optimal:
        raise SolverError(f"Surjectivity LP for rows {list(J)} ended {outcome.status.value}")
    return outcome.value


def _surjectivity_task(args: Tuple[ExactMatrix, Tuple[int, ...]]) -> Fraction:
    A, J = args
    return surjectivity_value(A, J)


def effective_rows(A: ExactMatrix) -> List[int]:
    """
    Row indices with zero rows and repeated rows removed (first copy kept).

    A zero row makes every subset containing it non-surjective, and a repeated row leaves
    ``t(J)`` unchanged, so no maximizing subset needs either.
    """
    seen = set()
    keep = []
    for i in range(A.rows):
        row = A.row(i)
        if not any(row) or row in seen:
            continue
        seen.add(row)
        keep.append(i)
    return keep


def _resolve_cap(cap: Optional[int]) -> int:
    return settings.hoffman.subset_cap if cap is None else cap


def hoffman_exact(
    A: ExactMatrix, cap: Optional[int] = None, threads: Optional[int] = None
) -> HoffmanResult:
    """
    Exact ``H(A)`` by enumerating row subsets.

    Subsets are visited by size; supersets of a non-surjective subset are skipped since they
    are non-surjective as well.

    Raises:
        SubsetCapExceededError: If more than ``cap`` distinct nonzero rows remain
    """
    cap = _resolve_cap(cap)
    rows = effective_rows(A)
    if len(rows) > cap:
        raise SubsetCapExceededError(len(rows), cap)

    best = ZERO
    witness: Optional[Tuple[int, ...]] = None
    dead: List[frozenset] = []
    evaluated = 0
    for size in range(1, len(rows) + 1):
        level = [
            J
            for J in itertools.combinations(rows, size)
            if not any(bad <= frozenset(J) for bad in dead)
        ]
        if not level:
            break
        values = parallel_map(_surjectivity_task, [(A, J) for J in level], threads)
        evaluated += len(level)
        for J, t in zip(level, values):
            if t == 0:
                dead.append(frozenset(J))
                continue
            if 1 / t > best:
                best = 1 / t
                witness = J
    log.debug(f"Exact Hoffman constant {best} from {evaluated} subset LPs over {len(rows)} rows")
    return HoffmanResult(best, HoffmanKind.EXACT, witness)


def _random_subset(rng: np.random.Generator, m: int) -> Tuple[int, ...]:
    size = int(rng.integers(1, m + 1))
    return tuple(sorted(int(i) for i in rng.choice(m, size=size, replace=False)))


def hoffman_lower(
    A: ExactMatrix, iterations: Optional[int] = None, seed: Optional[int] = None
) -> HoffmanResult:
    """
    Lower bound from random row subsets.

    Each draw picks ``K`` uniformly from ``1..m`` and then ``K`` distinct rows. Never exceeds
    ``H(A)``.
    """
    iterations = settings.hoffman.lower_iterations if iterations is None else iterations
    seed = settings.runtime.seed if seed is None else seed
    if iterations < 1:
        raise ValidationError("The lower bound needs at least one iteration")
    if A.rows == 0:
        return HoffmanResult(ZERO, HoffmanKind.LOWER, None)
    rng = np.random.default_rng(seed)
    cache: Dict[Tuple[int, ...], Fraction] = {}
    best = ZERO
    witness: Optional[Tuple[int, ...]] = None
    for _ in range(iterations):
        J = _random_subset(rng, A.rows)
        if J not in cache:
            cache[J] = surjectivity_value(A, J)
        t = cache[J]
        if t > 0 and 1 / t > best:
            best = 1 / t
            witness = J
    log.debug(f"Lower Hoffman bound {best} from {len(cache)} distinct subsets")
    return HoffmanResult(best, HoffmanKind.LOWER, witness)


def _inverse_sigma_min(M: np.ndarray, J: Tuple[int, ...], certified: bool) -> Optional[float]:
    """``1/sigma_min(M_J)`` for full-row-rank ``M_J``, scaled by ``sqrt(|J|)`` if certified."""
    if len(J) > M.shape[1]:
        return None
    sigma = np.linalg.svd(M[list(J)], compute_uv=False)
    smallest = float(sigma.min())
    if smallest <= settings.hoffman.rank_tolerance * max(1.0, float(sigma.max())):
        return None
    value = 1.0 / smallest
    if certified:
        value *= math.sqrt(len(J))
    return value


def hoffman_upper(
    A: ExactMatrix,
    mode: str = "exhaustive",
    iterations: Optional[int] = None,
    seed: Optional[int] = None,
    certified: bool = False,
    cap: Optional[int] = None,
) -> HoffmanResult:
    """
    Upper bound ``max_J 1/sigma_min(A_J)`` over full-row-rank subsets, in double precision.

    With ``certified`` each term is multiplied by ``sqrt(|J|)``; the exhaustive certified
    value then bounds the infinity-norm constant for every matrix. The reported value is
    padded by the configured ``upper_padding``.

    Args:
        A: Matrix to bound
        mode: ``exhaustive`` (every subset of at most ``n`` rows) or ``sampled``
        iterations: Random subsets drawn in sampled mode
        seed: Seed of the sampled mode
        certified: Apply the ``sqrt(|J|)`` factor
        cap: Subset cap; exhaustive mode enumerates at most ``2**cap`` subsets

    Raises:
        SubsetCapExceededError: If exhaustive enumeration would exceed ``2**cap`` subsets
    """
    M = A.to_float()
    best = 0.0
    witness: Optional[Tuple[int, ...]] = None
    if mode == "exhaustive":
        cap = _resolve_cap(cap)
        rows = effective_rows(A)
        largest = min(len(rows), A.cols)
        total = sum(math.comb(len(rows), size) for size in range(1, largest + 1))
        if total > 2**cap:
            raise SubsetCapExceededError(len(rows), cap)
        candidates = (
            J for size in range(1, largest + 1) for J in itertools.combinations(rows, size)
        )
    elif mode == "sampled":
        iterations = settings.hoffman.lower_iterations if iterations is None else iterations
        seed = settings.runtime.seed if seed is None else seed
        rng = np.random.default_rng(seed)
        candidates = (_random_subset(rng, A.rows) for _ in range(iterations)) if A.rows else iter(())
    else:
        raise ValidationError(f"Unknown upper-bound mode '{mode}'")

    for J in candidates:
        value = _inverse_sigma_min(M, J, certified)
        if value is not None and value > best:
            best = value
            witness = J
    if witness is not None:
        best += settings.hoffman.upper_padding
    log.debug(f"Upper Hoffman bound {best:.6g} ({mode}, certified={certified})")
    return HoffmanResult(best, HoffmanKind.UPPER, witness)


def difference_matrix(f: TropicalPolynomial, i: int) -> ExactMatrix:
    """Rows ``alpha_j - alpha_i``: the constraint matrix of monomial ``i``'s region."""
    return monomial_region(f, i).A


def stacked_matrix(p: TropicalPolynomial, q: TropicalPolynomial, i: int, j: int) -> ExactMatrix:
    """``[A; A'] - 1 [a_i; a'_j]`` for the numerator monomial ``i`` and denominator monomial ``j``."""
    return ExactMatrix.vstack([difference_matrix(p, i), difference_matrix(q, j)])


def _blocks(
    f: Union[TropicalPolynomial, TropicalRationalMap], threads: Optional[int]
) -> List[Tuple[Tuple[int, ...], ExactMatrix]]:
    if isinstance(f, TropicalRationalMap):
        p, q = f.numerator, f.denominator
        return [
            ((i, j), stacked_matrix(p, q, i, j))
            for i in range(len(p.monomials))
            for j in range(len(q.monomials))
        ]
    return [((i,), difference_matrix(f, i)) for i in irredundant_indices(f, threads)]


def _max_result(results: Sequence[Tuple[Tuple[int, ...], HoffmanResult]]):
    best_block, best = results[0]
    for block, result in results[1:]:
        if result.value > best.value:
            best_block, best = block, result
    return best_block, best


def hoffman_tropical(
    f: Union[TropicalPolynomial, TropicalRationalMap],
    cap: Optional[int] = None,
    iterations: Optional[int] = None,
    seed: Optional[int] = None,
    threads: Optional[int] = None,
    exact_only: bool = False,
) -> TropicalHoffman:
    """
    Hoffman constant of the given expression.

    For a polynomial the maximum runs over the difference matrices of its irredundant
    monomials; for ``p (/) q`` over the stacked matrices of every monomial pair. When a block
    exceeds the subset cap, the result carries a lower bound and a certified upper bound
    instead of the exact value.

    Raises:
        SubsetCapExceededError: If a block exceeds the cap and ``exact_only`` is set
    """
    blocks = _blocks(f, threads)
    try:
        exact = [(block, hoffman_exact(M, cap, threads)) for block, M in blocks]
    except SubsetCapExceededError as e:
        if exact_only:
            raise
        log.warning(f"{e}; falling back to Hoffman bounds")
    else:
        block, best = _max_result(exact)
        log.info(f"Hoffman constant {best.value} attained on block {list(block)}")
        return TropicalHoffman(exact=best, block=block)

    lower_block, lower = _max_result(
        [(block, hoffman_lower(M, iterations, seed)) for block, M in blocks]
    )
    upper_results = []
    for block, M in blocks:
        try:
            upper_results.append((block, hoffman_upper(M, certified=True, cap=cap)))
        except SubsetCapExceededError:
            log.warning(f"Block {list(block)} is too large for an exhaustive upper bound; sampling")
            upper_results.append(
                (block, hoffman_upper(M, "sampled", iterations, seed, certified=True))
            )
    _, upper = _max_result(upper_results)
    return TropicalHoffman(lower=lower, upper=upper, block=lower_block)


def _conjugate_gap(f: TropicalPolynomial, x: Vector) -> Fraction:
    return f.evaluate(x) - f.min_conjugate(x)


def radius_bound(
    f: TropicalRationalMap,
    x: Sequence[RationalLike],
    hoffman: Optional[TropicalHoffman] = None,
) -> Number:
    """
    ``H(p (/) q) * max{p(x) - p_min(x), q(x) - q_min(x)}``.

    Any ball of this infinity-radius around ``x`` meets every linear region of ``f``.
    """
    point = as_vector(x)
    if hoffman is None:
        hoffman = hoffman_tropical(f)
    gap = max(_conjugate_gap(f.numerator, point), _conjugate_gap(f.denominator, point))
    H = hoffman.value
    if isinstance(H, float):
        return H * float(gap)
    return H * gap


def radius_bound_polynomial(
    f: TropicalPolynomial,
    x: Sequence[RationalLike],
    hoffman: Optional[TropicalHoffman] = None,
    threads: Optional[int] = None,
) -> Number:
    """``H(f)`` times the largest gap ``f(x) - m_i(x)`` over irredundant monomials ``m_i``."""
    point = as_vector(x)
    if hoffman is None:
        hoffman = hoffman_tropical(f, threads=threads)
    top = f.evaluate(point)
    gap = max(top - f.monomials[i].value(point) for i in irredundant_indices(f, threads))
    H = hoffman.value
    if isinstance(H, float):
        return H * float(gap)
    return H * gap
