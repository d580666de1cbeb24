"""
Numerical linear-region estimation

Points are sampled in the cube ``[-R, R]^n`` and classified by their rounded Jacobians.
Points sharing a Jacobian are split into separate regions when the network is not affine on
the segment between them, which is detected at the segment midpoint. Permutation-invariant
networks can instead be sampled on the sorted cone ``x_1 >= ... >= x_n`` with every Jacobian
weighted by the size of its orbit.
"""

import math
import time
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, List, Literal, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from .config import settings
from .exact import ExactMatrix, exactify
from .exceptions import ValidationError
from .logging_config import log
from .lp import LpStatus, Sense
from .network import JacobianSignature, Network, build_invariant, forward, jacobian_batch
from .network import round_signature
from .parallel import parallel_map, resolve_threads
from .polyhedra import Polyhedron, intersect, is_full_dimensional, optimize
from .regions import LinearRegion

ZERO = Fraction(0)


class SampleConfig(BaseModel):
    """Sampling domain and effort"""

    box_radius: float = Field(default=5.0, gt=0.0, description="Half-width R of the cube")
    npoints: int = Field(default=1000, ge=1, description="Number of sample points N")
    seed: int = Field(default=0, ge=0)
    scheme: Literal["uniform", "grid"] = "uniform"
    restrict_to_fundamental: bool = False
    decimals: int = Field(default=10, ge=0)

    model_config = ConfigDict(frozen=True)

    @classmethod
    def from_settings(cls, **overrides: Any) -> "SampleConfig":
        """Defaults from the global settings, overridden by keyword."""
        values = {
            "box_radius": settings.sampling.box_radius,
            "npoints": settings.sampling.npoints,
            "seed": settings.runtime.seed,
            "scheme": settings.sampling.scheme,
            "decimals": settings.sampling.decimals,
        }
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)


@dataclass(frozen=True)
class RegionEstimate:
    count: int
    signatures: Tuple[JacobianSignature, ...]
    npoints: int
    elapsed: float
    representatives: Tuple[Tuple[float, ...], ...] = ()


def sample_points(cfg: SampleConfig, n: int, npoints: Optional[int] = None) -> np.ndarray:
    """
    Points of ``[-R, R]^n``: uniform draws from ``cfg.seed``, or a regular grid.

    The grid uses the smallest ``k`` with ``k^n >= N`` points per axis.
    """
    N = cfg.npoints if npoints is None else npoints
    R = cfg.box_radius
    if cfg.scheme == "uniform":
        rng = np.random.default_rng(cfg.seed)
        return rng.uniform(-R, R, size=(N, n))
    k = max(2, int(round(N ** (1.0 / n))))
    while k**n < N:
        k += 1
    axis = np.linspace(-R, R, k)
    mesh = np.meshgrid(*([axis] * n), indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)


def _signature_chunk(args: Tuple[Network, np.ndarray, int]) -> List[JacobianSignature]:
    net, X, decimals = args
    J = jacobian_batch(net, X)
    return [round_signature(J[k], decimals) for k in range(J.shape[0])]


def signatures(
    net: Network, X: np.ndarray, decimals: int = 10, threads: Optional[int] = None
) -> List[JacobianSignature]:
    """Rounded Jacobian of every row of ``X``, in row order."""
    workers = resolve_threads(threads)
    chunks = [chunk for chunk in np.array_split(X, workers) if len(chunk)]
    results = parallel_map(_signature_chunk, [(net, chunk, decimals) for chunk in chunks], workers)
    return [sig for chunk in results for sig in chunk]


def _check_scalar(net: Network) -> None:
    if net.output_dim != 1:
        raise ValidationError("Region estimation needs a scalar-output network")


def _exact_point(x: np.ndarray) -> Tuple[Fraction, ...]:
    return tuple(exactify(float(v)) for v in x)


def _same_piece(net: Network, x, fx: Fraction, y, fy: Fraction) -> bool:
    """The network at the midpoint equals the mean of the endpoint values."""
    midpoint = tuple((a + b) / 2 for a, b in zip(x, y))
    return forward(net, midpoint)[0] == (fx + fy) / 2


def estimate_regions(
    net: Network, cfg: SampleConfig, threads: Optional[int] = None
) -> RegionEstimate:
    """
    Estimate the number of linear regions by sampling.

    A point whose signature is already known joins the first representative it passes the
    midpoint test with; otherwise it becomes a new representative. The count is the number
    of representatives.
    """
    _check_scalar(net)
    if cfg.restrict_to_fundamental:
        return estimate_regions_fundamental(net, cfg, threads)
    start = time.perf_counter()
    X = sample_points(cfg, net.input_dim)
    sigs = signatures(net, X, cfg.decimals, threads)

    reps: Dict[JacobianSignature, List[Tuple[Tuple[Fraction, ...], Fraction, int]]] = {}
    for k, sig in enumerate(sigs):
        point = _exact_point(X[k])
        known = reps.get(sig)
        if known is None:
            reps[sig] = [(point, forward(net, point)[0], k)]
            continue
        value = forward(net, point)[0]
        if not any(_same_piece(net, point, value, r, fr) for r, fr, _ in known):
            known.append((point, value, k))

    count = sum(len(group) for group in reps.values())
    elapsed = time.perf_counter() - start
    representatives = tuple(
        tuple(float(v) for v in X[k]) for sig in sorted(reps) for _, _, k in reps[sig]
    )
    log.info(
        f"Sampled {len(X)} points: {len(reps)} signatures, {count} estimated regions "
        f"in {elapsed:.2f}s"
    )
    return RegionEstimate(count, tuple(sorted(reps)), len(X), elapsed, representatives)


def multiplicity(sig: Sequence[float], n: int, decimals: int = 10) -> int:
    """``n! / prod(c!)`` over the multiplicities ``c`` of the rounded values of ``sig``."""
    if len(sig) != n:
        raise ValidationError(f"Signature has {len(sig)} entries, expected {n}")
    counts = Counter(round_signature(np.asarray(sig, dtype=float), decimals))
    denominator = 1
    for c in counts.values():
        denominator *= math.factorial(c)
    return math.factorial(n) // denominator


def estimate_regions_fundamental(
    net: Network, cfg: SampleConfig, threads: Optional[int] = None
) -> RegionEstimate:
    """
    Estimate for a permutation-invariant network from the sorted cone alone.

    ``ceil(N / n!)`` points are sampled in the cube and sorted descending, and every distinct
    signature contributes its multiplicity. Invariance is assumed, not checked.
    """
    _check_scalar(net)
    n = net.input_dim
    if n == 1:
        return estimate_regions(net, cfg.model_copy(update={"restrict_to_fundamental": False}), threads)
    start = time.perf_counter()
    reduced = math.ceil(cfg.npoints / math.factorial(n))
    X = -np.sort(-sample_points(cfg, n, reduced), axis=1)
    found = sorted(set(signatures(net, X, cfg.decimals, threads)))
    count = sum(multiplicity(sig, n, cfg.decimals) for sig in found)
    elapsed = time.perf_counter() - start
    log.info(
        f"Sampled {len(X)} sorted points: {len(found)} signatures, {count} regions "
        f"after multiplicities in {elapsed:.2f}s"
    )
    return RegionEstimate(count, tuple(found), len(X), elapsed)


def fundamental_domain(n: int) -> Polyhedron:
    """``x_1 >= x_2 >= ... >= x_n`` as rows ``x_{i+1} - x_i <= 0``."""
    if n < 2:
        raise ValidationError("The sorted cone needs at least two coordinates")
    rows = []
    for i in range(n - 1):
        row = [ZERO] * n
        row[i] = Fraction(-1)
        row[i + 1] = Fraction(1)
        rows.append(row)
    return Polyhedron(ExactMatrix.from_rows(rows, cols=n), (ZERO,) * (n - 1))


def _piece_in_domain(piece: Polyhedron, n: int) -> bool:
    for i in range(n - 1):
        direction = [ZERO] * n
        direction[i] = Fraction(-1)
        direction[i + 1] = Fraction(1)
        outcome = optimize(piece, direction, Sense.MAXIMIZE)
        if outcome.status is not LpStatus.OPTIMAL or outcome.value > 0:
            return False
    return True


def fundamental_bounds(regions: Sequence[LinearRegion], n: int) -> Tuple[int, int]:
    """
    Orbit-counting bounds on the number of regions of an invariant function.

    Regions inside the sorted cone count ``n!`` each toward both bounds; regions that meet
    its interior without being contained add the multiplicity of their gradient to the upper
    bound.
    """
    if n == 1:
        return len(regions), len(regions)
    delta = fundamental_domain(n)
    contained = 0
    extra = 0
    for region in regions:
        if all(_piece_in_domain(piece, n) for piece in region.pieces):
            contained += 1
        elif any(is_full_dimensional(intersect(piece, delta)) for piece in region.pieces):
            extra += multiplicity([float(g) for g in region.map.gradient], n)
    group = math.factorial(n)
    log.debug(f"{contained} regions inside the sorted cone, orbit surplus {extra}")
    return group * contained, group * contained + extra


def estimate_csv_row(
    net: Network, cfg: SampleConfig, estimate: RegionEstimate, timing: bool = True
) -> Dict[str, Any]:
    return {
        "seed": cfg.seed,
        "architecture": "[" + ",".join(str(k) for k in net.architecture) + "]",
        "R": cfg.box_radius,
        "N": cfg.npoints,
        "scheme": cfg.scheme,
        "fundamental": cfg.restrict_to_fundamental,
        "count": estimate.count,
        "elapsed_seconds": f"{estimate.elapsed:.6f}" if timing else "",
    }


@dataclass(frozen=True)
class RatioRow:
    n: int
    estimate_ratio_mean: float
    estimate_ratio_std: float
    time_ratio_mean: float
    time_ratio_std: float

    def to_json(self) -> Dict[str, Any]:
        return {
            "n": self.n,
            "estimate_ratio_mean": self.estimate_ratio_mean,
            "estimate_ratio_std": self.estimate_ratio_std,
            "time_ratio_mean": self.time_ratio_mean,
            "time_ratio_std": self.time_ratio_std,
        }


def random_invariant_network(n: int, seed: int) -> Network:
    """``build_invariant`` with ``lam ~ U(0.5, 1.5)`` and ``gam ~ U(0, 1)``."""
    rng = np.random.default_rng(seed)
    lam, gam = rng.uniform(0.5, 1.5), rng.uniform(0.0, 1.0)
    return build_invariant(n, float(lam), float(gam))


def ratio_experiment(
    ns: Sequence[int],
    repetitions: Optional[int] = None,
    seed: Optional[int] = None,
    box_radius: float = 20.0,
    base: int = 10,
    threads: Optional[int] = None,
) -> List[RatioRow]:
    """
    Fundamental-domain estimate against the plain estimate on random invariant networks.

    The plain run samples ``base^n`` points, the fundamental run ``ceil(base^n / n!)``.
    Ratios are fundamental over plain, for both the estimate and the elapsed time.
    """
    repetitions = settings.experiment.repetitions if repetitions is None else repetitions
    seed = settings.runtime.seed if seed is None else seed
    rows = []
    for n in ns:
        estimate_ratios = []
        time_ratios = []
        for rep in range(repetitions):
            trial_seed = seed + 1000 * n + rep
            net = random_invariant_network(n, trial_seed)
            cfg = SampleConfig(box_radius=box_radius, npoints=base**n, seed=trial_seed)
            full = estimate_regions(net, cfg, threads)
            reduced = estimate_regions_fundamental(net, cfg, threads)
            estimate_ratios.append(reduced.count / full.count)
            time_ratios.append(reduced.elapsed / max(full.elapsed, 1e-12))
        row = RatioRow(
            n,
            float(np.mean(estimate_ratios)),
            float(np.std(estimate_ratios)),
            float(np.mean(time_ratios)),
            float(np.std(time_ratios)),
        )
        log.info(
            f"n={n}: estimate ratio {row.estimate_ratio_mean:.3f} +/- {row.estimate_ratio_std:.3f}, "
            f"time ratio {row.time_ratio_mean:.3f}"
        )
        rows.append(row)
    return rows
