"""
Experiment harness for tropnet

Each experiment returns per-trial rows plus a summary. Trials are independent and may run
in worker processes; rows always come back ordered by their trial index.
"""

import inspect
import json
import math
import time
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .config import settings
from .exceptions import ValidationError
from .hoffman import hoffman_lower, hoffman_tropical, hoffman_upper, stacked_matrix
from .logging_config import log
from .network import random_network
from .parallel import parallel_map
from .regions import network_regions, rational_regions
from .sampling import SampleConfig, estimate_regions, ratio_experiment
from .tropical import monomial_complexity, random_rational_map
from .tropicalize import tropicalize_with_counts


@dataclass
class ExperimentReport:
    name: str
    rows: List[Dict[str, Any]] = field(default_factory=list)
    summary: Dict[str, Any] = field(default_factory=dict)

    def to_json(self) -> Dict[str, Any]:
        return {"experiment": self.name, "summary": self.summary, "rows": self.rows}


def parse_architectures(text: str) -> List[List[int]]:
    """Accept ``[6,2,1]``, ``[6,2,1],[5,3,1]`` or ``[[6,2,1],[5,3,1]]``."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError:
        try:
            data = json.loads(f"[{text}]")
        except json.JSONDecodeError as e:
            raise ValidationError(f"Cannot parse architectures from '{text}'") from e
    if isinstance(data, list) and data and all(isinstance(k, int) for k in data):
        data = [data]
    if (
        not isinstance(data, list)
        or not data
        or not all(isinstance(a, list) and len(a) >= 2 for a in data)
        or not all(isinstance(k, int) and k >= 1 for a in data for k in a)
    ):
        raise ValidationError(f"Cannot parse architectures from '{text}'")
    return data


def _arch_label(arch: Sequence[int]) -> str:
    return "[" + ",".join(str(k) for k in arch) + "]"


def _table_trial(args: Tuple[List[int], int, float, int]) -> Dict[str, Any]:
    arch, seed, radius, npoints = args
    net = random_network(arch, seed)
    start = time.perf_counter()
    symbolic = len(network_regions(net, threads=1))
    symbolic_seconds = time.perf_counter() - start
    estimate = estimate_regions(net, SampleConfig(box_radius=radius, npoints=npoints, seed=seed), 1)
    return {
        "architecture": _arch_label(arch),
        "seed": seed,
        "symbolic": symbolic,
        "numerical": estimate.count,
        "symbolic_seconds": round(symbolic_seconds, 4),
        "numerical_seconds": round(estimate.elapsed, 4),
    }


def table_symbolic_vs_numerical(
    archs: Optional[List[List[int]]] = None,
    trials: Optional[int] = None,
    npoints: int = 1000,
    radius: float = 5.0,
    seed: Optional[int] = None,
    threads: Optional[int] = None,
) -> ExperimentReport:
    """Exact region counts against sampled estimates on random networks."""
    archs = archs or [[6, 2, 1], [5, 3, 1], [4, 4, 1], [2, 6, 1], [3, 5, 1]]
    trials = settings.experiment.trials if trials is None else trials
    seed = settings.runtime.seed if seed is None else seed
    tasks = [
        (arch, seed + 1000 * a + t, radius, npoints)
        for a, arch in enumerate(archs)
        for t in range(trials)
    ]
    rows = parallel_map(_table_trial, tasks, threads)
    summary = {}
    for arch in archs:
        label = _arch_label(arch)
        mine = [row for row in rows if row["architecture"] == label]
        summary[label] = {
            "symbolic_mean": float(np.mean([row["symbolic"] for row in mine])),
            "numerical_mean": float(np.mean([row["numerical"] for row in mine])),
            "symbolic_minutes": sum(row["symbolic_seconds"] for row in mine) / 60.0,
        }
        log.info(
            f"{label}: symbolic mean {summary[label]['symbolic_mean']:.2f}, "
            f"numerical mean {summary[label]['numerical_mean']:.2f}"
        )
    return ExperimentReport("table-symbolic-vs-numerical", rows, summary)


def _monomial_trial(args: Tuple[List[int], int]) -> Dict[str, Any]:
    arch, seed = args
    out = tropicalize_with_counts(random_network(arch, seed), threads=1)[0]
    return {
        "architecture": _arch_label(arch),
        "seed": seed,
        "numerator": out.canonical_terms[0],
        "denominator": out.canonical_terms[1],
        "monomials": sum(out.canonical_terms),
    }


def width_depth(
    dims: Sequence[int] = (2, 3),
    widths: Sequence[int] = (2, 3, 4, 5),
    trials: int = 10,
    seed: Optional[int] = None,
    threads: Optional[int] = None,
) -> ExperimentReport:
    """Monomial counts of ``[d,k,1]`` against ``[d,2,k,1]``."""
    seed = settings.runtime.seed if seed is None else seed
    archs = [[d, k, 1] for d in dims for k in widths] + [[d, 2, k, 1] for d in dims for k in widths]
    tasks = [(arch, seed + 1000 * a + t) for a, arch in enumerate(archs) for t in range(trials)]
    rows = parallel_map(_monomial_trial, tasks, threads)
    summary = {}
    for arch in archs:
        label = _arch_label(arch)
        counts = [row["monomials"] for row in rows if row["architecture"] == label]
        summary[label] = {"monomials_mean": float(np.mean(counts))}
    return ExperimentReport("width-depth", rows, summary)


def _pruning_trial(args: Tuple[List[int], int]) -> Dict[str, Any]:
    arch, seed = args
    out = tropicalize_with_counts(random_network(arch, seed), threads=1)[0]
    kept = monomial_complexity(out.map, threads=1)
    total = sum(out.canonical_terms)
    return {
        "architecture": _arch_label(arch),
        "seed": seed,
        "monomials": total,
        "irredundant": sum(kept),
        "pruning_rate": 1.0 - sum(kept) / total,
    }


def pruning_rate(
    widths: Sequence[int] = (2, 3, 4, 5, 6),
    trials: int = 10,
    seed: Optional[int] = None,
    threads: Optional[int] = None,
) -> ExperimentReport:
    """Share of native monomials removed by pruning for ``[2,w,1]`` networks."""
    seed = settings.runtime.seed if seed is None else seed
    archs = [[2, w, 1] for w in widths]
    tasks = [(arch, seed + 1000 * a + t) for a, arch in enumerate(archs) for t in range(trials)]
    rows = parallel_map(_pruning_trial, tasks, threads)
    summary = {}
    for arch in archs:
        label = _arch_label(arch)
        rates = [row["pruning_rate"] for row in rows if row["architecture"] == label]
        summary[label] = {"pruning_rate_mean": float(np.mean(rates))}
    return ExperimentReport("pruning-rate", rows, summary)


def ratio_estimates(
    dims: Sequence[int] = (2, 3, 4),
    repetitions: Optional[int] = None,
    seed: Optional[int] = None,
    threads: Optional[int] = None,
) -> ExperimentReport:
    rows = [row.to_json() for row in ratio_experiment(dims, repetitions, seed, threads=threads)]
    return ExperimentReport("ratio-estimates", rows, {"n": list(dims)})


def _hoffman_trial(args: Tuple[int, int, int, int, int, int]) -> Dict[str, Any]:
    m_p, m_q, n, seed, iterations, cap = args
    f = random_rational_map(n, m_p, m_q, seed)
    exact = hoffman_tropical(f, cap=cap, iterations=iterations, seed=seed, threads=1)
    lower = 0.0
    upper = 0.0
    for i in range(m_p):
        for j in range(m_q):
            M = stacked_matrix(f.numerator, f.denominator, i, j)
            lower = max(lower, float(hoffman_lower(M, iterations, seed).value))
            upper = max(upper, hoffman_upper(M, certified=True, cap=cap).value)
    return {
        "m_p": m_p,
        "m_q": m_q,
        "n": n,
        "seed": seed,
        "H_lower": lower,
        "H_exact": float(exact.value),
        "H_upper": upper,
    }


def hoffman_tables(
    shapes: Sequence[Tuple[int, int, int]] = ((2, 3, 6),),
    instances: Optional[int] = None,
    iterations: Optional[int] = None,
    seed: Optional[int] = None,
    threads: Optional[int] = None,
) -> ExperimentReport:
    """Lower bound, exact value and certified upper bound on random rational maps."""
    instances = settings.experiment.hoffman_instances if instances is None else instances
    iterations = settings.hoffman.lower_iterations if iterations is None else iterations
    seed = settings.runtime.seed if seed is None else seed
    cap = settings.hoffman.subset_cap
    tasks = [
        (m_p, m_q, n, seed + 1000 * s + k, iterations, cap)
        for s, (m_p, m_q, n) in enumerate(shapes)
        for k in range(instances)
    ]
    rows = parallel_map(_hoffman_trial, tasks, threads)
    summary = {
        "sandwich_holds": all(r["H_lower"] <= r["H_exact"] <= r["H_upper"] + 1e-9 for r in rows)
    }
    return ExperimentReport("hoffman-tables", rows, summary)


def _regions_trial(args: Tuple[int, int, int, int]) -> Dict[str, Any]:
    n, m_p, m_q, seed = args
    f = random_rational_map(n, m_p, m_q, seed)
    return {
        "n": n,
        "monomials": m_p + m_q,
        "seed": seed,
        "regions": len(rational_regions(f, threads=1)),
    }


def monomials_regions(
    dims: Sequence[int] = (3,),
    totals: Sequence[int] = (2, 4, 6, 8),
    trials: int = 10,
    seed: Optional[int] = None,
    threads: Optional[int] = None,
) -> ExperimentReport:
    """Mean region counts of random rational maps by variable count and monomial total."""
    seed = settings.runtime.seed if seed is None else seed
    if any(total < 2 for total in totals):
        raise ValidationError("A rational map needs at least two monomials")
    tasks = []
    for d, n in enumerate(dims):
        for a, total in enumerate(totals):
            m_p = math.ceil(total / 2)
            base = seed + 100000 * d + 1000 * a
            tasks.extend((n, m_p, total - m_p, base + t) for t in range(trials))
    rows = parallel_map(_regions_trial, tasks, threads)
    summary = {
        f"n={n}": {
            str(total): float(
                np.mean([r["regions"] for r in rows if r["n"] == n and r["monomials"] == total])
            )
            for total in totals
        }
        for n in dims
    }
    return ExperimentReport("monomials-regions", rows, summary)


EXPERIMENTS: Dict[str, Callable[..., ExperimentReport]] = {
    "table-symbolic-vs-numerical": table_symbolic_vs_numerical,
    "width-depth": width_depth,
    "pruning-rate": pruning_rate,
    "ratio-estimates": ratio_estimates,
    "hoffman-tables": hoffman_tables,
    "monomials-regions": monomials_regions,
}


def run_experiment(name: str, **options: Any) -> ExperimentReport:
    """Run a named experiment; options left as None take the experiment's defaults."""
    if name not in EXPERIMENTS:
        raise ValidationError(f"Unknown experiment '{name}', choose from {sorted(EXPERIMENTS)}")
    accepted = inspect.signature(EXPERIMENTS[name]).parameters
    kwargs = {}
    for key, value in options.items():
        if value is None:
            continue
        if key not in accepted:
            log.warning(f"Option {key} does not apply to {name}; ignoring it")
            continue
        kwargs[key] = value
    log.info(f"Running experiment {name} with {kwargs}")
    return EXPERIMENTS[name](**kwargs)
