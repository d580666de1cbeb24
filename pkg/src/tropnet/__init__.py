"""
tropnet - tropical geometry toolkit for ReLU networks

This package converts ReLU networks into tropical Puiseux rational maps, enumerates their
linear regions exactly, estimates region counts by sampling, and computes Hoffman constants
and the effective-radius bounds derived from them.
"""

from .config import settings
from .exact import ExactMatrix, exactify, format_rational, parse_rational, rank
from .exceptions import (
    ConfigurationError,
    DimensionMismatchError,
    EmptyPolyhedronError,
    ModelFileError,
    NonFiniteValueError,
    SolverError,
    SubsetCapExceededError,
    TropNetError,
    ValidationError,
)
from .hoffman import (
    HoffmanKind,
    HoffmanResult,
    TropicalHoffman,
    hoffman_exact,
    hoffman_lower,
    hoffman_tropical,
    hoffman_upper,
    radius_bound,
    radius_bound_polynomial,
    surjectivity_value,
)
from .logging_config import log
from .lp import LpOutcome, LpProblem, LpStatus, Sense, solve
from .network import (
    Network,
    build_invariant,
    forward,
    jacobian,
    load_network,
    random_network,
    save_network,
)
from .polyhedra import (
    Polyhedron,
    connected_components,
    dimension,
    implicit_split,
    interior_point,
    intersect,
    is_bounded,
    is_empty,
)
from .regions import LinearRegion, network_regions, polynomial_regions, rational_regions
from .sampling import (
    RegionEstimate,
    SampleConfig,
    estimate_regions,
    estimate_regions_fundamental,
    fundamental_bounds,
    multiplicity,
)
from .tropical import (
    AffineMap,
    Monomial,
    TropicalPolynomial,
    TropicalRationalMap,
    evaluate,
    monomial_region,
    prune,
)
from .tropicalize import tropicalize, tropicalize_with_counts

__version__ = "0.1.0"
__author__ = "tropnet Team"
__all__ = [
    # Configuration and logging
    "settings",
    "log",
    # Exact arithmetic and linear programming
    "ExactMatrix",
    "exactify",
    "format_rational",
    "parse_rational",
    "rank",
    "LpProblem",
    "LpOutcome",
    "LpStatus",
    "Sense",
    "solve",
    # Polyhedra
    "Polyhedron",
    "intersect",
    "is_empty",
    "implicit_split",
    "dimension",
    "interior_point",
    "is_bounded",
    "connected_components",
    # Tropical algebra
    "AffineMap",
    "Monomial",
    "TropicalPolynomial",
    "TropicalRationalMap",
    "evaluate",
    "monomial_region",
    "prune",
    # Networks
    "Network",
    "forward",
    "jacobian",
    "build_invariant",
    "random_network",
    "load_network",
    "save_network",
    "tropicalize",
    "tropicalize_with_counts",
    # Linear regions
    "LinearRegion",
    "polynomial_regions",
    "rational_regions",
    "network_regions",
    # Hoffman constants
    "HoffmanKind",
    "HoffmanResult",
    "TropicalHoffman",
    "surjectivity_value",
    "hoffman_exact",
    "hoffman_lower",
    "hoffman_upper",
    "hoffman_tropical",
    "radius_bound",
    "radius_bound_polynomial",
    # Sampling
    "SampleConfig",
    "RegionEstimate",
    "estimate_regions",
    "estimate_regions_fundamental",
    "multiplicity",
    "fundamental_bounds",
    # Exceptions
    "TropNetError",
    "ConfigurationError",
    "ValidationError",
    "DimensionMismatchError",
    "NonFiniteValueError",
    "EmptyPolyhedronError",
    "SolverError",
    "SubsetCapExceededError",
    "ModelFileError",
]
