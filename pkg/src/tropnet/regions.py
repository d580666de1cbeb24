"""
Exact linear regions of tropical polynomials, rational maps and networks
"""

from dataclasses import dataclass
from functools import cached_property
from typing import Any, Dict, List, Optional, Sequence, Tuple

from .exact import RationalLike, Vector, as_vector
from .exceptions import ValidationError
from .logging_config import log
from .network import Network
from .parallel import parallel_map
from .polyhedra import Polyhedron, contains, intersect, is_bounded, is_full_dimensional
from .polyhedra import connected_components
from .tropical import AffineMap, TropicalPolynomial, TropicalRationalMap, irredundant_indices
from .tropical import monomial_region
from .tropicalize import tropicalize


@dataclass(frozen=True)
class LinearRegion:
    """A maximal connected set on which the function equals ``map``; the union of ``pieces``."""

    map: AffineMap
    pieces: Tuple[Polyhedron, ...]

    def __post_init__(self):
        object.__setattr__(self, "pieces", tuple(self.pieces))
        if not self.pieces:
            raise ValidationError("A linear region needs at least one piece")

    @cached_property
    def bounded(self) -> bool:
        return all(is_bounded(piece) for piece in self.pieces)

    def contains(self, x: Sequence[RationalLike]) -> bool:
        point = as_vector(x)
        return any(contains(piece, point) for piece in self.pieces)

    def to_json(self) -> Dict[str, Any]:
        return {
            "map": self.map.to_json(),
            "pieces": [piece.to_json() for piece in self.pieces],
            "bounded": self.bounded,
        }


def polynomial_regions(
    f: TropicalPolynomial, threads: Optional[int] = None
) -> List[LinearRegion]:
    """One region per irredundant monomial, ordered by affine map."""
    regions = [
        LinearRegion(f.monomials[i].as_affine(), (monomial_region(f, i),))
        for i in irredundant_indices(f, threads)
    ]
    regions.sort(key=lambda region: region.map.key)
    log.debug(f"Polynomial with {len(f)} monomials has {len(regions)} linear regions")
    return regions


def _pair_is_full(args: Tuple[Polyhedron, Polyhedron]) -> bool:
    U, V = args
    return is_full_dimensional(intersect(U, V))


def _group_components(pieces: List[Polyhedron]) -> List[List[int]]:
    return connected_components(pieces, threads=1)


def rational_regions(
    f: TropicalRationalMap, threads: Optional[int] = None
) -> List[LinearRegion]:
    """
    Linear regions of ``p (/) q``.

    Every full-dimensional ``U_i & V_j`` is a piece on which the function is
    ``L_i - S_j``. Pieces are grouped by that map and each group is split into its
    connected components; every component is one region. Regions are ordered by map, then
    by the first (i, j) pair they contain.
    """
    p, q = f.numerator, f.denominator
    p_keep = irredundant_indices(p, threads)
    q_keep = irredundant_indices(q, threads)
    U = {i: monomial_region(p, i) for i in p_keep}
    V = {j: monomial_region(q, j) for j in q_keep}

    pairs = [(i, j) for i in p_keep for j in q_keep]
    full = parallel_map(_pair_is_full, [(U[i], V[j]) for i, j in pairs], threads)

    groups: Dict[Tuple[Vector, Any], Tuple[AffineMap, List[Polyhedron]]] = {}
    for (i, j), keep in zip(pairs, full):
        if not keep:
            continue
        T = p.monomials[i].as_affine() - q.monomials[j].as_affine()
        entry = groups.setdefault(T.key, (T, []))
        entry[1].append(intersect(U[i], V[j]))

    group_list = list(groups.values())
    components = parallel_map(_group_components, [pieces for _, pieces in group_list], threads)

    regions = []
    for (T, pieces), comps in zip(group_list, components):
        for comp in comps:
            regions.append((T.key, comp[0], LinearRegion(T, tuple(pieces[k] for k in comp))))
    regions.sort(key=lambda item: (item[0], item[1]))
    log.info(
        f"{sum(full)} of {len(pairs)} monomial pairs are full-dimensional; "
        f"{len(group_list)} distinct maps, {len(regions)} linear regions"
    )
    return [region for _, _, region in regions]


def network_regions(
    net: Network, output_index: Optional[int] = None, threads: Optional[int] = None
) -> List[LinearRegion]:
    """
    Regions of one output coordinate of ``net``.

    Raises:
        ValidationError: If the network has several outputs and no ``output_index``
    """
    if output_index is None:
        if net.output_dim != 1:
            raise ValidationError(
                f"Network has {net.output_dim} outputs; choose one with output_index"
            )
        output_index = 0
    if not 0 <= output_index < net.output_dim:
        raise ValidationError(f"Output index {output_index} out of range for {net.output_dim}")
    maps = tropicalize(net, threads)
    return rational_regions(maps[output_index], threads)


def locate(regions: Sequence[LinearRegion], x: Sequence[RationalLike]) -> List[int]:
    """Indices of the regions with a piece containing ``x``."""
    point = as_vector(x)
    return [k for k, region in enumerate(regions) if region.contains(point)]


def regions_report(regions: Sequence[LinearRegion]) -> Dict[str, Any]:
    return {"count": len(regions), "regions": [region.to_json() for region in regions]}
