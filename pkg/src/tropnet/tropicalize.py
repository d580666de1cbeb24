"""
Native tropical representation of a ReLU network

Each unit of layer ``l`` is carried as a pair ``(F, G)`` of tropical polynomials with
``unit(x) = F(x) - G(x)``. Splitting ``W = W+ - W-`` into nonnegative parts, the next layer is

    H = b (.) prod_k F_k^{W+_k} (.) G_k^{W-_k}
    G' = prod_k F_k^{W-_k} (.) G_k^{W+_k}
    F' = H (+) G'        (after a ReLU; otherwise F' = H)

starting from ``F_k = T^{e_k}`` and ``G_k = 0``. All exponents stay nonnegative.
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from .exact import Vector
from .logging_config import log
from .network import Network
from .parallel import parallel_map
from .tropical import TropicalPolynomial, TropicalRationalMap

Pair = Tuple[TropicalPolynomial, TropicalPolynomial]


@dataclass(frozen=True)
class TropicalizedOutput:
    """One output coordinate with the term counts of its native representation."""

    map: TropicalRationalMap
    native_terms: Tuple[int, int]

    @property
    def canonical_terms(self) -> Tuple[int, int]:
        return (len(self.map.numerator), len(self.map.denominator))


def _weighted_product(
    polys: Sequence[TropicalPolynomial], weights: Sequence[Fraction], nvars: int
) -> TropicalPolynomial:
    result = TropicalPolynomial.constant(0, nvars)
    for poly, w in zip(polys, weights):
        if w:
            result = result.otimes(poly.power(w))
    return result


def _unit_pair(
    F: Sequence[TropicalPolynomial],
    G: Sequence[TropicalPolynomial],
    row: Vector,
    bias: Fraction,
    activated: bool,
) -> Tuple[Pair, int]:
    """Next-layer pair for one unit and the number of terms before the final merge."""
    nvars = F[0].nvars
    positive = [w if w > 0 else Fraction(0) for w in row]
    negative = [-w if w < 0 else Fraction(0) for w in row]
    H = _weighted_product(F, positive, nvars).otimes(_weighted_product(G, negative, nvars))
    H = H.shift(bias)
    G_new = _weighted_product(F, negative, nvars).otimes(_weighted_product(G, positive, nvars))
    if not activated:
        return (H, G_new), len(H)
    return (H.oplus(G_new), G_new), len(H) + len(G_new)


def _unit_task(args) -> Tuple[Pair, int]:
    return _unit_pair(*args)


def _base_pairs(n: int) -> List[Pair]:
    zero = TropicalPolynomial.constant(0, n)
    return [(TropicalPolynomial.variable(k, n), zero) for k in range(n)]


def tropicalize_with_counts(
    net: Network, threads: Optional[int] = None
) -> List[TropicalizedOutput]:
    """
    Tropicalize every output coordinate and keep the native term counts.

    The numerator count of an activated output is ``|H| + |G|``, the number of terms the
    construction produces before equal exponents are merged.

    Args:
        net: Network to convert
        threads: Worker processes for the units of each layer

    Returns:
        One TropicalizedOutput per output coordinate
    """
    n = net.input_dim
    pairs = _base_pairs(n)
    native: List[int] = []
    for index, layer in enumerate(net.layers):
        F = [p for p, _ in pairs]
        G = [q for _, q in pairs]
        activated = net.activated(index)
        tasks = [
            (F, G, layer.weights.row(i), layer.bias[i], activated)
            for i in range(layer.weights.rows)
        ]
        results = parallel_map(_unit_task, tasks, threads)
        pairs = [pair for pair, _ in results]
        native = [count for _, count in results]
        log.debug(
            f"Layer {index + 1}: unit sizes "
            f"{[(len(p), len(q)) for p, q in pairs]}"
        )

    outputs = [
        TropicalizedOutput(TropicalRationalMap(p, q), (count, len(q)))
        for (p, q), count in zip(pairs, native)
    ]
    for k, out in enumerate(outputs):
        log.info(
            f"Output {k}: native {out.native_terms[0]} (/) {out.native_terms[1]} terms, "
            f"canonical {out.canonical_terms[0]} (/) {out.canonical_terms[1]}"
        )
    return outputs


def tropicalize(net: Network, threads: Optional[int] = None) -> List[TropicalRationalMap]:
    """One rational map per output coordinate with ``f_k(x) == forward(net, x)[k]``."""
    return [out.map for out in tropicalize_with_counts(net, threads)]
