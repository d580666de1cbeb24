"""
Tropical Puiseux polynomials and rational maps

A polynomial ``f = (+)_i a_i T^{alpha_i}`` is stored as (coefficient, exponent) pairs and
evaluates as ``max_i (a_i + <alpha_i, x>)``. Addition is max, multiplication is +. A rational
map ``p (/) q`` evaluates as ``p(x) - q(x)``.
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from .exact import RationalLike, Vector, as_fraction, as_vector, dot, exactify, format_rational
from .exceptions import DimensionMismatchError, ModelFileError, ValidationError
from .logging_config import log
from .parallel import parallel_map
from .polyhedra import Polyhedron, is_full_dimensional

ZERO = Fraction(0)


@dataclass(frozen=True)
class AffineMap:
    """``x -> <gradient, x> + intercept``"""

    gradient: Vector
    intercept: Fraction

    def __call__(self, x: Sequence[Fraction]) -> Fraction:
        return dot(self.gradient, x) + self.intercept

    def __sub__(self, other: "AffineMap") -> "AffineMap":
        if len(self.gradient) != len(other.gradient):
            raise DimensionMismatchError("Affine maps act on different dimensions")
        return AffineMap(
            tuple(a - b for a, b in zip(self.gradient, other.gradient)),
            self.intercept - other.intercept,
        )

    @property
    def key(self) -> Tuple[Vector, Fraction]:
        """Total order used to sort regions deterministically."""
        return (self.gradient, self.intercept)

    def to_json(self) -> Dict[str, Any]:
        return {
            "gradient": [format_rational(g) for g in self.gradient],
            "intercept": format_rational(self.intercept),
        }


@dataclass(frozen=True)
class Monomial:
    coeff: Fraction
    exps: Vector

    def value(self, x: Sequence[Fraction]) -> Fraction:
        return self.coeff + dot(self.exps, x)

    def as_affine(self) -> AffineMap:
        return AffineMap(self.exps, self.coeff)

    def to_json(self) -> Dict[str, Any]:
        return {"coeff": format_rational(self.coeff), "exps": [format_rational(e) for e in self.exps]}

    def to_text(self) -> str:
        return f"{format_rational(self.coeff)} | " + " ".join(format_rational(e) for e in self.exps)


def _canonicalize(monomials: Iterable[Monomial]) -> Tuple[Monomial, ...]:
    """Merge equal exponent vectors keeping the largest coefficient; first-seen order."""
    best: Dict[Vector, Fraction] = {}
    for mono in monomials:
        current = best.get(mono.exps)
        if current is None or mono.coeff > current:
            best[mono.exps] = mono.coeff
    return tuple(Monomial(coeff, exps) for exps, coeff in best.items())


@dataclass(frozen=True, init=False)
class TropicalPolynomial:
    nvars: int
    monomials: Tuple[Monomial, ...]

    def __init__(self, monomials: Iterable[Union[Monomial, Tuple[RationalLike, Sequence]]], nvars: Optional[int] = None):
        items = []
        for mono in monomials:
            if not isinstance(mono, Monomial):
                coeff, exps = mono
                mono = Monomial(as_fraction(coeff), as_vector(exps))
            items.append(mono)
        if not items:
            raise ValidationError("A tropical polynomial needs at least one monomial")
        if nvars is None:
            nvars = len(items[0].exps)
        if nvars < 1:
            raise ValidationError("A tropical polynomial needs at least one variable")
        for mono in items:
            if len(mono.exps) != nvars:
                raise DimensionMismatchError(
                    f"Monomial has {len(mono.exps)} exponents, expected {nvars}"
                )
            if any(e < 0 for e in mono.exps):
                raise ValidationError(f"Negative exponent in {mono.to_text()}")
        object.__setattr__(self, "nvars", nvars)
        object.__setattr__(self, "monomials", _canonicalize(items))

    @classmethod
    def constant(cls, c: RationalLike, nvars: int) -> "TropicalPolynomial":
        return cls([Monomial(as_fraction(c), (ZERO,) * nvars)], nvars)

    @classmethod
    def monomial(cls, coeff: RationalLike, exps: Sequence[RationalLike]) -> "TropicalPolynomial":
        return cls([Monomial(as_fraction(coeff), as_vector(exps))])

    @classmethod
    def variable(cls, index: int, nvars: int) -> "TropicalPolynomial":
        exps = [ZERO] * nvars
        exps[index] = Fraction(1)
        return cls([Monomial(ZERO, tuple(exps))], nvars)

    def __len__(self) -> int:
        return len(self.monomials)

    def _check(self, other: "TropicalPolynomial") -> None:
        if other.nvars != self.nvars:
            raise DimensionMismatchError(
                f"Polynomials in {self.nvars} and {other.nvars} variables cannot be combined"
            )

    def evaluate(self, x: Sequence[RationalLike]) -> Fraction:
        point = self._point(x)
        return max(mono.value(point) for mono in self.monomials)

    def min_conjugate(self, x: Sequence[RationalLike]) -> Fraction:
        """Same affine terms combined with min instead of max."""
        point = self._point(x)
        return min(mono.value(point) for mono in self.monomials)

    def __call__(self, x: Sequence[RationalLike]) -> Fraction:
        return self.evaluate(x)

    def _point(self, x: Sequence[RationalLike]) -> Vector:
        if len(x) != self.nvars:
            raise DimensionMismatchError(
                f"Point has length {len(x)}, polynomial has {self.nvars} variables"
            )
        return as_vector(x)

    def oplus(self, other: "TropicalPolynomial") -> "TropicalPolynomial":
        self._check(other)
        return TropicalPolynomial(self.monomials + other.monomials, self.nvars)

    def otimes(self, other: "TropicalPolynomial") -> "TropicalPolynomial":
        self._check(other)
        products = [
            Monomial(a.coeff + b.coeff, tuple(x + y for x, y in zip(a.exps, b.exps)))
            for a in self.monomials
            for b in other.monomials
        ]
        return TropicalPolynomial(products, self.nvars)

    def power(self, c: RationalLike) -> "TropicalPolynomial":
        c = as_fraction(c)
        if c < 0:
            raise ValidationError(f"Tropical powers must be nonnegative, got {c}")
        return TropicalPolynomial(
            [Monomial(c * m.coeff, tuple(c * e for e in m.exps)) for m in self.monomials],
            self.nvars,
        )

    __add__ = oplus
    __mul__ = otimes
    __pow__ = power

    def shift(self, c: RationalLike) -> "TropicalPolynomial":
        """Tropical product with the constant ``c``."""
        c = as_fraction(c)
        return TropicalPolynomial(
            [Monomial(m.coeff + c, m.exps) for m in self.monomials], self.nvars
        )

    def affine_pieces(self) -> List[AffineMap]:
        return [m.as_affine() for m in self.monomials]

    def to_json(self) -> Dict[str, Any]:
        return {"nvars": self.nvars, "monomials": [m.to_json() for m in self.monomials]}

    @classmethod
    def from_json(cls, data: Union[Dict[str, Any], List[Dict[str, Any]]]) -> "TropicalPolynomial":
        entries = data["monomials"] if isinstance(data, dict) else data
        nvars = data.get("nvars") if isinstance(data, dict) else None
        return cls([(entry["coeff"], entry["exps"]) for entry in entries], nvars)

    def to_text(self) -> str:
        return "\n".join(m.to_text() for m in self.monomials) + "\n"

    @classmethod
    def from_text(cls, text: str, path: Optional[str] = None) -> "TropicalPolynomial":
        """Parse one ``coeff | e1 ... en`` monomial per line; ``#`` starts a comment."""
        monomials = []
        nvars = None
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "|" not in line:
                raise ModelFileError("expected 'coeff | e1 e2 ... en'", path, lineno)
            coeff_text, exps_text = line.split("|", 1)
            try:
                coeff = as_fraction(coeff_text.strip())
                exps = as_vector(exps_text.split())
            except ValidationError as e:
                raise ModelFileError(str(e), path, lineno) from e
            if nvars is None:
                nvars = len(exps)
            elif len(exps) != nvars:
                raise ModelFileError(f"expected {nvars} exponents, found {len(exps)}", path, lineno)
            if any(e < 0 for e in exps):
                raise ModelFileError("exponents must be nonnegative", path, lineno)
            monomials.append(Monomial(coeff, exps))
        if not monomials:
            raise ModelFileError("no monomials found", path)
        return cls(monomials, nvars)

    def __str__(self) -> str:
        return " (+) ".join(
            f"{format_rational(m.coeff)}*T^({', '.join(format_rational(e) for e in m.exps)})"
            for m in self.monomials
        )


@dataclass(frozen=True)
class TropicalRationalMap:
    numerator: TropicalPolynomial
    denominator: TropicalPolynomial

    def __post_init__(self):
        if self.numerator.nvars != self.denominator.nvars:
            raise DimensionMismatchError(
                f"Numerator has {self.numerator.nvars} variables, "
                f"denominator has {self.denominator.nvars}"
            )

    @classmethod
    def from_polynomial(cls, p: TropicalPolynomial) -> "TropicalRationalMap":
        return cls(p, TropicalPolynomial.constant(0, p.nvars))

    @property
    def nvars(self) -> int:
        return self.numerator.nvars

    def evaluate(self, x: Sequence[RationalLike]) -> Fraction:
        return self.numerator.evaluate(x) - self.denominator.evaluate(x)

    __call__ = evaluate

    def pruned(self, threads: Optional[int] = None) -> "TropicalRationalMap":
        return TropicalRationalMap(prune(self.numerator, threads), prune(self.denominator, threads))

    def to_json(self) -> Dict[str, Any]:
        return {"numerator": self.numerator.to_json(), "denominator": self.denominator.to_json()}

    @classmethod
    def from_json(cls, data: Dict[str, Any]) -> "TropicalRationalMap":
        return cls(
            TropicalPolynomial.from_json(data["numerator"]),
            TropicalPolynomial.from_json(data["denominator"]),
        )


def evaluate(f: Union[TropicalPolynomial, TropicalRationalMap], x: Sequence[RationalLike]) -> Fraction:
    return f.evaluate(x)


def monomial_region(f: TropicalPolynomial, i: int) -> Polyhedron:
    """
    The polyhedron where monomial ``i`` attains the max.

    One row per monomial ``j`` (the trivial row ``j == i`` included):
    ``<alpha_j - alpha_i, x> <= a_i - a_j``.
    """
    if not 0 <= i < len(f.monomials):
        raise ValidationError(f"Monomial index {i} out of range for {len(f.monomials)} monomials")
    mi = f.monomials[i]
    rows = []
    rhs = []
    for mj in f.monomials:
        rows.append(tuple(aj - ai for aj, ai in zip(mj.exps, mi.exps)))
        rhs.append(mi.coeff - mj.coeff)
    return Polyhedron.from_rows(rows, rhs, nvars=f.nvars)


def _region_is_full(args: Tuple[TropicalPolynomial, int]) -> bool:
    f, i = args
    return is_full_dimensional(monomial_region(f, i))


def irredundant_indices(f: TropicalPolynomial, threads: Optional[int] = None) -> List[int]:
    """Indices of monomials whose region is full-dimensional."""
    if len(f.monomials) == 1:
        return [0]
    flags = parallel_map(_region_is_full, [(f, i) for i in range(len(f.monomials))], threads)
    return [i for i, keep in enumerate(flags) if keep]


def prune(f: TropicalPolynomial, threads: Optional[int] = None) -> TropicalPolynomial:
    """Drop every monomial whose region has dimension below ``nvars``."""
    keep = irredundant_indices(f, threads)
    removed = len(f.monomials) - len(keep)
    if removed:
        log.debug(f"Pruned {removed} of {len(f.monomials)} monomials")
    return TropicalPolynomial([f.monomials[i] for i in keep], f.nvars)


def redundant_monomials(f: TropicalPolynomial, threads: Optional[int] = None) -> List[Monomial]:
    keep = set(irredundant_indices(f, threads))
    return [m for i, m in enumerate(f.monomials) if i not in keep]


def monomial_complexity(f: TropicalRationalMap, threads: Optional[int] = None) -> Tuple[int, int]:
    """Irredundant monomial counts of numerator and denominator."""
    return (
        len(irredundant_indices(f.numerator, threads)),
        len(irredundant_indices(f.denominator, threads)),
    )


def _random_monomials(rng: np.random.Generator, nvars: int, nmono: int) -> List[Monomial]:
    exps = rng.uniform(0.0, 1.0, size=(nmono, nvars))
    coeffs = rng.uniform(0.0, 1.0, size=nmono)
    return [
        Monomial(exactify(float(coeffs[k])), tuple(exactify(float(e)) for e in exps[k]))
        for k in range(nmono)
    ]


def random_polynomial(nvars: int, nmono: int, seed: int) -> TropicalPolynomial:
    """Exponents and coefficients drawn uniformly from [0, 1] and exactified."""
    if nmono < 1:
        raise ValidationError("A random polynomial needs at least one monomial")
    rng = np.random.default_rng(seed)
    return TropicalPolynomial(_random_monomials(rng, nvars, nmono), nvars)


def random_rational_map(nvars: int, m_p: int, m_q: int, seed: int) -> TropicalRationalMap:
    """Numerator and denominator drawn from one generator stream."""
    if m_p < 1 or m_q < 1:
        raise ValidationError("Both sides of a random rational map need monomials")
    rng = np.random.default_rng(seed)
    p = TropicalPolynomial(_random_monomials(rng, nvars, m_p), nvars)
    q = TropicalPolynomial(_random_monomials(rng, nvars, m_q), nvars)
    return TropicalRationalMap(p, q)
