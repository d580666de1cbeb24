"""
ReLU feedforward networks with exact rational weights

Weights are held as exact fractions for symbolic work and mirrored as float64 arrays for
batched numerical evaluation. A unit counts as active only when its preactivation is
strictly positive, in both arithmetics.
"""

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from pydantic import ValidationError as PydanticValidationError
from pydantic import model_validator

from .exact import ExactMatrix, RationalLike, Vector, as_vector, dot, exactify
from .exceptions import DimensionMismatchError, ModelFileError, ValidationError
from .logging_config import log

ZERO = Fraction(0)
SIGNATURE_DECIMALS = 10

JacobianSignature = Tuple[float, ...]


@dataclass(frozen=True)
class Layer:
    weights: ExactMatrix
    bias: Vector

    def __post_init__(self):
        object.__setattr__(self, "bias", as_vector(self.bias))
        if len(self.bias) != self.weights.rows:
            raise DimensionMismatchError(
                f"Bias has length {len(self.bias)} but weights have {self.weights.rows} rows"
            )

    def preactivation(self, x: Sequence[Fraction]) -> Vector:
        return tuple(z + c for z, c in zip(self.weights.matvec(x), self.bias))


@dataclass(frozen=True)
class Network:
    architecture: Tuple[int, ...]
    layers: Tuple[Layer, ...]
    final_activation: bool = False

    def __post_init__(self):
        object.__setattr__(self, "architecture", tuple(int(n) for n in self.architecture))
        object.__setattr__(self, "layers", tuple(self.layers))
        if len(self.architecture) != len(self.layers) + 1:
            raise DimensionMismatchError(
                f"Architecture {list(self.architecture)} needs {len(self.architecture) - 1} "
                f"layers, got {len(self.layers)}"
            )
        if not self.layers:
            raise ValidationError("A network needs at least one layer")
        for index, layer in enumerate(self.layers):
            expected = (self.architecture[index + 1], self.architecture[index])
            if layer.weights.shape != expected:
                raise DimensionMismatchError(
                    f"Layer {index} weights are {layer.weights.rows}x{layer.weights.cols}, "
                    f"expected {expected[0]}x{expected[1]}"
                )

    @property
    def input_dim(self) -> int:
        return self.architecture[0]

    @property
    def output_dim(self) -> int:
        return self.architecture[-1]

    @property
    def depth(self) -> int:
        return len(self.layers)

    def activated(self, index: int) -> bool:
        """Whether ReLU follows layer ``index``."""
        return index < self.depth - 1 or self.final_activation

    @cached_property
    def float_layers(self) -> List[Tuple[np.ndarray, np.ndarray]]:
        return [
            (layer.weights.to_float(), np.array([float(c) for c in layer.bias], dtype=float))
            for layer in self.layers
        ]

    def to_json(self) -> Dict[str, Any]:
        """Model file layout; rational weights are written as the nearest doubles."""
        return {
            "architecture": list(self.architecture),
            "final_activation": self.final_activation,
            "layers": [
                {
                    "weights": [[float(w) for w in layer.weights.row(i)] for i in range(layer.weights.rows)],
                    "bias": [float(c) for c in layer.bias],
                }
                for layer in self.layers
            ],
        }


class _LayerFile(BaseModel):
    weights: List[List[float]]
    bias: List[float]


class ModelFile(BaseModel):
    """Schema of a model file; doubles are exactified on conversion."""

    architecture: List[int] = Field(min_length=2)
    final_activation: bool = False
    layers: List[_LayerFile]

    model_config = ConfigDict(extra="forbid")

    @model_validator(mode="after")
    def check_shapes(self):
        if len(self.layers) != len(self.architecture) - 1:
            raise ValueError(
                f"architecture lists {len(self.architecture) - 1} layers, file has {len(self.layers)}"
            )
        for index, layer in enumerate(self.layers):
            rows, cols = self.architecture[index + 1], self.architecture[index]
            if len(layer.weights) != rows or any(len(row) != cols for row in layer.weights):
                raise ValueError(f"layer {index} weights must be {rows}x{cols}")
            if len(layer.bias) != rows:
                raise ValueError(f"layer {index} bias must have length {rows}")
        return self

    def to_network(self) -> Network:
        layers = tuple(
            Layer(
                ExactMatrix.from_rows(
                    [[exactify(w) for w in row] for row in layer.weights],
                    cols=self.architecture[index],
                ),
                tuple(exactify(c) for c in layer.bias),
            )
            for index, layer in enumerate(self.layers)
        )
        return Network(tuple(self.architecture), layers, self.final_activation)


def network_from_json(data: Dict[str, Any], path: Optional[str] = None) -> Network:
    try:
        return ModelFile.model_validate(data).to_network()
    except PydanticValidationError as e:
        first = e.errors()[0]
        where = ".".join(str(part) for part in first["loc"])
        raise ModelFileError(f"{where}: {first['msg']}", path) from e
    except ValidationError as e:
        raise ModelFileError(str(e), path) from e


def load_network(path: Union[str, Path]) -> Network:
    from .io import read_json

    net = network_from_json(read_json(path), str(path))
    log.info(f"Loaded network {list(net.architecture)} from {path}")
    return net


def save_network(net: Network, path: Union[str, Path]) -> None:
    from .io import write_json

    write_json(path, net.to_json())


def _check_input(net: Network, x: Sequence) -> None:
    if len(x) != net.input_dim:
        raise DimensionMismatchError(
            f"Input has length {len(x)}, network expects {net.input_dim}"
        )


def forward(net: Network, x: Sequence[RationalLike]) -> Vector:
    """Exact evaluation."""
    _check_input(net, x)
    h = as_vector(x)
    for index, layer in enumerate(net.layers):
        h = layer.preactivation(h)
        if net.activated(index):
            h = tuple(z if z > 0 else ZERO for z in h)
    return h


def activation_pattern(net: Network, x: Sequence[RationalLike]) -> Tuple[Tuple[bool, ...], ...]:
    """Per activated layer, which units have strictly positive preactivation."""
    _check_input(net, x)
    h = as_vector(x)
    masks = []
    for index, layer in enumerate(net.layers):
        h = layer.preactivation(h)
        if net.activated(index):
            mask = tuple(z > 0 for z in h)
            masks.append(mask)
            h = tuple(z if on else ZERO for z, on in zip(h, mask))
    return tuple(masks)


def exact_gradient(net: Network, x: Sequence[RationalLike]) -> Vector:
    """Gradient of a scalar network at ``x``, inactive branch on ties."""
    if net.output_dim != 1:
        raise DimensionMismatchError("Exact gradients need a scalar-output network")
    _check_input(net, x)
    h = as_vector(x)
    jac: List[Vector] = [
        tuple(Fraction(int(i == j)) for j in range(net.input_dim)) for i in range(net.input_dim)
    ]
    for index, layer in enumerate(net.layers):
        h = layer.preactivation(h)
        W = layer.weights
        jac = [
            tuple(dot(W.row(i), [jac[k][j] for k in range(W.cols)]) for j in range(net.input_dim))
            for i in range(W.rows)
        ]
        if net.activated(index):
            jac = [row if z > 0 else (ZERO,) * net.input_dim for row, z in zip(jac, h)]
            h = tuple(z if z > 0 else ZERO for z in h)
    return jac[0]


def forward_batch(net: Network, X: np.ndarray) -> np.ndarray:
    """Float64 evaluation of a batch ``X`` of shape (N, n0)."""
    H = np.atleast_2d(np.asarray(X, dtype=float))
    for index, (W, c) in enumerate(net.float_layers):
        H = H @ W.T + c
        if net.activated(index):
            H = np.maximum(H, 0.0)
    return H


def jacobian_batch(net: Network, X: np.ndarray) -> np.ndarray:
    """Jacobians of shape (N, n_d, n0) by masked products of the weight matrices."""
    H = np.atleast_2d(np.asarray(X, dtype=float))
    npoints = H.shape[0]
    J = np.broadcast_to(np.eye(net.input_dim), (npoints, net.input_dim, net.input_dim))
    for index, (W, c) in enumerate(net.float_layers):
        Z = H @ W.T + c
        J = np.einsum("ij,njk->nik", W, J)
        if net.activated(index):
            mask = Z > 0
            H = np.where(mask, Z, 0.0)
            J = J * mask[:, :, None]
        else:
            H = Z
    return J


def round_signature(values: np.ndarray, decimals: int = SIGNATURE_DECIMALS) -> JacobianSignature:
    rounded = np.round(np.asarray(values, dtype=float).ravel(), decimals) + 0.0
    return tuple(float(v) for v in rounded)


def jacobian(net: Network, x: Sequence[float], decimals: int = SIGNATURE_DECIMALS) -> JacobianSignature:
    """Rounded Jacobian at a single point."""
    _check_input(net, x)
    return round_signature(jacobian_batch(net, np.asarray([x], dtype=float))[0], decimals)


def build_invariant(n: int, lam: float, gam: float) -> Network:
    """
    ``f(x) = sum_i relu(W x)_i`` with ``W = lam I + gam 11^T``.

    Invariant under every permutation of the inputs.
    """
    if n < 2:
        raise ValidationError("Permutation-invariant networks need at least two inputs")
    lam_q, gam_q = exactify(lam), exactify(gam)
    hidden = ExactMatrix.from_rows(
        [[lam_q * int(i == j) + gam_q for j in range(n)] for i in range(n)], cols=n
    )
    output = ExactMatrix.from_rows([[1] * n], cols=n)
    return Network(
        (n, n, 1),
        (Layer(hidden, (ZERO,) * n), Layer(output, (ZERO,))),
        final_activation=False,
    )


def random_network(
    architecture: Sequence[int],
    seed: int,
    init: str = "glorot",
    final_activation: bool = False,
) -> Network:
    """
    Random fully connected network.

    ``glorot`` draws weights from U(-a, a) with ``a = sqrt(6 / (fan_in + fan_out))`` and
    zero biases; ``uniform`` draws weights and biases from U(-1/sqrt(fan_in), 1/sqrt(fan_in)).
    Draws are float64 and are exactified.
    """
    architecture = tuple(int(n) for n in architecture)
    if len(architecture) < 2 or any(n < 1 for n in architecture):
        raise ValidationError(f"Invalid architecture {list(architecture)}")
    rng = np.random.default_rng(seed)
    layers = []
    for fan_in, fan_out in zip(architecture[:-1], architecture[1:]):
        if init == "glorot":
            bound = math.sqrt(6.0 / (fan_in + fan_out))
            W = rng.uniform(-bound, bound, size=(fan_out, fan_in))
            c = np.zeros(fan_out)
        elif init == "uniform":
            bound = 1.0 / math.sqrt(fan_in)
            W = rng.uniform(-bound, bound, size=(fan_out, fan_in))
            c = rng.uniform(-bound, bound, size=fan_out)
        else:
            raise ValidationError(f"Unknown initialisation '{init}'")
        layers.append(
            Layer(
                ExactMatrix.from_rows([[exactify(float(w)) for w in row] for row in W], cols=fan_in),
                tuple(exactify(float(v)) for v in c),
            )
        )
    return Network(architecture, tuple(layers), final_activation)


def check_permutation_invariance(net: Network, points: Sequence[Sequence[RationalLike]]) -> bool:
    """Exact check of ``f(Px) == f(x)`` over all permutations at the given points."""
    if net.input_dim > 6:
        raise ValidationError("Exhaustive permutation checks are limited to six inputs")
    for x in points:
        x = as_vector(x)
        reference = forward(net, x)
        for perm in itertools.permutations(range(net.input_dim)):
            if forward(net, [x[p] for p in perm]) != reference:
                return False
    return True
