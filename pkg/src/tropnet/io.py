"""
File formats for tropnet

Model, polynomial, matrix and point files are JSON; polynomials may also be given in the
line format ``coeff | e1 ... en``. Every reader raises ModelFileError with the offending
path and, where one exists, the line number.
"""

import csv
import json
import platform
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

from pydantic import BaseModel, Field

from .exact import ExactMatrix, Vector, as_vector
from .exceptions import ModelFileError, ValidationError
from .logging_config import log
from .tropical import TropicalPolynomial, TropicalRationalMap

PathLike = Union[str, Path]


def read_json(path: PathLike) -> Any:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ModelFileError(f"cannot read file: {e.strerror or e}", str(path)) from e
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise ModelFileError(f"invalid JSON: {e.msg} (column {e.colno})", str(path), e.lineno) from e


def write_json(path: PathLike, data: Any) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(data, indent=2) + "\n", encoding="utf-8")
    log.debug(f"Wrote {path}")
    return path


def write_csv(path: PathLike, rows: Sequence[Dict[str, Any]], fieldnames: Optional[List[str]] = None) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if fieldnames is None:
        fieldnames = list(rows[0].keys()) if rows else []
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.DictWriter(handle, fieldnames=fieldnames, lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow(row)
    log.debug(f"Wrote {len(rows)} rows to {path}")
    return path


def load_polynomial(path: PathLike) -> TropicalPolynomial:
    """Read a polynomial from JSON (``.json``) or from the line format (anything else)."""
    path = Path(path)
    if path.suffix.lower() != ".json":
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as e:
            raise ModelFileError(f"cannot read file: {e.strerror or e}", str(path)) from e
        return TropicalPolynomial.from_text(text, str(path))
    data = read_json(path)
    try:
        return TropicalPolynomial.from_json(data)
    except (KeyError, TypeError) as e:
        raise ModelFileError(f"expected monomials with 'coeff' and 'exps': {e}", str(path)) from e
    except ValidationError as e:
        raise ModelFileError(str(e), str(path)) from e


def load_rational_map(
    numerator_path: PathLike, denominator_path: Optional[PathLike] = None
) -> TropicalRationalMap:
    """
    A rational map from one file with ``numerator``/``denominator`` keys, from two
    polynomial files, or from a single polynomial (denominator ``0``).
    """
    if denominator_path is not None:
        p = load_polynomial(numerator_path)
        q = load_polynomial(denominator_path)
        try:
            return TropicalRationalMap(p, q)
        except ValidationError as e:
            raise ModelFileError(str(e), str(denominator_path)) from e
    path = Path(numerator_path)
    if path.suffix.lower() == ".json":
        data = read_json(path)
        if isinstance(data, dict) and "numerator" in data:
            try:
                return TropicalRationalMap.from_json(data)
            except (KeyError, TypeError) as e:
                raise ModelFileError(f"malformed rational map: {e}", str(path)) from e
            except ValidationError as e:
                raise ModelFileError(str(e), str(path)) from e
    return TropicalRationalMap.from_polynomial(load_polynomial(path))


def load_matrix(path: PathLike) -> ExactMatrix:
    """``{"A": [[...], ...]}`` or a bare list of rows; entries are numbers or "p/q" strings."""
    data = read_json(path)
    rows = data.get("A") if isinstance(data, dict) else data
    if not isinstance(rows, list) or not rows or not all(isinstance(r, list) for r in rows):
        raise ModelFileError("expected a non-empty list of rows under 'A'", str(path))
    try:
        return ExactMatrix.from_rows(rows)
    except ValidationError as e:
        raise ModelFileError(str(e), str(path)) from e


def load_point(path: PathLike) -> Vector:
    """``{"x": [...]}`` or a bare list."""
    data = read_json(path)
    values = data.get("x") if isinstance(data, dict) else data
    if not isinstance(values, list) or not values:
        raise ModelFileError("expected a non-empty list under 'x'", str(path))
    try:
        return as_vector(values)
    except ValidationError as e:
        raise ModelFileError(str(e), str(path)) from e


def detect_kind(path: PathLike) -> str:
    """Classify a JSON input as ``model``, ``matrix``, ``rational`` or ``polynomial``."""
    path = Path(path)
    if path.suffix.lower() != ".json":
        return "polynomial"
    data = read_json(path)
    if isinstance(data, dict):
        if "layers" in data:
            return "model"
        if "A" in data:
            return "matrix"
        if "numerator" in data:
            return "rational"
        if "monomials" in data:
            return "polynomial"
    if isinstance(data, list) and data and isinstance(data[0], list):
        return "matrix"
    if isinstance(data, list) and data and isinstance(data[0], dict):
        return "polynomial"
    raise ModelFileError("cannot tell whether this is a model, matrix or polynomial", str(path))


def _package_version() -> str:
    from . import __version__

    return __version__


class RunManifest(BaseModel):
    """Record written next to the results of every command"""

    command: str
    arguments: Dict[str, Any] = Field(default_factory=dict)
    config: Dict[str, Any] = Field(default_factory=dict)
    seed: int
    version: str = Field(default_factory=_package_version)
    python: str = Field(default_factory=platform.python_version)
    started_at: str = Field(default_factory=lambda: datetime.now(timezone.utc).isoformat())
    elapsed_seconds: float = 0.0
    outputs: List[str] = Field(default_factory=list)


def write_manifest(out_dir: PathLike, manifest: RunManifest) -> Path:
    return write_json(Path(out_dir) / "manifest.json", manifest.model_dump(mode="json"))
