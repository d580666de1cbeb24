"""
Shared fixtures for the tropnet test suite
"""

from fractions import Fraction
from pathlib import Path

import pytest

import tropnet
from tropnet.config import settings
from tropnet.logging_config import setup_logging
from tropnet.tropical import TropicalPolynomial

DATA_DIR = Path(tropnet.__file__).parent / "data"


def _univariate(coeffs, exps) -> TropicalPolynomial:
    return TropicalPolynomial([(Fraction(c), [Fraction(e)]) for c, e in zip(coeffs, exps)])


@pytest.fixture(autouse=True)
def restore_settings():
    """CLI runs mutate the global settings; put them back after every test."""
    snapshot = settings.model_copy(deep=True)
    yield
    settings.runtime = snapshot.runtime
    settings.hoffman = snapshot.hoffman
    settings.sampling = snapshot.sampling
    settings.experiment = snapshot.experiment
    setup_logging()


@pytest.fixture
def demo_model_path() -> Path:
    return DATA_DIR / "demo_2_6_1.json"


@pytest.fixture
def worked_examples():
    """The four one-variable polynomials with known regions."""
    return {
        1: _univariate([0, 1, 1], [0, 1, 2]),
        2: _univariate([1, 0], [1, 2]),
        3: _univariate([1, 1, 1], [0, 1, 2]),
        4: _univariate([1, 1, 2], [2, 3, 4]),
    }
