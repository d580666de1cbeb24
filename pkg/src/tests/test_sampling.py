"""
Tests for numerical region estimation
"""

import math

import numpy as np
import pytest
from pydantic import ValidationError as PydanticValidationError

from tropnet.exact import ExactMatrix
from tropnet.exceptions import ValidationError
from tropnet.network import Layer, Network, build_invariant
from tropnet.regions import network_regions
from tropnet.sampling import (
    SampleConfig,
    estimate_csv_row,
    estimate_regions,
    estimate_regions_fundamental,
    fundamental_bounds,
    multiplicity,
    random_invariant_network,
    ratio_experiment,
    sample_points,
)


@pytest.fixture
def sum_of_relus():
    """f(x) = max(0, x_1) + max(0, x_2)"""
    return build_invariant(2, 1.0, 0.0)


def relu_unit():
    return Network((1, 1), (Layer(ExactMatrix.from_rows([[1]]), (0,)),), final_activation=True)


@pytest.mark.parametrize(
    "sig, expected",
    [((1.0, 2.0, 3.0), 6), ((1.0, 1.0, 3.0), 3), ((2.0, 2.0, 2.0, 2.0), 1)],
)
def test_multiplicity(sig, expected):
    assert multiplicity(sig, len(sig)) == expected


def test_multiplicity_length_checked():
    with pytest.raises(ValidationError):
        multiplicity((1.0, 2.0), 3)


def test_single_relu_has_two_regions():
    estimate = estimate_regions(relu_unit(), SampleConfig(box_radius=5, npoints=1000, seed=0))
    assert estimate.count == 2
    assert estimate.npoints == 1000


def test_sum_of_relus(sum_of_relus):
    cfg = SampleConfig(box_radius=5, npoints=1000, seed=3)
    assert estimate_regions(sum_of_relus, cfg).count == 4
    reduced = estimate_regions_fundamental(sum_of_relus, cfg)
    assert reduced.count == 4
    assert reduced.npoints == 500
    flagged = cfg.model_copy(update={"restrict_to_fundamental": True})
    assert estimate_regions(sum_of_relus, flagged).count == 4


def test_fundamental_bounds_of_sum_of_relus(sum_of_relus):
    regions = network_regions(sum_of_relus)
    assert len(regions) == 4
    assert fundamental_bounds(regions, 2) == (2, 4)


@pytest.mark.parametrize("n", [2, 3])
def test_bounds_contain_exact_count(n):
    for seed in range(3):
        net = random_invariant_network(n, seed)
        regions = network_regions(net)
        lower, upper = fundamental_bounds(regions, n)
        assert lower <= len(regions) <= upper
        assert len(regions) == 2**n


def test_one_input_fundamental_is_plain():
    cfg = SampleConfig(box_radius=5, npoints=200, seed=1)
    assert estimate_regions_fundamental(relu_unit(), cfg).count == estimate_regions(relu_unit(), cfg).count


def test_same_seed_same_estimate():
    net = random_invariant_network(3, 4)
    cfg = SampleConfig(box_radius=10, npoints=300, seed=9)
    first, second = estimate_regions(net, cfg), estimate_regions(net, cfg)
    assert first.count == second.count
    assert first.signatures == second.signatures
    assert first.representatives == second.representatives


def test_grid_scheme():
    points = sample_points(SampleConfig(box_radius=2, npoints=100, scheme="grid"), 2)
    assert points.shape == (100, 2)
    assert [-2.0, -2.0] in points.tolist() and [2.0, 2.0] in points.tolist()
    assert sample_points(SampleConfig(npoints=5, scheme="grid"), 2).shape == (9, 2)
    uniform = sample_points(SampleConfig(box_radius=3, npoints=50, seed=2), 4)
    assert np.all(np.abs(uniform) <= 3)


def test_sample_config_validation():
    with pytest.raises(PydanticValidationError):
        SampleConfig(box_radius=0)
    with pytest.raises(PydanticValidationError):
        SampleConfig(scheme="sobol")
    cfg = SampleConfig.from_settings(npoints=42, box_radius=None)
    assert cfg.npoints == 42
    assert cfg.box_radius == 5.0


def test_csv_row(sum_of_relus):
    cfg = SampleConfig(npoints=100, seed=5)
    estimate = estimate_regions(sum_of_relus, cfg)
    row = estimate_csv_row(sum_of_relus, cfg, estimate, timing=False)
    assert row["architecture"] == "[2,2,1]"
    assert row["count"] == estimate.count
    assert row["elapsed_seconds"] == ""


def test_scalar_output_required():
    net = Network((1, 2), (Layer(ExactMatrix.from_rows([[1], [2]]), (0, 0)),))
    with pytest.raises(ValidationError):
        estimate_regions(net, SampleConfig())


def test_ratio_quick():
    (row,) = ratio_experiment([2], repetitions=3, seed=0)
    assert 0.9 <= row.estimate_ratio_mean <= 1.5


@pytest.mark.slow
def test_ratio_experiment():
    rows = ratio_experiment([2, 3], repetitions=10, seed=0)
    assert [row.n for row in rows] == [2, 3]
    for row in rows:
        assert 0.9 <= row.estimate_ratio_mean <= 1.5
        assert math.isfinite(row.time_ratio_mean)
