"""
Tests for exact linear region enumeration
"""

from fractions import Fraction

import numpy as np
import pytest

from tropnet.exceptions import ValidationError
from tropnet.network import forward, load_network, random_network, round_signature
from tropnet.polyhedra import intersect, is_empty
from tropnet.regions import (
    locate,
    network_regions,
    polynomial_regions,
    rational_regions,
    regions_report,
)
from tropnet.sampling import SampleConfig, estimate_regions
from tropnet.tropical import TropicalRationalMap


def rational_points(rng, n, count, scale=40):
    return [
        [Fraction(int(rng.integers(-scale, scale + 1)), int(rng.integers(1, 8))) for _ in range(n)]
        for _ in range(count)
    ]


@pytest.mark.parametrize("item, expected", [(1, 3), (2, 2), (3, 2), (4, 2)])
def test_polynomial_region_counts(worked_examples, item, expected):
    f = worked_examples[item]
    assert len(polynomial_regions(f)) == expected
    assert len(rational_regions(TropicalRationalMap.from_polynomial(f))) == expected


def test_first_example_regions(worked_examples):
    regions = polynomial_regions(worked_examples[1])
    assert [r.map.gradient for r in regions] == [(0,), (1,), (2,)]
    assert [r.bounded for r in regions] == [False, True, False]
    assert locate(regions, [Fraction(-1, 2)]) == [1]
    assert locate(regions, [Fraction(0)]) == [1, 2]


def test_quotient_by_itself_is_one_region(worked_examples):
    f = TropicalRationalMap(worked_examples[1], worked_examples[1])
    (region,) = rational_regions(f)
    assert region.map.gradient == (0,)
    assert region.map.intercept == 0
    assert len(region.pieces) == 3


def test_demo_regions_cover_and_agree(demo_model_path):
    net = load_network(demo_model_path)
    regions = network_regions(net)
    rng = np.random.default_rng(21)
    for x in rational_points(rng, 2, 200):
        hits = locate(regions, x)
        assert hits
        for k in hits:
            assert regions[k].map(x) == forward(net, x)[0]


def test_regions_with_equal_maps_do_not_touch(demo_model_path):
    regions = network_regions(load_network(demo_model_path))
    for a in range(len(regions)):
        for b in range(a + 1, len(regions)):
            if regions[a].map != regions[b].map:
                continue
            for P in regions[a].pieces:
                for Q in regions[b].pieces:
                    assert is_empty(intersect(P, Q))


def test_sampled_jacobians_match_region_gradients(demo_model_path):
    net = load_network(demo_model_path)
    gradients = {
        round_signature(np.array([float(g) for g in r.map.gradient]))
        for r in network_regions(net)
    }
    estimate = estimate_regions(net, SampleConfig(box_radius=20, npoints=2000, seed=1))
    assert set(estimate.signatures) <= gradients


def test_glorot_six_two_one_has_four_regions():
    for seed in range(5):
        assert len(network_regions(random_network([6, 2, 1], seed))) == 4


@pytest.mark.slow
@pytest.mark.parametrize(
    "arch, table_mean",
    [([6, 2, 1], 4.0), ([5, 3, 1], 7.4), ([4, 4, 1], 14.2), ([2, 6, 1], 11.84)],
)
def test_symbolic_table_means(arch, table_mean):
    counts = [len(network_regions(random_network(arch, seed))) for seed in range(25)]
    assert np.mean(counts) == pytest.approx(table_mean, rel=0.25)
    if arch == [6, 2, 1]:
        assert np.mean(counts) == 4.0


@pytest.mark.slow
def test_sampled_count_tracks_exact_count():
    for seed in range(10):
        net = random_network([2, 6, 1], seed)
        exact = len(network_regions(net))
        estimate = estimate_regions(net, SampleConfig(box_radius=20, npoints=5000, seed=seed))
        assert 0.5 * exact <= estimate.count <= 1.1 * exact


def test_output_index_required_for_vector_networks():
    net = random_network([2, 3, 2], seed=0)
    with pytest.raises(ValidationError):
        network_regions(net)
    with pytest.raises(ValidationError):
        network_regions(net, output_index=2)
    assert network_regions(net, output_index=1)


def test_report_layout(worked_examples):
    report = regions_report(polynomial_regions(worked_examples[2]))
    assert report["count"] == 2
    first = report["regions"][0]
    assert set(first) == {"map", "pieces", "bounded"}
    assert set(first["pieces"][0]) == {"A", "b"}
