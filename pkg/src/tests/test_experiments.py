"""Tests for the experiment harness"""

import pytest

from tropnet import experiments
from tropnet.config import settings
from tropnet.exceptions import ValidationError
from tropnet.experiments import (
    EXPERIMENTS,
    _hoffman_trial,
    hoffman_tables,
    monomials_regions,
    parse_architectures,
    pruning_rate,
    run_experiment,
    width_depth,
)
from tropnet.hoffman import hoffman_tropical
from tropnet.tropical import random_rational_map


@pytest.mark.parametrize(
    "text, expected",
    [
        ("[6,2,1]", [[6, 2, 1]]),
        ("[6,2,1],[5,3,1]", [[6, 2, 1], [5, 3, 1]]),
        ("[[6,2,1],[5,3,1]]", [[6, 2, 1], [5, 3, 1]]),
    ],
)
def test_parse_architectures(text, expected):
    assert parse_architectures(text) == expected


@pytest.mark.parametrize("text", ["abc", "[1]", "[0,1]", "[]", "[[2,1],[x]]"])
def test_parse_architectures_rejects(text):
    with pytest.raises(ValidationError):
        parse_architectures(text)


def test_width_depth_rows():
    report = width_depth(dims=(2,), widths=(2,), trials=2, seed=0, threads=1)
    assert report.name == "width-depth"
    assert len(report.rows) == 4
    assert set(report.summary) == {"[2,2,1]", "[2,2,2,1]"}
    for row in report.rows:
        assert row["monomials"] == row["numerator"] + row["denominator"] >= 2


def test_pruning_rate_bounds():
    report = pruning_rate(widths=(2, 3), trials=3, seed=0, threads=1)
    assert len(report.rows) == 6
    for row in report.rows:
        assert 1 <= row["irredundant"] <= row["monomials"]
        assert 0.0 <= row["pruning_rate"] < 1.0


def test_monomials_regions():
    report = monomials_regions(dims=(2,), totals=(2, 4), trials=2, seed=0, threads=1)
    assert [row["monomials"] for row in report.rows] == [2, 2, 4, 4]
    # one monomial on each side is a single affine map
    assert all(row["regions"] == 1 for row in report.rows[:2])
    assert all(row["regions"] >= 1 for row in report.rows)
    assert set(report.summary) == {"n=2"}
    assert set(report.summary["n=2"]) == {"2", "4"}


def test_monomials_regions_over_several_dimensions():
    report = monomials_regions(dims=(2, 4), totals=(2,), trials=2, seed=0, threads=1)
    assert [row["n"] for row in report.rows] == [2, 2, 4, 4]
    assert report.summary == {"n=2": {"2": 1.0}, "n=4": {"2": 1.0}}


def test_monomials_regions_needs_two_monomials():
    with pytest.raises(ValidationError):
        monomials_regions(totals=(1,), trials=1)


def test_run_experiment_drops_unused_options():
    first = run_experiment("pruning-rate", widths=(2,), trials=2, seed=3, npoints=50, archs=None)
    second = run_experiment("pruning-rate", widths=(2,), trials=2, seed=3)
    assert first.rows == second.rows
    assert first.to_json()["experiment"] == "pruning-rate"


def test_registry_names():
    assert set(EXPERIMENTS) == {
        "table-symbolic-vs-numerical",
        "width-depth",
        "pruning-rate",
        "ratio-estimates",
        "hoffman-tables",
        "monomials-regions",
    }
    with pytest.raises(ValidationError):
        run_experiment("nonsense")


def test_hoffman_tasks_carry_the_subset_cap(monkeypatch):
    captured = []

    def fake_map(fn, tasks, threads=None):
        captured.extend(tasks)
        return []

    settings.hoffman.subset_cap = 7
    monkeypatch.setattr(experiments, "parallel_map", fake_map)
    hoffman_tables(shapes=((2, 2, 2),), instances=3, iterations=5, seed=0)
    assert len(captured) == 3
    assert all(task[-1] == 7 for task in captured)


def test_hoffman_trial_ignores_worker_settings():
    settings.hoffman.subset_cap = 1
    row = _hoffman_trial((2, 3, 2, 0, 20, 16))
    expected = hoffman_tropical(random_rational_map(2, 2, 3, 0), cap=16, threads=1)
    assert expected.exact is not None
    assert row["H_exact"] == float(expected.exact.value)
    assert row["H_lower"] <= row["H_exact"] <= row["H_upper"] + 1e-9
