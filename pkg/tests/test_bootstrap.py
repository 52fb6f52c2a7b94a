import numpy as np
import pytest

from homecycle.bootstrap import draw_block_length, sample_path
from homecycle.rng import STREAM_PATH, household_stream
from tests.conftest import make_panel_csv
from homecycle.panel import load_panel


def test_block_length_moments(rng):
    draws = np.array([draw_block_length(rng) for _ in range(100_000)])
    assert draws.min() == 1
    assert 9.8 <= draws.mean() <= 10.2
    assert np.mean(draws == 1) == pytest.approx(0.1, abs=0.005)


def test_path_length_and_block_structure(bundled_panel, rng):
    for _ in range(50):
        path = sample_path(bundled_panel, rng=rng)
        assert len(path) == 75
        assert path.block_starts[0] == 0
        # within a block: same country, strictly consecutive source years
        bounds = list(path.block_starts) + [len(path)]
        for lo, hi in zip(bounds[:-1], bounds[1:]):
            assert len(set(path.country_idx[lo:hi].tolist())) == 1
            np.testing.assert_array_equal(np.diff(path.source_years[lo:hi]), 1)


def test_path_rows_exist_in_panel(bundled_panel, rng):
    path = sample_path(bundled_panel, rng=rng)
    for c, y in zip(path.country_idx, path.source_years):
        series = bundled_panel.countries[c]
        assert series.first_year <= y <= series.last_year


def test_uniform_country_share(tmp_path):
    csv = make_panel_csv(tmp_path / "p.csv", ["AAA", "BBB"], start=1950, years=60)
    panel = load_panel(csv)
    counts = np.zeros(2)
    for h in range(10_000):
        g = household_stream(99, h, STREAM_PATH)
        path = sample_path(panel, rng=g)
        counts += np.bincount(path.country_idx, minlength=2)
    share = counts / counts.sum()
    assert 0.48 <= share[0] <= 0.52


def test_identical_seed_identical_path(bundled_panel):
    a = sample_path(bundled_panel, rng=household_stream(7, 42, STREAM_PATH))
    b = sample_path(bundled_panel, rng=household_stream(7, 42, STREAM_PATH))
    np.testing.assert_array_equal(a.row_indices, b.row_indices)
    np.testing.assert_array_equal(a.block_starts, b.block_starts)


def test_requires_explicit_rng(bundled_panel):
    with pytest.raises(ValueError):
        sample_path(bundled_panel)


def test_path_debug_dump(bundled_panel, rng, tmp_path):
    from homecycle.bootstrap import path_to_csv

    path = sample_path(bundled_panel, rng=rng)
    out = tmp_path / "path.csv"
    path_to_csv(path, bundled_panel, out)
    lines = out.read_text().splitlines()
    assert len(lines) == 76
    assert lines[0].startswith("block_start,country,source_year")
