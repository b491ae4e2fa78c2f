import numpy as np
import pytest

from core.errors import DataError
from core.records import Direction
from metrics.profile import annual_totals, direction_counts, ffe_summary, log_histogram


def test_summary_of_single_record(make_record):
    summary = ffe_summary([make_record(ffe=2.0)])
    assert summary.count == 1
    assert summary.std == 0.0
    assert summary.mean == summary.min == summary.median == summary.p75 == summary.max == 2.0


def test_summary_hand_computed(make_record):
    summary = ffe_summary([make_record(ffe=v) for v in (1.0, 1.0, 2.0, 4.0)])
    assert summary.mean == 2.0
    assert summary.median == 1.5
    assert summary.p75 == 2.5
    assert summary.std == pytest.approx(2 ** 0.5, abs=1e-4)
    assert (summary.min, summary.max) == (1.0, 4.0)


def test_summary_of_equal_values(make_record):
    summary = ffe_summary([make_record(ffe=3.0)] * 5)
    assert summary.std == 0.0
    assert summary.min == summary.max == 3.0


def test_summary_needs_records():
    with pytest.raises(DataError):
        ffe_summary([])


def test_annual_totals_by_year_and_direction(make_record):
    records = [
        make_record(year=2020, ffe=1.5),
        make_record(year=2019, ffe=2.0, direction=Direction.EXPORT),
        make_record(year=2019, ffe=4.0),
        make_record(year=2019, ffe=0.5),
        make_record(year=2020, ffe=3.0, direction=Direction.EXPORT),
    ]
    totals = annual_totals(records)
    assert [(r.year, r.direction, r.total_ffe) for r in totals.rows] == [
        (2019, Direction.IMPORT, 4.5),
        (2019, Direction.EXPORT, 2.0),
        (2020, Direction.IMPORT, 1.5),
        (2020, Direction.EXPORT, 3.0),
    ]
    assert totals.grand_total == 11.0
    assert totals.by_direction(Direction.EXPORT) == 5.0


def test_annual_totals_of_single_record(make_record):
    totals = annual_totals([make_record(ffe=7.25)])
    assert len(totals.rows) == 1
    assert totals.rows[0].total_ffe == 7.25


def test_histogram_boundary_value_goes_to_upper_bin():
    spec = log_histogram([1.0, 10.0, 100.0], 2)
    assert spec.edges == pytest.approx([1.0, 10.0, 100.0])
    assert spec.counts == [1, 2]


def test_histogram_of_identical_values():
    spec = log_histogram([5.0, 5.0, 5.0], 3)
    assert sum(spec.counts) == 3
    assert sorted(spec.counts) == [0, 0, 3]
    assert spec.edges[0] < 5.0 < spec.edges[-1]


def test_histogram_conserves_counts():
    values = np.random.default_rng(3).lognormal(0.0, 1.2, size=2000)
    spec = log_histogram(values, 12)
    assert sum(spec.counts) == 2000
    assert len(spec.bins) == 12
    assert spec.edges == sorted(spec.edges)


@pytest.mark.parametrize("values, bins", [([], 3), ([1.0, 0.0], 3), ([1.0, -2.0], 3), ([1.0], 0)])
def test_histogram_rejects_bad_input(values, bins):
    with pytest.raises(DataError):
        log_histogram(values, bins)


def test_direction_counts(make_record):
    records = [make_record(), make_record(), make_record(direction=Direction.EXPORT)]
    assert direction_counts(records) == {Direction.IMPORT: 2, Direction.EXPORT: 1}
    assert direction_counts(records[:2]) == {Direction.IMPORT: 2}


def test_summary_ignores_record_order(make_record):
    rng = np.random.default_rng(400)
    values = rng.lognormal(0.0, 1.5, size=400)
    expected = ffe_summary([make_record(ffe=float(v)) for v in values])
    for _ in range(20):
        shuffled = rng.permutation(values)
        assert ffe_summary([make_record(ffe=float(v)) for v in shuffled]) == expected
    assert expected.std == pytest.approx(float(np.std(values, ddof=1)), rel=1e-12)


def test_histogram_edges_hit_data_range_exactly():
    rng = np.random.default_rng(11)
    for _ in range(200):
        values = rng.lognormal(0.0, 2.0, size=int(rng.integers(2, 60)))
        if values.min() == values.max():
            continue
        spec = log_histogram(values, int(rng.integers(1, 40)))
        assert spec.edges[0] == float(values.min())
        assert spec.edges[-1] == float(values.max())
