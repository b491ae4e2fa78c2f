import pytest

from core.errors import DataError, MissingBaseYearError
from core.records import DimensionKey, Direction, RecordFilter, Scope
from metrics.distribution import WeightedDistribution
from metrics.temporal import drift_series, yearly_distributions


def routes(**masses):
    return WeightedDistribution.from_masses(DimensionKey.ROUTE, masses)


@pytest.fixture
def four_year_records(make_record):
    records = []
    for year, masses in {
        2019: {"W1": 60.0, "W3": 40.0},
        2020: {"W1": 40.0, "W3": 60.0},
        2021: {"W1": 50.0, "W3": 30.0, "W5": 20.0},
        2022: {"W1": 55.0, "W3": 25.0, "W5": 20.0},
    }.items():
        for route, mass in masses.items():
            records.append(make_record(year=year, route=route, ffe=mass / 2))
            records.append(make_record(year=year, route=route, ffe=mass / 2, direction=Direction.EXPORT))
    return records


def test_yearly_distributions_are_keyed_by_year(four_year_records):
    yearly = yearly_distributions(four_year_records, DimensionKey.ROUTE)
    assert list(yearly) == [2019, 2020, 2021, 2022]
    assert yearly[2021].entries == {"W1": 50.0, "W3": 30.0, "W5": 20.0}


def test_single_year(make_record):
    yearly = yearly_distributions([make_record(year=2020), make_record(year=2020, route="W2")], DimensionKey.ROUTE)
    assert list(yearly) == [2020]


def test_yearly_distributions_respect_scope(four_year_records):
    yearly = yearly_distributions(four_year_records, DimensionKey.ROUTE, RecordFilter(Scope.EXPORT))
    assert yearly[2019].total == 50.0


def test_yearly_distributions_need_records(make_record):
    with pytest.raises(DataError):
        yearly_distributions([make_record()], DimensionKey.ROUTE, RecordFilter(Scope.EXPORT))


def test_base_year_drift_is_zero(four_year_records):
    report = drift_series(yearly_distributions(four_year_records, DimensionKey.ROUTE))
    assert report.base_year == 2019
    assert report.rows[0].jsd_vs_base == 0.0


def test_swapped_shares_drift():
    report = drift_series({2019: routes(A=0.6, B=0.4), 2020: routes(A=0.4, B=0.6)})
    assert report.rows[1].jsd_vs_base == pytest.approx(0.1704, abs=1e-4)


def test_drift_ignores_uniform_scaling():
    base = routes(A=5.0, B=3.0, C=2.0)
    later = routes(A=2.0, B=3.0, D=5.0)
    plain = drift_series({2019: base, 2020: later})
    scaled = drift_series({2019: base, 2020: routes(A=20.0, B=30.0, D=50.0)})
    assert scaled.rows[1].jsd_vs_base == pytest.approx(plain.rows[1].jsd_vs_base, abs=1e-12)
    assert scaled.rows[1].total_ffe == pytest.approx(10 * plain.rows[1].total_ffe)


def test_explicit_base_year(four_year_records):
    report = drift_series(yearly_distributions(four_year_records, DimensionKey.ROUTE), base_year=2021)
    drift = {row.year: row.jsd_vs_base for row in report.rows}
    assert drift[2021] == 0.0
    assert drift[2019] > 0.0


def test_missing_base_year(four_year_records):
    with pytest.raises(MissingBaseYearError):
        drift_series(yearly_distributions(four_year_records, DimensionKey.ROUTE), base_year=2018)


def test_drift_rows_carry_hhi_and_size(four_year_records):
    report = drift_series(yearly_distributions(four_year_records, DimensionKey.ROUTE))
    first = report.rows[0]
    assert (first.year, first.n, first.total_ffe) == (2019, 2, 100.0)
    assert first.hhi == pytest.approx(0.6 ** 2 + 0.4 ** 2)


def test_adjacent_year_persistence(four_year_records):
    report = drift_series(yearly_distributions(four_year_records, DimensionKey.ROUTE))
    pairs = [(a.year_from, a.year_to) for a in report.adjacent]
    assert pairs == [(2019, 2020), (2020, 2021), (2021, 2022)]
    # two routes only in the first pair
    assert not report.adjacent[0].spearman.defined
    assert report.adjacent[2].spearman.statistic == pytest.approx(1.0)


def test_drift_needs_distributions():
    with pytest.raises(DataError):
        drift_series({})


def test_identical_years_do_not_drift():
    yearly = {year: routes(W1=50.0, W2=30.0, W3=15.0, W5=5.0) for year in (2019, 2020, 2021, 2022)}
    report = drift_series(yearly)
    assert [row.jsd_vs_base for row in report.rows] == [0.0, 0.0, 0.0, 0.0]
    assert [a.spearman.statistic for a in report.adjacent] == [1.0, 1.0, 1.0]
    assert all(a.spearman.defined for a in report.adjacent)
