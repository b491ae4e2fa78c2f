import csv
import json
import math

import pytest
from jsonschema import Draft202012Validator

from core.config import AnalysisConfig, REPORT_SCHEMA_PATH
from core.errors import ConfigError, DataError
from core.records import DimensionKey, Direction, Scope
from generators.report_generator import (
    ANNUAL_FILE, HISTOGRAM_FILE, ReportBundle, ReportMetadata, asymmetry_table, concentration_table,
    emit_plot_data, format_cell, profile_tables, render, report_timestamp, share_table,
)
from metrics.concentration import concentration_summary
from metrics.distribution import WeightedDistribution, top_k
from metrics.divergence import RankCorrelation, asymmetry_report
from metrics.profile import annual_totals, direction_counts, ffe_summary, log_histogram

from conftest import ROUTE_MASSES


@pytest.fixture
def route_dist():
    return WeightedDistribution.from_masses(DimensionKey.ROUTE, ROUTE_MASSES)


def bundle(command="analyze"):
    metadata = ReportMetadata(command=command, config=AnalysisConfig().to_dict(), input_digest="0" * 64,
                              record_count=7, timestamp="2024-01-01T00:00:00Z")
    return ReportBundle(metadata)


@pytest.fixture
def route_bundle(route_dist):
    b = bundle()
    b.add("concentration", concentration_table([concentration_summary(route_dist)]))
    b.add("top_shares", share_table(DimensionKey.ROUTE, Scope.ALL, top_k(route_dist, route_dist.n)))
    return b


@pytest.fixture
def profile_bundle(make_record):
    records = [
        make_record(year=year, direction=direction, ffe=float(year - 2018) * (2 if direction is Direction.EXPORT else 1))
        for year in range(2019, 2023)
        for direction in (Direction.IMPORT, Direction.EXPORT)
    ]
    values = [r.ffe for r in records]
    b = bundle("profile")
    b.add("profile", *profile_tables(ffe_summary(records), annual_totals(records), direction_counts(records),
                                     log_histogram(values, 5)))
    return b


def schema_validator():
    with open(REPORT_SCHEMA_PATH, encoding="utf-8") as f:
        return Draft202012Validator(json.load(f))


@pytest.mark.parametrize("value, text", [
    (None, ""), (True, "yes"), (3, "3"), (math.nan, "n/a"), (0.29558, "0.2956"), (1.0, "1.0000"), ("W3", "W3"),
])
def test_format_cell(value, text):
    assert format_cell(value) == text


def test_markdown_share_table(route_bundle):
    text = render(route_bundle, "markdown").decode("utf-8")
    lines = text.splitlines()
    assert lines[0] == "# flowstruct analyze report"
    header = lines.index("## Route shares (All)")
    assert lines[header + 2] == "| Route | Total FFE | Share |"
    assert lines[header + 3] == "| --- | ---: | ---: |"
    assert lines[header + 4] == "| W3 | 90349.0000 | 0.3816 |"
    assert lines[header + 5] == "| W1 | 84678.0000 | 0.3577 |"


def test_empty_sections_are_omitted(route_bundle):
    route_bundle.add("asymmetry")
    data = json.loads(render(route_bundle, "json"))
    assert list(data["sections"]) == ["concentration", "top_shares"]


def test_rendering_is_byte_deterministic(route_bundle):
    for fmt in ("json", "csv", "markdown"):
        assert render(route_bundle, fmt) == render(route_bundle, fmt)


def test_json_keeps_full_precision(route_bundle, route_dist):
    data = json.loads(render(route_bundle, "json"))
    row = data["sections"]["concentration"]["route"]["rows"][0]
    summary = concentration_summary(route_dist)
    assert row["hhi"] == summary.hhi
    assert row["cr3"] == summary.cr[3]
    assert row["scope"] == "All"


def test_csv_blocks(route_bundle):
    text = render(route_bundle, "csv").decode("utf-8")
    assert text.startswith("# metadata\nkey,value\n")
    assert "\n# top_shares.route_all\nRoute,Total FFE,Share\nW3,90349.0000,0.3816\n" in text


def test_unsupported_format(route_bundle):
    with pytest.raises(ConfigError):
        render(route_bundle, "xlsx")


def test_undefined_statistics_become_null():
    p = WeightedDistribution.from_masses(DimensionKey.ROUTE, {"W1": 1.0})
    q = WeightedDistribution.from_masses(DimensionKey.ROUTE, {"W2": 1.0})
    report = asymmetry_report(p, q)
    assert report.spearman == RankCorrelation.undefined(2)
    b = bundle("asymmetry").add("asymmetry", asymmetry_table([report]))
    row = json.loads(render(b, "json"))["sections"]["asymmetry"]["imports_vs_exports"]["rows"][0]
    assert row["spearman_rho"] is None
    assert row["kendall_tau_method"] == "undefined"
    assert "| n/a |" in render(b, "markdown").decode("utf-8")


def test_json_matches_schema(route_bundle, profile_bundle):
    validator = schema_validator()
    for b in (route_bundle, profile_bundle):
        validator.validate(json.loads(render(b, "json")))


def test_report_timestamp_honours_source_date_epoch(monkeypatch):
    monkeypatch.setenv("SOURCE_DATE_EPOCH", "1577836800")
    assert report_timestamp() == "2020-01-01T00:00:00Z"
    monkeypatch.setenv("SOURCE_DATE_EPOCH", "soon")
    with pytest.raises(ConfigError):
        report_timestamp()


def test_plot_data_files(profile_bundle, tmp_path):
    paths = emit_plot_data(profile_bundle, tmp_path / "plots")
    assert [p.name for p in paths] == [HISTOGRAM_FILE, ANNUAL_FILE]
    with open(tmp_path / "plots" / ANNUAL_FILE, newline="", encoding="utf-8") as f:
        annual = list(csv.DictReader(f))
    assert len(annual) == 8
    assert list(annual[0]) == ["year", "direction", "total_ffe"]
    assert (annual[0]["year"], annual[0]["direction"]) == ("2019", "IMPORT")
    with open(tmp_path / "plots" / HISTOGRAM_FILE, newline="", encoding="utf-8") as f:
        histogram = list(csv.DictReader(f))
    assert len(histogram) == 5
    assert sum(int(r["count"]) for r in histogram) == 8


def test_plot_data_rerun_is_identical(profile_bundle, tmp_path):
    first = [p.read_bytes() for p in emit_plot_data(profile_bundle, tmp_path)]
    second = [p.read_bytes() for p in emit_plot_data(profile_bundle, tmp_path)]
    assert first == second


def test_plot_data_needs_profile(route_bundle, tmp_path):
    with pytest.raises(DataError):
        emit_plot_data(route_bundle, tmp_path)


def test_unknown_section_is_a_programming_error():
    with pytest.raises(ValueError):
        bundle().add("appendix")
