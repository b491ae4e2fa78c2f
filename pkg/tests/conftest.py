"""Shared fixtures for the flowstruct test suite"""

import csv
import logging

import pytest

from core.records import CANONICAL_COLUMNS, Direction, ShipmentRecord

# Route masses of the seven observed route categories, all directions
ROUTE_MASSES = {
    "W3": 90349.0,
    "W1": 84678.0,
    "W5": 24248.0,
    "W2": 22576.0,
    "W4": 10776.5,
    "X6": 4100.5,
    "UNKNOWN": 5.5,
}
ROUTE_TOTAL = 236733.5

# industry -> (import share, export share)
INDUSTRY_SHARES = {
    "FROZEN FISH & SEAFOOD": (0.0002, 0.5345),
    "AGRICULTURE & FORESTRY": (0.1593, 0.2072),
    "METAL IN SECONDARY FORM": (0.0183, 0.1175),
    "INDUSTRY NOT CLASSIFIED": (0.1634, 0.0960),
    "FOOD & BEVERAGE": (0.1384, 0.0098),
}


def _record(ffe=1.0, year=2019, direction=Direction.IMPORT, route="W1", origin_node="NINGBO",
            destination_node="NOUAKCHOTT", industry="FOOD & BEVERAGE", commodity=None):
    return ShipmentRecord(year=year, direction=direction, route=route, origin_node=origin_node,
                          destination_node=destination_node, industry=industry, ffe=ffe, commodity=commodity)


@pytest.fixture
def make_record():
    return _record


@pytest.fixture
def route_records():
    """One record per route carrying its full mass, directions alternating"""
    directions = [Direction.IMPORT, Direction.EXPORT]
    return [
        _record(ffe=mass, route=route, direction=directions[i % 2])
        for i, (route, mass) in enumerate(ROUTE_MASSES.items())
    ]


def canonical_row(year=2019, direction="IMPORT", route="W1", origin="NINGBO", destination="NOUAKCHOTT",
                  industry="FOOD & BEVERAGE", commodity="", ffe="1"):
    return dict(zip(CANONICAL_COLUMNS, (year, direction, route, origin, destination, industry, commodity, ffe)))


@pytest.fixture
def row():
    return canonical_row


@pytest.fixture
def write_csv(tmp_path):
    """Write rows (dicts) to a CSV file under tmp_path; header from the first row unless given"""
    def _write(name, rows, header=None, delimiter=","):
        path = tmp_path / name
        header = list(header or (rows[0].keys() if rows else CANONICAL_COLUMNS))
        with open(path, "w", encoding="utf-8", newline="") as f:
            writer = csv.DictWriter(f, fieldnames=header, delimiter=delimiter, lineterminator="\n")
            writer.writeheader()
            for r in rows:
                writer.writerow(r)
        return path
    return _write


@pytest.fixture
def route_csv(write_csv):
    directions = ["IMPORT", "EXPORT"]
    rows = [
        canonical_row(route=route, direction=directions[i % 2], ffe=repr(mass))
        for i, (route, mass) in enumerate(ROUTE_MASSES.items())
    ]
    return write_csv("routes.csv", rows)


@pytest.fixture(autouse=True)
def _isolate_environment(monkeypatch):
    monkeypatch.delenv("FLOWSTRUCT_CONFIG", raising=False)
    monkeypatch.delenv("SOURCE_DATE_EPOCH", raising=False)
    yield
    root = logging.getLogger()
    for handler in list(root.handlers):
        root.removeHandler(handler)
        handler.close()
