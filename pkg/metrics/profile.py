"""
Descriptive profile of the shipment records: FFE summary, annual totals
by direction, log-scale histogram data and shipment counts per direction
"""

import math
from collections import Counter, defaultdict
from dataclasses import dataclass
from typing import Dict, List, Sequence

import numpy as np

from core.errors import DataError
from core.records import Direction, ShipmentRecord
from utils.logging_config import get_logger

logger = get_logger(__name__)


@dataclass(frozen=True)
class FfeSummary:
    count: int
    mean: float
    std: float
    min: float
    median: float
    p75: float
    max: float


def _require_records(records: Sequence[ShipmentRecord], what: str):
    if not records:
        raise DataError(f"{what} needs at least one record")


def ffe_summary(records: Sequence[ShipmentRecord]) -> FfeSummary:
    """Count, mean, sample std (n - 1), min, max and linear-interpolation quantiles"""
    _require_records(records, "FFE summary")
    # sorted so every reduction is independent of record order
    values = np.sort(np.array([r.ffe for r in records], dtype=float))
    mean = math.fsum(values.tolist()) / values.size
    std = 0.0
    if values.size > 1:
        std = math.sqrt(math.fsum(((values - mean) ** 2).tolist()) / (values.size - 1))
    median, p75 = np.quantile(values, [0.5, 0.75], method="linear")
    return FfeSummary(
        count=int(values.size),
        mean=mean,
        std=std,
        min=float(values.min()),
        median=float(median),
        p75=float(p75),
        max=float(values.max()),
    )


@dataclass(frozen=True)
class AnnualTotalRow:
    year: int
    direction: Direction
    total_ffe: float


@dataclass(frozen=True)
class AnnualTotals:
    rows: List[AnnualTotalRow]

    @property
    def grand_total(self) -> float:
        return math.fsum(row.total_ffe for row in self.rows)

    def by_direction(self, direction: Direction) -> float:
        return math.fsum(row.total_ffe for row in self.rows if row.direction is direction)


_DIRECTION_ORDER = {Direction.IMPORT: 0, Direction.EXPORT: 1}


def annual_totals(records: Sequence[ShipmentRecord]) -> AnnualTotals:
    _require_records(records, "Annual totals")
    grouped: Dict[tuple, List[float]] = defaultdict(list)
    for record in records:
        grouped[(record.year, record.direction)].append(record.ffe)
    keys = sorted(grouped, key=lambda k: (k[0], _DIRECTION_ORDER[k[1]]))
    return AnnualTotals(rows=[AnnualTotalRow(year, direction, math.fsum(grouped[(year, direction)]))
                              for year, direction in keys])


@dataclass(frozen=True)
class HistogramSpec:
    edges: List[float]
    counts: List[int]

    @property
    def bins(self):
        return list(zip(self.edges[:-1], self.edges[1:], self.counts))


def log_histogram(ffe_values: Sequence[float], bin_count: int) -> HistogramSpec:
    """
    Equal-width bins in log10(FFE) spanning [min, max]. Bins are half-open
    [lo, hi) except the last, which also holds the maximum. A zero-width
    range is widened by 0.5 decade on each side. Edges are returned in FFE
    units.
    """
    if bin_count < 1:
        raise DataError(f"bin_count must be >= 1, got {bin_count}")
    values = np.asarray(ffe_values, dtype=float)
    if values.size == 0:
        raise DataError("log histogram needs at least one value")
    if not np.all(np.isfinite(values)) or np.any(values <= 0):
        raise DataError("log histogram needs strictly positive FFE values")
    counts, log_edges = np.histogram(np.log10(values), bins=bin_count)
    edges = np.power(10.0, log_edges)
    low, high = float(values.min()), float(values.max())
    if low < high:
        edges[0], edges[-1] = low, high
    return HistogramSpec(edges=edges.tolist(), counts=[int(c) for c in counts])


def direction_counts(records: Sequence[ShipmentRecord]) -> Dict[Direction, int]:
    """Number of shipment records per direction, imports first"""
    counts = Counter(r.direction for r in records)
    return {d: counts[d] for d in (Direction.IMPORT, Direction.EXPORT) if counts[d]}
