"""
Synthetic shipment generation for tests, demos and pipeline round trips

A target lists cells, one per (year, direction), each with a total FFE, a
record count and a share map per structural dimension. Two modes:

- exact: the aggregated masses of every dimension equal the target masses.
  Each dimension's masses are laid end to end on [0, total] in exact
  rational arithmetic (ascending mass, largest last); the union of all cut
  points splits [0, total] into segments, one record per segment. Segments
  are halved, largest first, until the cell's record count is reached.
  Only marginals are reproduced; joint structure between dimensions is an
  artefact of the layout.
- sampled: categories are drawn independently from the share maps and FFE
  sizes from a log-normal, scaled so the cell sums to its total.

Both modes use numpy's PCG64 generator seeded with the target seed, walking
the cells in (year, direction) order.
"""

import heapq
import json
import math
from bisect import bisect_left
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Tuple

import numpy as np

from core.errors import ConfigError, DataError, InfeasibleTargetError
from core.records import STRUCTURAL_DIMENSIONS, DimensionKey, Direction, ShipmentRecord
from ingest.normalize import normalize_text
from utils.logging_config import get_logger

logger = get_logger(__name__)

SYNTH_MODES = ("exact", "sampled")
UNSPECIFIED = "UNSPECIFIED"
SHARE_SUM_TOLERANCE = 1e-9
DEFAULT_SIZE_MU = 0.0
DEFAULT_SIZE_SIGMA = 0.9

# key prefix in target files -> dimension
TARGET_KEYS = {
    "route": DimensionKey.ROUTE,
    "origin": DimensionKey.ORIGIN_NODE,
    "destination": DimensionKey.DESTINATION_NODE,
    "industry": DimensionKey.INDUSTRY,
}


@dataclass(frozen=True)
class SynthCell:
    year: int
    direction: Direction
    total: Fraction
    record_count: int
    # dimension -> category -> exact mass; each map sums to total
    masses: Mapping[DimensionKey, Mapping[str, Fraction]] = field(default_factory=dict)

    @property
    def total_ffe(self) -> float:
        return float(self.total)

    def shares(self, dimension: DimensionKey) -> Dict[str, float]:
        return {c: float(m / self.total) for c, m in self.masses[dimension].items()}


@dataclass(frozen=True)
class SynthTarget:
    cells: Tuple[SynthCell, ...]
    seed: int = 0
    size_mu: float = DEFAULT_SIZE_MU
    size_sigma: float = DEFAULT_SIZE_SIGMA

    def __post_init__(self):
        if not self.cells:
            raise ConfigError("A synthetic target needs at least one cell")
        keys = [(c.year, c.direction) for c in self.cells]
        if len(set(keys)) != len(keys):
            raise ConfigError("A synthetic target lists the same (year, direction) cell twice")
        if not self.size_sigma > 0:
            raise ConfigError(f"size_sigma must be > 0, got {self.size_sigma}")
        ordered = tuple(sorted(self.cells, key=lambda c: (c.year, c.direction is Direction.EXPORT)))
        object.__setattr__(self, "cells", ordered)


def _category_token(raw: Any) -> str:
    token = normalize_text(str(raw)) if raw is not None else None
    if token is None:
        raise ConfigError(f"Synthetic category name {raw!r} is empty or null-like")
    return token


def _weights(raw: Mapping[str, Any], label: str, as_shares: bool) -> Dict[str, Fraction]:
    if not isinstance(raw, Mapping) or not raw:
        raise ConfigError(f"{label} must be a non-empty object of category -> value")
    weights: Dict[str, Fraction] = {}
    for name, value in raw.items():
        if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value) or value < 0:
            raise DataError(f"{label}[{name!r}] must be a finite non-negative number")
        token = _category_token(name)
        if token in weights:
            raise ConfigError(f"{label} lists category {token} twice after normalization")
        if value > 0:
            weights[token] = Fraction(value)
    if not weights:
        raise DataError(f"{label} has no positive entry")
    total = float(sum(weights.values()))
    if as_shares and abs(total - 1.0) > SHARE_SUM_TOLERANCE:
        raise DataError(f"{label} must sum to 1 (got {total!r})")
    return weights


def make_cell(year: int, direction: Direction, record_count: int,
              weights: Mapping[DimensionKey, Mapping[str, Any]],
              total_ffe: Optional[float] = None) -> SynthCell:
    """
    Build a cell from per-dimension weights (shares or masses). Each map is
    rescaled exactly onto the cell total; without total_ffe the total is the
    sum of the first given map. Missing dimensions get one UNSPECIFIED
    category.
    """
    if total_ffe is None:
        first = next((weights[d] for d in STRUCTURAL_DIMENSIONS if d in weights), None)
        if first is None:
            raise ConfigError(f"Cell {year}/{direction.value} needs total_ffe or a masses map")
        total = sum((Fraction(v) for v in first.values()), Fraction(0))
    else:
        if not (math.isfinite(total_ffe) and total_ffe > 0):
            raise DataError(f"Cell {year}/{direction.value}: total_ffe must be > 0, got {total_ffe}")
        total = Fraction(total_ffe)

    masses = {}
    for dimension in STRUCTURAL_DIMENSIONS:
        w = {c: Fraction(v) for c, v in (weights.get(dimension) or {UNSPECIFIED: 1}).items() if v > 0}
        w_sum = sum(w.values(), Fraction(0))
        masses[dimension] = {c: total * v / w_sum for c, v in sorted(w.items())}

    if record_count < 1:
        raise InfeasibleTargetError(f"Cell {year}/{direction.value}: record_count must be >= 1, got {record_count}")
    largest = max(len(m) for m in masses.values())
    if record_count < largest:
        raise InfeasibleTargetError(
            f"Cell {year}/{direction.value}: record_count {record_count} is below its {largest} categories"
        )
    return SynthCell(year=int(year), direction=direction, total=total, record_count=int(record_count), masses=masses)


def target_from_dict(data: Mapping[str, Any]) -> SynthTarget:
    if not isinstance(data, Mapping) or not isinstance(data.get("cells"), list):
        raise ConfigError("A synthetic target needs a 'cells' list")
    cells = []
    for index, raw in enumerate(data["cells"]):
        label = f"cells[{index}]"
        try:
            year = int(raw["year"])
            record_count = int(raw["record_count"])
        except (KeyError, TypeError, ValueError) as e:
            raise ConfigError(f"{label} needs integer 'year' and 'record_count': {e}")
        direction = Direction.parse(str(raw.get("direction", "")))
        if direction is None:
            raise ConfigError(f"{label}: direction must be IMPORT or EXPORT, got {raw.get('direction')!r}")

        weights = {}
        for prefix, dimension in TARGET_KEYS.items():
            shares, masses = raw.get(f"{prefix}_shares"), raw.get(f"{prefix}_masses")
            if shares is not None and masses is not None:
                raise ConfigError(f"{label} gives both {prefix}_shares and {prefix}_masses")
            if shares is not None:
                weights[dimension] = _weights(shares, f"{label}.{prefix}_shares", as_shares=True)
            elif masses is not None:
                weights[dimension] = _weights(masses, f"{label}.{prefix}_masses", as_shares=False)

        total_ffe = raw.get("total_ffe")
        cells.append(make_cell(year, direction, record_count, weights,
                               float(total_ffe) if total_ffe is not None else None))

    try:
        return SynthTarget(
            cells=tuple(cells),
            seed=int(data.get("seed", 0)),
            size_mu=float(data.get("size_mu", DEFAULT_SIZE_MU)),
            size_sigma=float(data.get("size_sigma", DEFAULT_SIZE_SIGMA)),
        )
    except (TypeError, ValueError) as e:
        raise ConfigError(f"Invalid synthetic target settings: {e}")


def load_synth_target(path: Path, seed: Optional[int] = None) -> SynthTarget:
    """Read a JSON target file; seed, when given, replaces the file's seed"""
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
    except FileNotFoundError:
        raise ConfigError(f"Synthetic target file not found: {path}")
    except json.JSONDecodeError as e:
        raise ConfigError(f"Synthetic target {path} is not valid JSON: {e}")
    target = target_from_dict(data)
    if seed is not None:
        target = SynthTarget(cells=target.cells, seed=seed, size_mu=target.size_mu, size_sigma=target.size_sigma)
    logger.info(f"Loaded synthetic target {path} ({len(target.cells)} cells, seed {target.seed})")
    return target


def _cut_points(masses: Mapping[str, Fraction]) -> Tuple[List[Fraction], List[str]]:
    ordered = sorted(masses.items(), key=lambda item: (item[1], item[0]))
    ends, categories, position = [], [], Fraction(0)
    for category, mass in ordered:
        position += mass
        ends.append(position)
        categories.append(category)
    return ends, categories


def _exact_segments(cell: SynthCell) -> List[Tuple[Fraction, Tuple[str, ...]]]:
    layouts = [_cut_points(cell.masses[d]) for d in STRUCTURAL_DIMENSIONS]
    points = sorted({Fraction(0)} | {p for ends, _ in layouts for p in ends})
    segments = []
    for lo, hi in zip(points, points[1:]):
        labels = tuple(categories[bisect_left(ends, hi)] for ends, categories in layouts)
        segments.append((hi - lo, labels))

    if cell.record_count < len(segments):
        raise InfeasibleTargetError(
            f"Cell {cell.year}/{cell.direction.value} needs at least {len(segments)} records "
            f"for an exact layout, record_count is {cell.record_count}"
        )

    heap = [(-length, seq, length, labels) for seq, (length, labels) in enumerate(segments)]
    heapq.heapify(heap)
    seq = len(heap)
    while len(heap) < cell.record_count:
        _, _, length, labels = heapq.heappop(heap)
        half = length / 2
        heapq.heappush(heap, (-half, seq, half, labels))
        heapq.heappush(heap, (-half, seq + 1, half, labels))
        seq += 2
    return [(length, labels) for _, _, length, labels in sorted(heap, key=lambda e: e[1])]


def _record(cell: SynthCell, labels: Tuple[str, ...], ffe: float) -> ShipmentRecord:
    route, origin, destination, industry = labels
    return ShipmentRecord(year=cell.year, direction=cell.direction, route=route, origin_node=origin,
                          destination_node=destination, industry=industry, ffe=ffe)


def generate_exact(target: SynthTarget) -> List[ShipmentRecord]:
    """Records whose per-dimension aggregated masses equal the target masses"""
    rng = np.random.default_rng(target.seed)
    records: List[ShipmentRecord] = []
    for cell in target.cells:
        segments = _exact_segments(cell)
        order = rng.permutation(len(segments))
        records.extend(_record(cell, segments[i][1], float(segments[i][0])) for i in order)
        logger.debug(f"Cell {cell.year}/{cell.direction.value}: {len(segments)} exact records")
    logger.info(f"Generated {len(records)} records (exact mode, seed {target.seed})")
    return records


def generate_sampled(target: SynthTarget) -> List[ShipmentRecord]:
    """Records with categories drawn from the share maps and log-normal FFE sizes"""
    rng = np.random.default_rng(target.seed)
    records: List[ShipmentRecord] = []
    for cell in target.cells:
        n = cell.record_count
        columns = []
        for dimension in STRUCTURAL_DIMENSIONS:
            shares = cell.shares(dimension)
            categories = list(shares)
            p = np.array([shares[c] for c in categories], dtype=float)
            picks = rng.choice(len(categories), size=n, p=p / p.sum())
            columns.append([categories[i] for i in picks])
        sizes = rng.lognormal(mean=target.size_mu, sigma=target.size_sigma, size=n)
        sizes = sizes * (cell.total_ffe / math.fsum(sizes.tolist()))
        records.extend(_record(cell, labels, float(ffe)) for *labels, ffe in zip(*columns, sizes))
    logger.info(f"Generated {len(records)} records (sampled mode, seed {target.seed})")
    return records


def generate(target: SynthTarget, mode: str = "exact") -> List[ShipmentRecord]:
    if mode == "exact":
        return generate_exact(target)
    if mode == "sampled":
        return generate_sampled(target)
    raise ConfigError(f"Unknown synth mode '{mode}' (expected one of {', '.join(SYNTH_MODES)})")
