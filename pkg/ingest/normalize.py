"""
Field normalization, harmonization and filtering of raw shipment rows

Rows come from either the canonical layout (canonical column names, direction
in a column) or a direction-specific raw layout where the node columns
depend on the trade direction:

    IMPORT: port of loading     -> origin_node, port of discharge -> destination_node
    EXPORT: export loading port -> origin_node, place of delivery -> destination_node

Filtering never imputes, smooths or de-duplicates. Rejections are tallied,
not raised, and survivors keep their input order.
"""

import math
import re
from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, Optional, Tuple

from core.config import AnalysisConfig, ColumnMapping
from core.errors import NoRecordsError, SchemaError
from core.records import CandidateRecord, Direction, ShipmentRecord
from ingest.taxonomy import RouteTaxonomy, classify_route
from utils.logging_config import get_logger

logger = get_logger(__name__)

NULL_LIKE_TOKENS = frozenset({"", "NULL", "N/A", "NA", "-"})
UNKNOWN_ROUTE = "UNKNOWN"

REJECTION_REASONS = ("missing_field", "invalid_numeric", "nonpositive_ffe", "year_out_of_range")

# decimal point only; "1,5" and "1,000" are malformed, as are nan/inf
_DECIMAL_RE = re.compile(r"^[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?$")

_REQUIRED_FIELDS = ("year", "direction", "route", "origin_node", "destination_node", "industry", "ffe")


def normalize_text(raw: Optional[str]) -> Optional[str]:
    """Trim, collapse inner whitespace and uppercase; null-like values become None"""
    if raw is None:
        return None
    token = " ".join(str(raw).split()).upper()
    if token in NULL_LIKE_TOKENS:
        return None
    return token


def _parse_decimal(raw: Optional[str]) -> Tuple[Optional[float], bool]:
    """(value, invalid). Missing values are (None, False), malformed ones (None, True)."""
    token = normalize_text(raw)
    if token is None:
        return None, False
    if not _DECIMAL_RE.match(token):
        return None, True
    value = float(token)
    if not math.isfinite(value):
        return None, True
    return value, False


def _parse_year(raw: Optional[str]) -> Tuple[Optional[int], bool]:
    value, invalid = _parse_decimal(raw)
    if value is None:
        return None, invalid
    if not value.is_integer():
        return None, True
    return int(value), False


def _column(row: Mapping[str, str], name: str) -> Optional[str]:
    if name not in row:
        raise SchemaError(f"Source column '{name}' is missing")
    return row[name]


def required_columns(mapping: ColumnMapping, direction: Optional[Direction]) -> List[str]:
    """Header names a source file must provide for the given layout"""
    columns = [mapping.year, mapping.route, mapping.industry, mapping.ffe]
    if direction is None:
        columns += [mapping.direction, mapping.origin_node, mapping.destination_node]
    elif direction is Direction.IMPORT:
        columns += [mapping.import_loading, mapping.import_discharge]
    else:
        columns += [mapping.export_loading, mapping.export_delivery]
    return columns


def check_header(header: Iterable[str], mapping: ColumnMapping, direction: Optional[Direction]):
    present = set(header)
    missing = [c for c in required_columns(mapping, direction) if c not in present]
    if missing:
        raise SchemaError(f"Source columns missing from header: {', '.join(missing)}")


def harmonize(raw_row: Mapping[str, str], direction: Optional[Direction] = None,
              mapping: ColumnMapping = ColumnMapping()) -> CandidateRecord:
    """
    Map one raw row onto the canonical fields.

    With a direction the row is read in the raw layout of that direction;
    without one it is read in the canonical layout and carries its own
    Direction column.
    """
    if direction is None:
        row_direction_token = normalize_text(_column(raw_row, mapping.direction))
        row_direction = Direction.parse(row_direction_token)
        origin = _column(raw_row, mapping.origin_node)
        destination = _column(raw_row, mapping.destination_node)
    else:
        row_direction = direction
        if direction is Direction.IMPORT:
            origin = _column(raw_row, mapping.import_loading)
            destination = _column(raw_row, mapping.import_discharge)
        else:
            origin = _column(raw_row, mapping.export_loading)
            destination = _column(raw_row, mapping.export_delivery)

    year, year_invalid = _parse_year(_column(raw_row, mapping.year))
    ffe, ffe_invalid = _parse_decimal(_column(raw_row, mapping.ffe))
    invalid = tuple(name for name, bad in (("year", year_invalid), ("ffe", ffe_invalid)) if bad)

    return CandidateRecord(
        year=year,
        direction=row_direction,
        route=normalize_text(_column(raw_row, mapping.route)),
        origin_node=normalize_text(origin),
        destination_node=normalize_text(destination),
        industry=normalize_text(_column(raw_row, mapping.industry)),
        ffe=ffe,
        commodity=normalize_text(raw_row.get(mapping.commodity)),
        invalid_fields=invalid,
    )


@dataclass
class IngestReport:
    raw_count: int = 0
    accepted_count: int = 0
    rejected: Dict[str, int] = field(default_factory=lambda: {r: 0 for r in REJECTION_REASONS})
    duplicate_count: int = 0
    unknown_route_count: int = 0
    unknown_route_ffe: float = 0.0
    unclassified_route_codes: List[str] = field(default_factory=list)

    @property
    def rejected_count(self) -> int:
        return sum(self.rejected.values())

    def to_dict(self) -> Dict[str, object]:
        return {
            "raw_count": self.raw_count,
            "accepted_count": self.accepted_count,
            "rejected": dict(self.rejected),
            "duplicate_count": self.duplicate_count,
            "unknown_route_count": self.unknown_route_count,
            "unknown_route_ffe": self.unknown_route_ffe,
            "unclassified_route_codes": list(self.unclassified_route_codes),
        }


def _rejection_reason(candidate: CandidateRecord, config: AnalysisConfig) -> Optional[str]:
    invalid = set(candidate.invalid_fields)
    for name in _REQUIRED_FIELDS:
        if getattr(candidate, name) is None and name not in invalid:
            return "missing_field"
    if invalid:
        return "invalid_numeric"
    if candidate.ffe <= 0:
        return "nonpositive_ffe"
    if not config.year_min <= candidate.year <= config.year_max:
        return "year_out_of_range"
    return None


def validate_and_filter(candidates: Iterable[CandidateRecord], config: AnalysisConfig = AnalysisConfig(),
                        taxonomy: Optional[RouteTaxonomy] = None) -> Tuple[List[ShipmentRecord], IngestReport]:
    """Drop incomplete, malformed, zero-volume and out-of-range rows; keep duplicates and UNKNOWN routes"""
    report = IngestReport()
    records: List[ShipmentRecord] = []
    seen = set()
    unknown_ffe = []
    unclassified = Counter()

    for candidate in candidates:
        report.raw_count += 1
        reason = _rejection_reason(candidate, config)
        if reason is not None:
            report.rejected[reason] += 1
            continue

        record = ShipmentRecord(
            year=candidate.year,
            direction=candidate.direction,
            route=candidate.route,
            origin_node=candidate.origin_node,
            destination_node=candidate.destination_node,
            industry=candidate.industry,
            ffe=candidate.ffe,
            commodity=candidate.commodity,
        )
        key = record.canonical_row()
        if key in seen:
            report.duplicate_count += 1
        else:
            seen.add(key)

        if record.route == UNKNOWN_ROUTE:
            report.unknown_route_count += 1
            unknown_ffe.append(record.ffe)
        elif taxonomy is not None and not classify_route(record.route, taxonomy).classified:
            unclassified[record.route] += 1

        records.append(record)

    report.accepted_count = len(records)
    report.unknown_route_ffe = math.fsum(unknown_ffe)
    report.unclassified_route_codes = sorted(unclassified)

    logger.info(
        f"Accepted {report.accepted_count}/{report.raw_count} rows "
        f"({report.rejected_count} rejected, {report.duplicate_count} duplicates retained)"
    )
    if report.unknown_route_count:
        logger.warning(
            f"{report.unknown_route_count} records carry route {UNKNOWN_ROUTE} "
            f"({report.unknown_route_ffe} FFE); kept as a category"
        )
    for code in report.unclassified_route_codes:
        logger.warning(f"Route code {code} is not in the taxonomy ({unclassified[code]} records)")

    if not records:
        raise NoRecordsError(f"No records survived filtering ({report.raw_count} rows read)", report)
    return records, report
