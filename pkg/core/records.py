"""
Shipment records and the categorical dimensions they are aggregated over
"""

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, FrozenSet, Iterable, Optional, Tuple


class Direction(str, Enum):
    IMPORT = "IMPORT"
    EXPORT = "EXPORT"

    @classmethod
    def parse(cls, token: Optional[str]) -> Optional["Direction"]:
        """Map a normalized token onto a direction, None when it is not one"""
        if token is None:
            return None
        try:
            return cls(token.strip().upper())
        except ValueError:
            return None


class DimensionKey(str, Enum):
    ROUTE = "route"
    ORIGIN_NODE = "origin_node"
    DESTINATION_NODE = "destination_node"
    INDUSTRY = "industry"
    YEAR = "year"
    DIRECTION = "direction"

    @property
    def label(self) -> str:
        return _DIMENSION_LABELS[self]

    @property
    def plural(self) -> str:
        return _DIMENSION_PLURALS[self]


_DIMENSION_LABELS = {
    DimensionKey.ROUTE: "Route",
    DimensionKey.ORIGIN_NODE: "Origin node",
    DimensionKey.DESTINATION_NODE: "Destination node",
    DimensionKey.INDUSTRY: "Industry",
    DimensionKey.YEAR: "Year",
    DimensionKey.DIRECTION: "Direction",
}

_DIMENSION_PLURALS = {
    DimensionKey.ROUTE: "routes",
    DimensionKey.ORIGIN_NODE: "origins",
    DimensionKey.DESTINATION_NODE: "destinations",
    DimensionKey.INDUSTRY: "industries",
    DimensionKey.YEAR: "years",
    DimensionKey.DIRECTION: "directions",
}

# The four dimensions every structural comparison runs over by default
STRUCTURAL_DIMENSIONS = (
    DimensionKey.ROUTE,
    DimensionKey.ORIGIN_NODE,
    DimensionKey.DESTINATION_NODE,
    DimensionKey.INDUSTRY,
)


class Scope(str, Enum):
    ALL = "all"
    IMPORT = "import"
    EXPORT = "export"

    @property
    def label(self) -> str:
        return {"all": "All", "import": "Imports", "export": "Exports"}[self.value]

    @property
    def direction(self) -> Optional[Direction]:
        if self is Scope.IMPORT:
            return Direction.IMPORT
        if self is Scope.EXPORT:
            return Direction.EXPORT
        return None

    def matches(self, record: "ShipmentRecord") -> bool:
        return self is Scope.ALL or record.direction is self.direction


# canonical column names, in output order
CANONICAL_COLUMNS = (
    "Year", "Direction", "Route", "Origin_Node", "Destination_Node", "Industry", "Commodity", "FFE",
)


def _is_token(value: object) -> bool:
    return isinstance(value, str) and bool(value) and value == value.strip() and value == value.upper()


@dataclass(frozen=True)
class ShipmentRecord:
    """One cleaned containerized movement, weighted by its FFE"""
    year: int
    direction: Direction
    route: str
    origin_node: str
    destination_node: str
    industry: str
    ffe: float
    commodity: Optional[str] = None

    def __post_init__(self):
        if not isinstance(self.direction, Direction):
            raise ValueError(f"direction must be a Direction, got {self.direction!r}")
        if not (isinstance(self.ffe, (int, float)) and math.isfinite(self.ffe) and self.ffe > 0):
            raise ValueError(f"ffe must be a positive finite number, got {self.ffe!r}")
        for name in ("route", "origin_node", "destination_node", "industry"):
            if not _is_token(getattr(self, name)):
                raise ValueError(f"{name} must be a trimmed uppercase token, got {getattr(self, name)!r}")
        if self.commodity is not None and not _is_token(self.commodity):
            raise ValueError(f"commodity must be a trimmed uppercase token, got {self.commodity!r}")

    def category(self, dimension: DimensionKey) -> str:
        """Category token of this record along one dimension"""
        if dimension is DimensionKey.YEAR:
            return str(self.year)
        if dimension is DimensionKey.DIRECTION:
            return self.direction.value
        return getattr(self, dimension.value)

    def canonical_row(self) -> Tuple[str, ...]:
        """Row in CANONICAL_COLUMNS order, FFE in shortest round-trip form"""
        return (
            str(self.year), self.direction.value, self.route, self.origin_node,
            self.destination_node, self.industry, self.commodity or "", repr(float(self.ffe)),
        )


@dataclass(frozen=True)
class CandidateRecord:
    """
    A harmonized row before filtering. Numeric fields that failed to parse are
    None and named in invalid_fields; fields that were simply absent are None
    without being named there.
    """
    year: Optional[int]
    direction: Optional[Direction]
    route: Optional[str]
    origin_node: Optional[str]
    destination_node: Optional[str]
    industry: Optional[str]
    ffe: Optional[float]
    commodity: Optional[str] = None
    invalid_fields: Tuple[str, ...] = ()


@dataclass(frozen=True)
class RecordFilter:
    """Direction scope plus an optional set of years"""
    scope: Scope = Scope.ALL
    years: Optional[FrozenSet[int]] = field(default=None)

    def __call__(self, record: ShipmentRecord) -> bool:
        if not self.scope.matches(record):
            return False
        return self.years is None or record.year in self.years


RecordPredicate = Callable[[ShipmentRecord], bool]


def apply_filter(records: Iterable[ShipmentRecord], predicate: Optional[RecordPredicate]):
    """Records passing predicate, in input order"""
    if predicate is None:
        return list(records)
    return [r for r in records if predicate(r)]
