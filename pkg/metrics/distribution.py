"""
FFE-weighted categorical distributions over one record dimension

A distribution stores the mass w_i of every observed category i and derives
shares s_i = w_i / sum(w). Categories are kept in lexicographic order and each
mass is an exactly-rounded sum (math.fsum), so the same multiset of records
gives a bit-identical distribution whatever order the records arrive in.
"""

import math
from collections import defaultdict
from dataclasses import dataclass
from typing import Dict, Iterable, List, NamedTuple, Optional, Tuple

import numpy as np

from core.errors import DataError, DimensionMismatchError
from core.records import DimensionKey, RecordPredicate, ShipmentRecord, apply_filter
from utils.logging_config import get_logger

logger = get_logger(__name__)


@dataclass(frozen=True)
class WeightedDistribution:
    dimension: DimensionKey
    # (category, mass) pairs sorted by category; every mass > 0
    items: Tuple[Tuple[str, float], ...]

    def __post_init__(self):
        if not self.items:
            raise DataError(f"A {self.dimension.value} distribution needs at least one category")
        categories = [c for c, _ in self.items]
        if categories != sorted(set(categories)):
            raise ValueError("categories must be unique and sorted")
        if any(not (m > 0 and math.isfinite(m)) for _, m in self.items):
            raise ValueError("every stored mass must be positive and finite")

    @classmethod
    def from_masses(cls, dimension: DimensionKey, masses: Dict[str, float]) -> "WeightedDistribution":
        """Build from a category -> mass map, dropping zero-mass categories"""
        items = tuple((c, float(m)) for c, m in sorted(masses.items()) if m > 0)
        return cls(dimension=dimension, items=items)

    @property
    def categories(self) -> List[str]:
        return [c for c, _ in self.items]

    @property
    def masses(self) -> np.ndarray:
        return np.array([m for _, m in self.items], dtype=float)

    @property
    def entries(self) -> Dict[str, float]:
        return dict(self.items)

    @property
    def n(self) -> int:
        return len(self.items)

    @property
    def total(self) -> float:
        return math.fsum(m for _, m in self.items)

    @property
    def shares(self) -> np.ndarray:
        return self.masses / self.total

    def share_map(self) -> Dict[str, float]:
        return dict(zip(self.categories, self.shares.tolist()))


def build_distribution(records: Iterable[ShipmentRecord], dimension: DimensionKey,
                       record_filter: Optional[RecordPredicate] = None) -> WeightedDistribution:
    """Sum FFE per category of dimension over the records passing record_filter"""
    grouped: Dict[str, List[float]] = defaultdict(list)
    for record in apply_filter(records, record_filter):
        grouped[record.category(dimension)].append(record.ffe)
    if not grouped:
        raise DataError(f"No records left to build a {dimension.value} distribution")
    masses = {category: math.fsum(values) for category, values in grouped.items()}
    return WeightedDistribution.from_masses(dimension, masses)


class AlignedShares(NamedTuple):
    categories: List[str]
    p: np.ndarray
    q: np.ndarray


def align(p: WeightedDistribution, q: WeightedDistribution) -> AlignedShares:
    """Share vectors of p and q over the sorted union of their supports, 0 where absent"""
    if p.dimension is not q.dimension:
        raise DimensionMismatchError(f"Cannot align {p.dimension.value} with {q.dimension.value}")
    categories = sorted(set(p.categories) | set(q.categories))
    p_shares, q_shares = p.share_map(), q.share_map()
    return AlignedShares(
        categories=categories,
        p=np.array([p_shares.get(c, 0.0) for c in categories], dtype=float),
        q=np.array([q_shares.get(c, 0.0) for c in categories], dtype=float),
    )


class ShareRow(NamedTuple):
    category: str
    mass: float
    share: float


def top_k(dist: WeightedDistribution, k: int) -> List[ShareRow]:
    """The min(k, n) largest categories by share, ties by ascending category"""
    if k < 1:
        raise DataError(f"k must be >= 1, got {k}")
    total = dist.total
    ranked = sorted(dist.items, key=lambda item: (-item[1], item[0]))
    return [ShareRow(category, mass, mass / total) for category, mass in ranked[:k]]
