"""
Year-by-year distributions and structural drift against a base year
"""

from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional

from core.config import DEFAULT_EXACT_P_THRESHOLD, DEFAULT_JSD_LOG_BASE
from core.errors import DataError, MissingBaseYearError
from core.records import DimensionKey, RecordPredicate, Scope, ShipmentRecord, apply_filter
from metrics.concentration import hhi
from metrics.distribution import WeightedDistribution, align, build_distribution
from metrics.divergence import RankCorrelation, js_distance, spearman
from utils.logging_config import get_logger

logger = get_logger(__name__)


def yearly_distributions(records: Iterable[ShipmentRecord], dimension: DimensionKey,
                         record_filter: Optional[RecordPredicate] = None) -> Dict[int, WeightedDistribution]:
    """One distribution per observed year, keyed in ascending year order"""
    selected = apply_filter(records, record_filter)
    if not selected:
        raise DataError(f"No records left to build yearly {dimension.value} distributions")
    years = sorted({r.year for r in selected})
    return {
        year: build_distribution(selected, dimension, lambda r, y=year: r.year == y)
        for year in years
    }


@dataclass(frozen=True)
class DriftRow:
    year: int
    n: int
    total_ffe: float
    hhi: float
    jsd_vs_base: float


@dataclass(frozen=True)
class AdjacentPersistence:
    year_from: int
    year_to: int
    spearman: RankCorrelation


@dataclass(frozen=True)
class DriftReport:
    dimension: DimensionKey
    scope: Scope
    base_year: int
    rows: List[DriftRow] = field(default_factory=list)
    adjacent: List[AdjacentPersistence] = field(default_factory=list)
    log_base: float = DEFAULT_JSD_LOG_BASE


def _rank_persistence(earlier: WeightedDistribution, later: WeightedDistribution,
                      exact_threshold: int) -> RankCorrelation:
    aligned = align(earlier, later)
    n = len(aligned.categories)
    if n < 3:
        return RankCorrelation.undefined(n)
    return spearman(aligned.p, aligned.q, exact_threshold)


def drift_series(yearly: Dict[int, WeightedDistribution], base_year: Optional[int] = None,
                 log_base: float = DEFAULT_JSD_LOG_BASE, scope: Scope = Scope.ALL,
                 exact_threshold: int = DEFAULT_EXACT_P_THRESHOLD) -> DriftReport:
    """
    Drift_t = JSD(s_base, s_t) for every year, each pair aligned on the union
    of its own two supports, plus Spearman rho between consecutive years.
    """
    if not yearly:
        raise DataError("drift needs at least one yearly distribution")
    years = sorted(yearly)
    dimension = yearly[years[0]].dimension
    if base_year is None:
        base_year = years[0]
    if base_year not in yearly:
        raise MissingBaseYearError(
            f"Base year {base_year} has no {dimension.value} records (years present: {years})"
        )

    base = yearly[base_year]
    rows = []
    for year in years:
        dist = yearly[year]
        if year == base_year:
            drift = 0.0
        else:
            aligned = align(base, dist)
            drift = js_distance(aligned.p, aligned.q, base=log_base)
        rows.append(DriftRow(year=year, n=dist.n, total_ffe=dist.total, hhi=hhi(dist.shares), jsd_vs_base=drift))
        logger.debug(f"{dimension.value} {year}: n={dist.n} drift={drift:.4f}")

    adjacent = [
        AdjacentPersistence(a, b, _rank_persistence(yearly[a], yearly[b], exact_threshold))
        for a, b in zip(years, years[1:])
    ]
    logger.info(f"Drift of {dimension.value} ({scope.label}) over {len(years)} years against {base_year}")
    return DriftReport(dimension=dimension, scope=scope, base_year=base_year,
                       rows=rows, adjacent=adjacent, log_base=log_base)
