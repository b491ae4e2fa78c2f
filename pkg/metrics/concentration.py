"""
Concentration and inequality metrics over one share distribution
"""

import math
from dataclasses import dataclass, field
from typing import Dict, NamedTuple, Sequence

import numpy as np
from scipy.stats import entropy as scipy_entropy

from core.errors import DataError
from core.records import DimensionKey, Scope
from metrics.distribution import WeightedDistribution

SHARE_SUM_TOLERANCE = 1e-9


def _as_shares(shares: Sequence[float]) -> np.ndarray:
    s = np.asarray(shares, dtype=float)
    if s.ndim != 1 or s.size == 0:
        raise DataError("share vector must be a non-empty 1-d sequence")
    if not np.all(np.isfinite(s)) or np.any(s < 0):
        raise DataError("shares must be finite and non-negative")
    if abs(math.fsum(s.tolist()) - 1.0) > SHARE_SUM_TOLERANCE:
        raise DataError(f"shares must sum to 1 (got {math.fsum(s.tolist())!r})")
    return s


def hhi(shares: Sequence[float]) -> float:
    """Herfindahl-Hirschman index on the [0, 1] scale (sum of squared shares)"""
    s = _as_shares(shares)
    return float(np.dot(s, s))


def concentration_ratio(shares: Sequence[float], k: int) -> float:
    """Cumulative share of the k largest categories"""
    if k < 1:
        raise DataError(f"k must be >= 1, got {k}")
    s = _as_shares(shares)
    if k >= s.size:
        return 1.0
    largest = np.sort(s)[::-1][:k]
    return min(1.0, float(math.fsum(largest.tolist())))


class EntropyResult(NamedTuple):
    entropy: float
    entropy_norm: float


def shannon_entropy(shares: Sequence[float]) -> EntropyResult:
    """Shannon entropy in nats and its ln(n)-normalized form (0 when n == 1)"""
    s = _as_shares(shares)
    h = float(scipy_entropy(s))
    n = s.size
    h_norm = h / math.log(n) if n >= 2 else 0.0
    return EntropyResult(entropy=h, entropy_norm=h_norm)


def gini(masses: Sequence[float]) -> float:
    """
    Gini coefficient of category totals from the sorted-cumulative form:
    with w_(1) <= ... <= w_(n) and C_i = w_(1) + ... + w_(i),
    G = (n + 1 - 2 * sum_i C_i / C_n) / n
    """
    w = np.asarray(masses, dtype=float)
    if w.ndim != 1 or w.size == 0:
        raise DataError("mass vector must be a non-empty 1-d sequence")
    if not np.all(np.isfinite(w)) or np.any(w <= 0):
        raise DataError("gini needs strictly positive masses")
    n = w.size
    cumulative = np.cumsum(np.sort(w))
    g = (n + 1 - 2 * float(np.sum(cumulative / cumulative[-1]))) / n
    return max(0.0, g)


@dataclass(frozen=True)
class ConcentrationSummary:
    dimension: DimensionKey
    scope: Scope
    n: int
    total_ffe: float
    hhi: float
    cr: Dict[int, float] = field(default_factory=dict)
    entropy: float = 0.0
    entropy_norm: float = 0.0
    gini: float = 0.0

    @property
    def effective_n(self) -> float:
        """Numbers-equivalent count of categories, 1 / HHI"""
        return 1.0 / self.hhi


def concentration_summary(dist: WeightedDistribution, ks: Sequence[int] = (3, 5),
                          scope: Scope = Scope.ALL) -> ConcentrationSummary:
    shares = dist.shares
    h = shannon_entropy(shares)
    return ConcentrationSummary(
        dimension=dist.dimension,
        scope=scope,
        n=dist.n,
        total_ffe=dist.total,
        hhi=hhi(shares),
        cr={int(k): concentration_ratio(shares, int(k)) for k in ks},
        entropy=h.entropy,
        entropy_norm=h.entropy_norm,
        gini=gini(dist.masses),
    )
