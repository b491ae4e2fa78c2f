"""
Comparison of two distributions over the same dimension

- Jensen-Shannon distance between aligned share vectors
- Spearman rho and Kendall tau-b with two-sided p-values
- industry orientation index R_i = ln((s_export + eps) / (s_import + eps))

p-values come from exact enumeration of all n! permutations when n is at
most the exact threshold (9 by default, 362,880 permutations), otherwise
from the t approximation (Spearman) or the tie-corrected normal
approximation (Kendall). The method used is recorded on every result.
"""

import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import permutations
from typing import Dict, Mapping, Sequence

import numpy as np
from scipy import stats
from scipy.special import rel_entr

from core.config import DEFAULT_EPSILON, DEFAULT_EXACT_P_THRESHOLD, DEFAULT_JSD_LOG_BASE
from core.errors import ConfigError, DataError, DimensionMismatchError
from core.records import DimensionKey
from metrics.distribution import WeightedDistribution, align
from utils.logging_config import get_logger

logger = get_logger(__name__)

SHARE_SUM_TOLERANCE = 1e-9
# block size when scoring permutations, keeps the n = 9 case near 30 MB
_PERMUTATION_BLOCK = 40320


def _share_vector(values: Sequence[float], name: str) -> np.ndarray:
    v = np.asarray(values, dtype=float)
    if v.ndim != 1 or v.size == 0:
        raise DataError(f"{name} must be a non-empty 1-d share vector")
    if not np.all(np.isfinite(v)) or np.any(v < 0):
        raise DataError(f"{name} must hold finite non-negative shares")
    if abs(math.fsum(v.tolist()) - 1.0) > SHARE_SUM_TOLERANCE:
        raise DataError(f"{name} is not normalized (sums to {math.fsum(v.tolist())!r})")
    return v


def js_distance(p: Sequence[float], q: Sequence[float], base: float = DEFAULT_JSD_LOG_BASE) -> float:
    """
    Jensen-Shannon distance sqrt(KL(p||m)/2 + KL(q||m)/2), m = (p + q) / 2,
    with logarithms in the given base (base 2 bounds it by 1).
    """
    p = _share_vector(p, "p")
    q = _share_vector(q, "q")
    if p.shape != q.shape:
        raise DataError(f"share vectors differ in length ({p.size} vs {q.size})")
    if not base > 1:
        raise ConfigError(f"log base must be > 1, got {base}")
    m = (p + q) / 2.0
    # rel_entr gives 0 for 0 * log(0 / m); m > 0 wherever p or q is
    divergence = (float(np.sum(rel_entr(p, m))) + float(np.sum(rel_entr(q, m)))) / 2.0
    divergence /= math.log(base)
    return min(1.0, math.sqrt(max(0.0, divergence))) if base == 2 else math.sqrt(max(0.0, divergence))


@dataclass(frozen=True)
class RankCorrelation:
    statistic: float
    pvalue: float
    method: str
    n: int

    @property
    def defined(self) -> bool:
        return self.method != "undefined"

    @classmethod
    def undefined(cls, n: int) -> "RankCorrelation":
        return cls(statistic=math.nan, pvalue=math.nan, method="undefined", n=n)


def _paired(x: Sequence[float], y: Sequence[float]):
    xa = np.asarray(x, dtype=float)
    ya = np.asarray(y, dtype=float)
    if xa.ndim != 1 or ya.ndim != 1 or xa.size != ya.size:
        raise DataError(f"rank statistics need two vectors of equal length ({xa.size} vs {ya.size})")
    if xa.size < 3:
        raise DataError(f"rank statistics need at least 3 paired values, got {xa.size}")
    return xa, ya


@lru_cache(maxsize=None)
def _all_permutations(n: int) -> np.ndarray:
    return np.array(list(permutations(range(n))), dtype=np.int16)


def _permutation_blocks(n: int):
    perms = _all_permutations(n)
    for start in range(0, len(perms), _PERMUTATION_BLOCK):
        yield perms[start:start + _PERMUTATION_BLOCK]


def spearman(x: Sequence[float], y: Sequence[float],
             exact_threshold: int = DEFAULT_EXACT_P_THRESHOLD) -> RankCorrelation:
    """Spearman rho as the Pearson correlation of midranks, with a two-sided p-value"""
    xa, ya = _paired(x, y)
    n = xa.size
    rx = stats.rankdata(xa, method="average")
    ry = stats.rankdata(ya, method="average")
    cx = rx - rx.mean()
    cy = ry - ry.mean()
    denom = math.sqrt(float(np.dot(cx, cx)) * float(np.dot(cy, cy)))
    if denom == 0.0:
        return RankCorrelation.undefined(n)
    observed = float(np.dot(cx, cy))
    rho = max(-1.0, min(1.0, observed / denom))

    if n <= exact_threshold:
        # midranks are multiples of 1/2, so these dot products are exact
        hits = 0
        total = 0
        for block in _permutation_blocks(n):
            scores = cy[block] @ cx
            hits += int(np.count_nonzero(np.abs(scores) >= abs(observed) - 1e-9))
            total += len(block)
        return RankCorrelation(statistic=rho, pvalue=hits / total, method="exact", n=n)

    if abs(rho) == 1.0:
        return RankCorrelation(statistic=rho, pvalue=0.0, method="asymptotic", n=n)
    t = rho * math.sqrt((n - 2) / (1.0 - rho * rho))
    p = float(2.0 * stats.t.sf(abs(t), n - 2))
    return RankCorrelation(statistic=rho, pvalue=min(1.0, p), method="asymptotic", n=n)


def _tie_groups(values: np.ndarray) -> np.ndarray:
    _, counts = np.unique(values, return_counts=True)
    return counts[counts > 1].astype(float)


def kendall(x: Sequence[float], y: Sequence[float],
            exact_threshold: int = DEFAULT_EXACT_P_THRESHOLD) -> RankCorrelation:
    """Kendall tau-b over all n(n-1)/2 pairs, with a two-sided p-value"""
    xa, ya = _paired(x, y)
    n = xa.size
    i, j = np.triu_indices(n, k=1)
    sx = np.sign(xa[i] - xa[j]).astype(np.int64)
    sy = np.sign(ya[i] - ya[j]).astype(np.int64)
    s = int(np.dot(sx, sy))

    n0 = n * (n - 1) // 2
    tx = _tie_groups(xa)
    ty = _tie_groups(ya)
    n1 = float(np.sum(tx * (tx - 1) / 2))
    n2 = float(np.sum(ty * (ty - 1) / 2))
    denom = math.sqrt((n0 - n1) * (n0 - n2))
    if denom == 0.0:
        return RankCorrelation.undefined(n)
    tau = max(-1.0, min(1.0, s / denom))

    if n <= exact_threshold:
        # the denominator is fixed under permutations of y, so compare S directly
        ranks_y = stats.rankdata(ya, method="dense").astype(np.int16)
        hits = 0
        total = 0
        for block in _permutation_blocks(n):
            permuted = ranks_y[block]
            scores = np.sign(permuted[:, i] - permuted[:, j]).astype(np.int64) @ sx
            hits += int(np.count_nonzero(np.abs(scores) >= abs(s)))
            total += len(block)
        return RankCorrelation(statistic=tau, pvalue=hits / total, method="exact", n=n)

    v0 = n * (n - 1) * (2 * n + 5)
    vt = float(np.sum(tx * (tx - 1) * (2 * tx + 5)))
    vu = float(np.sum(ty * (ty - 1) * (2 * ty + 5)))
    v1 = float(np.sum(tx * (tx - 1))) * float(np.sum(ty * (ty - 1))) / (2.0 * n * (n - 1))
    v2 = (float(np.sum(tx * (tx - 1) * (tx - 2))) * float(np.sum(ty * (ty - 1) * (ty - 2)))
          / (9.0 * n * (n - 1) * (n - 2)))
    var_s = (v0 - vt - vu) / 18.0 + v1 + v2
    if var_s <= 0:
        return RankCorrelation(statistic=tau, pvalue=math.nan, method="undefined", n=n)
    z = s / math.sqrt(var_s)
    p = float(2.0 * stats.norm.sf(abs(z)))
    return RankCorrelation(statistic=tau, pvalue=min(1.0, p), method="asymptotic", n=n)


@dataclass(frozen=True)
class OrientationRow:
    industry: str
    import_share: float
    export_share: float
    index: float


@dataclass(frozen=True)
class OrientationTable:
    rows: Dict[str, OrientationRow]
    epsilon: float

    @property
    def indices(self) -> Dict[str, float]:
        return {industry: row.index for industry, row in self.rows.items()}

    def most_export_oriented(self) -> str:
        return max(self.rows.values(), key=lambda r: (r.index, r.industry)).industry


def orientation_index(export_shares: Mapping[str, float], import_shares: Mapping[str, float],
                      epsilon: float = DEFAULT_EPSILON) -> OrientationTable:
    """R_i = ln(s_export + eps) - ln(s_import + eps) over the union of industries"""
    if not epsilon > 0:
        raise ConfigError(f"epsilon must be > 0, got {epsilon}")
    rows = {}
    for industry in sorted(set(export_shares) | set(import_shares)):
        e = float(export_shares.get(industry, 0.0))
        i = float(import_shares.get(industry, 0.0))
        # a difference of logs negates exactly when the arguments swap
        index = math.log(e + epsilon) - math.log(i + epsilon)
        rows[industry] = OrientationRow(industry=industry, import_share=i, export_share=e, index=index)
    return OrientationTable(rows=rows, epsilon=epsilon)


@dataclass(frozen=True)
class AsymmetryReport:
    dimension: DimensionKey
    jsd: float
    spearman: RankCorrelation
    kendall: RankCorrelation
    union_n: int
    log_base: float = DEFAULT_JSD_LOG_BASE


def asymmetry_report(p: WeightedDistribution, q: WeightedDistribution,
                     log_base: float = DEFAULT_JSD_LOG_BASE,
                     exact_threshold: int = DEFAULT_EXACT_P_THRESHOLD) -> AsymmetryReport:
    """Compare p (imports) and q (exports) on their aligned union support, zero shares included"""
    if p.dimension is not q.dimension:
        raise DimensionMismatchError(f"Cannot compare {p.dimension.value} with {q.dimension.value}")
    aligned = align(p, q)
    n = len(aligned.categories)
    jsd = js_distance(aligned.p, aligned.q, base=log_base)
    if n < 3:
        logger.warning(f"{p.dimension.value}: only {n} categories, rank statistics left undefined")
        rho = tau = RankCorrelation.undefined(n)
    else:
        rho = spearman(aligned.p, aligned.q, exact_threshold)
        tau = kendall(aligned.p, aligned.q, exact_threshold)
    logger.info(f"{p.dimension.value}: JSD={jsd:.4f} rho={rho.statistic:.4f} tau={tau.statistic:.4f} (n={n})")
    return AsymmetryReport(dimension=p.dimension, jsd=jsd, spearman=rho, kendall=tau,
                           union_n=n, log_base=log_base)
