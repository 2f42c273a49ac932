"""Paired significance testing and descriptive summary statistics.

The signed-rank test discards zero differences, average-ranks ties, and is
exact (full sign-assignment distribution) up to 20 effective pairs, falling
back to a tie-corrected normal approximation with continuity correction
above that.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import t as t_dist

EXACT_LIMIT = 20


class StatsError(ValueError):
    pass


class AllZeroDifferences(StatsError):
    pass


class TooFewValues(StatsError):
    pass


@dataclass(frozen=True)
class WilcoxonResult:
    w_statistic: float  # min(W+, W-)
    p_value: float
    n_effective: int  # pairs remaining after zero-difference removal
    method: str  # "exact" or "normal"


@dataclass(frozen=True)
class IntervalSummary:
    mean: float
    half_width: float  # 95% confidence half-interval
    n: int


@dataclass(frozen=True)
class BoxplotStats:
    min: float
    q1: float
    median: float
    q3: float
    max: float
    mean: float


def _average_ranks_doubled(values: np.ndarray) -> np.ndarray:
    """Average ranks of ``values`` times two, as exact integers.

    Doubling keeps tied-average ranks (halves) in integer arithmetic so the
    exact distribution can be counted without rounding.
    """
    order = np.argsort(values, kind="stable")
    doubled = np.empty(len(values), dtype=np.int64)
    i = 0
    while i < len(values):
        j = i
        while j + 1 < len(values) and values[order[j + 1]] == values[order[i]]:
            j += 1
        # ranks i+1 .. j+1 averaged; doubled average = (i+1) + (j+1)
        doubled[order[i : j + 1]] = (i + 1) + (j + 1)
        i = j + 1
    return doubled


def _exact_count_at_most(doubled_ranks: np.ndarray, bound: int) -> int:
    """Number of sign assignments whose positive-rank sum is <= bound/2.

    Counts subsets by dynamic programming over the doubled-rank sum; exact
    integer arithmetic, equivalent to enumerating all 2^m assignments.
    """
    total = int(doubled_ranks.sum())
    bound = min(bound, total)
    if bound < 0:
        return 0
    counts = [0] * (bound + 1)
    counts[0] = 1
    for dr in doubled_ranks.tolist():
        for s in range(bound, dr - 1, -1):
            counts[s] += counts[s - dr]
    return sum(counts)


def _normal_p(w_min: float, m: int, tie_sizes) -> float:
    mean = m * (m + 1) / 4.0
    var = m * (m + 1) * (2 * m + 1) / 24.0
    var -= sum(t**3 - t for t in tie_sizes) / 48.0
    z = (w_min - mean + 0.5) / math.sqrt(var)
    return min(1.0, 2.0 * 0.5 * math.erfc(-z / math.sqrt(2.0)))


def wilcoxon_signed_rank(a, b) -> WilcoxonResult:
    """Two-sided signed-rank test on paired values (absolute residuals).

    Returns W = min(W+, W-) and the two-sided p-value.  Raises
    :class:`AllZeroDifferences` when every pair is identical.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape or a.ndim != 1:
        raise StatsError(f"paired vectors must match, got {a.shape} vs {b.shape}")
    if a.size == 0:
        raise StatsError("need at least one pair")
    if not (np.isfinite(a).all() and np.isfinite(b).all()):
        raise StatsError("non-finite value in pairs")

    diffs = a - b
    diffs = diffs[diffs != 0.0]
    m = int(diffs.size)
    if m == 0:
        raise AllZeroDifferences("all paired differences are zero")

    abs_diffs = np.abs(diffs)
    doubled = _average_ranks_doubled(abs_diffs)
    dw_plus = int(doubled[diffs > 0].sum())
    dw_minus = int(doubled.sum()) - dw_plus
    d_min = min(dw_plus, dw_minus)
    w_min = d_min / 2.0

    if m <= EXACT_LIMIT:
        count = _exact_count_at_most(doubled, d_min)
        p = min(1.0, (2 * count) / (2**m))
        method = "exact"
    else:
        _, tie_counts = np.unique(abs_diffs, return_counts=True)
        p = _normal_p(w_min, m, tie_counts.tolist())
        method = "normal"
    return WilcoxonResult(w_statistic=w_min, p_value=p, n_effective=m, method=method)


def interval_summary(values) -> IntervalSummary:
    """Mean with 95% t-interval half-width (Student t, n-1 df)."""
    values = np.asarray(values, dtype=float)
    if values.size < 2:
        raise TooFewValues("need at least two values for an interval")
    n = int(values.size)
    mean = float(np.mean(values))
    sd = float(np.std(values, ddof=1))
    half = float(t_dist.ppf(0.975, n - 1)) * sd / math.sqrt(n)
    return IntervalSummary(mean=mean, half_width=half, n=n)


def boxplot_stats(values) -> BoxplotStats:
    """Five-number summary plus mean; quartiles use linear interpolation,
    min/max are the raw extremes (no whisker fencing)."""
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        raise StatsError("need at least one value")
    q1, med, q3 = (float(np.percentile(values, q)) for q in (25, 50, 75))
    return BoxplotStats(
        min=float(np.min(values)),
        q1=q1,
        median=med,
        q3=q3,
        max=float(np.max(values)),
        mean=float(np.mean(values)),
    )
