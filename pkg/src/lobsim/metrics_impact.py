"""Market-impact curve and cross-asset correlation statistics.

Participation of volume in an interval is |buy - sell| / (buy + sell).
Mid moves are oriented by the net-flow sign before averaging inside a bin:
unsigned averaging would let buy- and sell-driven moves cancel, so a
sell-heavy interval whose mid fell counts as positive impact.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .distfit import InsufficientDataError
from .metrics_returns import pearson


@dataclass
class ParticipationSeries:
    participation: np.ndarray   # P in [0, 1], one entry per kept interval
    oriented_move: np.ndarray   # sign(net flow) * mid move, cents
    mid_move: np.ndarray        # raw mid move, cents
    skipped: int                # zero-volume intervals dropped


@dataclass
class ImpactBin:
    index: int                  # 1-based; bin i covers ((i-1)/N, i/N]
    count: int
    mean_participation: float
    mean_move: float


@dataclass
class ImpactFit:
    alpha: float
    beta: float
    residual_norm: float
    bins_used: int
    bins_excluded: int


def participation_series(aggregates) -> ParticipationSeries:
    buy = np.asarray(aggregates.buy_volume, dtype=float)
    sell = np.asarray(aggregates.sell_volume, dtype=float)
    move = np.asarray(aggregates.mid_move, dtype=float)
    total = buy + sell
    keep = (total > 0) & ~np.isnan(move)
    skipped = int(len(total) - keep.sum())
    net = buy[keep] - sell[keep]
    participation = np.abs(net) / total[keep]
    oriented = np.sign(net) * move[keep]
    return ParticipationSeries(participation, oriented, move[keep], skipped)


def impact_curve(series: ParticipationSeries, n_bins: int = 10) -> list[ImpactBin]:
    """Partition kept intervals into participation bins.

    Bin i holds participation in ((i-1)/N, i/N]; exactly-zero participation
    goes to bin 1, so boundary values i/N land in bin i. Empty bins are
    returned with count 0.
    """
    if n_bins < 2:
        raise ValueError("need at least 2 bins")
    p = series.participation
    idx = np.ceil(p * n_bins).astype(int)
    idx[idx < 1] = 1
    idx[idx > n_bins] = n_bins
    bins = []
    for i in range(1, n_bins + 1):
        members = idx == i
        count = int(members.sum())
        if count:
            bins.append(ImpactBin(i, count, float(p[members].mean()),
                                  float(series.oriented_move[members].mean())))
        else:
            bins.append(ImpactBin(i, 0, float("nan"), float("nan")))
    return bins


def fit_impact(bins) -> ImpactFit:
    """Fit mean move ~ alpha * participation^beta by OLS in log-log space.

    Bins that are empty or have non-positive mean move or participation are
    excluded (the log is undefined there); at least 3 usable bins required.
    """
    usable = [(b.mean_participation, b.mean_move) for b in bins
              if b.count > 0 and b.mean_move > 0 and b.mean_participation > 0]
    excluded = len(bins) - len(usable)
    if len(usable) < 3:
        raise InsufficientDataError(
            f"impact fit needs >= 3 usable bins, got {len(usable)}")
    log_p = np.log([p for p, _ in usable])
    log_m = np.log([m for _, m in usable])
    beta, intercept = np.polyfit(log_p, log_m, 1)
    residual = float(np.linalg.norm(log_m - (beta * log_p + intercept)))
    return ImpactFit(float(np.exp(intercept)), float(beta), residual,
                     len(usable), excluded)


def correlation_matrix(series_list) -> np.ndarray:
    """Pairwise Pearson correlations with a unit diagonal."""
    arrays = [np.asarray(s, dtype=float) for s in series_list]
    n = len(arrays)
    if n < 2:
        raise ValueError("need at least two series")
    length = len(arrays[0])
    for a in arrays:
        if len(a) != length:
            raise ValueError("series must be aligned to equal length")
    out = np.eye(n)
    for i in range(n):
        for j in range(i + 1, n):
            out[i, j] = out[j, i] = pearson(arrays[i], arrays[j])
    return out


def tail_correlation(r1, r2, quantile: float = 0.99) -> float:
    """Correlation of extreme-|return| co-occurrence indicators.

    Each series' indicator flags returns whose magnitude exceeds its own
    `quantile` of |r|; highly tail-correlated assets jump together even
    when their ordinary co-movement is weak.
    """
    if not 0.0 < quantile < 1.0:
        raise ValueError("quantile must be in (0, 1)")
    a = np.abs(np.asarray(r1, dtype=float))
    b = np.abs(np.asarray(r2, dtype=float))
    if len(a) != len(b):
        raise ValueError("series must be aligned")
    ind_a = (a > np.quantile(a, quantile)).astype(float)
    ind_b = (b > np.quantile(b, quantile)).astype(float)
    return pearson(ind_a, ind_b)
