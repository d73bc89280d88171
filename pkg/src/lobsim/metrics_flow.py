"""Stylized facts of volumes, order flow, and intraday activity.

Everything here is a pure function of the replayed trace: lifetimes, best
volumes and relative prices come from book reconstruction rather than from
logged EXECUTE rows, so simulated and ingested logs flow through the same
path. The order-flow autocorrelation uses the standard sign-sequence ACF
(+1 incoming buy, -1 incoming sell).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import distfit
from .events import SUBMIT_LIMIT, SUBMIT_MARKET
from .metrics_returns import ACFCurve, acf_curve, pearson
from .replay import CANCELLED, COMPLETION, FIRST_FILL, as_replay
from .series import _locf

LIFETIME_REFERENCE_BAND = (1.3, 1.6)
LIMIT_SIZE_REFERENCE = 2.0
MARKET_SIZE_REFERENCE = (2.3, 2.7)
RELATIVE_PRICE_REFERENCE = 1.6


def _submit_times(trace, include_market=True):
    kinds = (SUBMIT_LIMIT, SUBMIT_MARKET) if include_market else (SUBMIT_LIMIT,)
    return np.array([e.timestamp_ns for e in trace if e.event_type in kinds],
                    dtype=np.int64)


@dataclass
class CountDistribution:
    counts: np.ndarray
    window_ns: int
    fits: dict  # family name -> DistributionFit


def order_count_distribution(trace, window_ns: int, start_ns=None,
                             stop_ns=None) -> CountDistribution:
    """New-limit-order counts per non-overlapping window, with gamma and
    lognormal fits (KS statistics included on each fit)."""
    times = _submit_times(trace, include_market=False)
    if start_ns is None or stop_ns is None:
        o, c = trace.span()
        start_ns = o if start_ns is None else start_ns
        stop_ns = c if stop_ns is None else stop_ns
    n = (stop_ns - start_ns) // window_ns
    if n < 1:
        raise ValueError("window longer than the session")
    in_window = (times >= start_ns) & (times < start_ns + n * window_ns)
    idx = (times[in_window] - start_ns) // window_ns
    counts = np.bincount(idx, minlength=int(n)).astype(float)
    fits = {}
    for family in (distfit.GAMMA, distfit.LOGNORMAL, distfit.EXPONENTIAL):
        try:
            fits[family] = distfit.fit(counts, family)
        except (distfit.DegenerateSampleError, distfit.InsufficientDataError) as exc:
            fits[family] = str(exc)
    return CountDistribution(counts, window_ns, fits)


@dataclass
class InterarrivalDistribution:
    gaps_ns: np.ndarray        # zero gaps replaced by 0.5 ns
    zero_gaps: int
    fits: dict
    near_zero_dominated: bool  # Weibull shape < 1


def interarrival_distribution(trace) -> InterarrivalDistribution:
    """Gaps between successive new-order submissions, in nanoseconds.

    Same-nanosecond submissions produce zero gaps; those are replaced by
    0.5 ns (half the clock resolution) so log-based fits stay defined, and
    the replacement count is reported.
    """
    times = _submit_times(trace)
    if len(times) < 2:
        raise distfit.InsufficientDataError("need at least 2 submissions")
    gaps = np.diff(times).astype(float)
    zero_gaps = int((gaps == 0).sum())
    gaps[gaps == 0] = 0.5
    fits = {}
    for family in (distfit.EXPONENTIAL, distfit.LOGNORMAL, distfit.WEIBULL):
        fits[family] = distfit.fit(gaps, family)
    shape = fits[distfit.WEIBULL].params["shape"]
    return InterarrivalDistribution(gaps, zero_gaps, fits, shape < 1.0)


def order_size_distribution(trace, kind: str = "LIMIT"):
    """Power-law tail fit of submission sizes for one order kind."""
    etype = SUBMIT_LIMIT if kind.upper() == "LIMIT" else SUBMIT_MARKET
    sizes = np.array([e.size for e in trace if e.event_type == etype],
                     dtype=float)
    fit = distfit.fit(sizes, distfit.POWERLAW)
    reference = (LIMIT_SIZE_REFERENCE if etype == SUBMIT_LIMIT
                 else MARKET_SIZE_REFERENCE)
    return fit, reference


@dataclass
class RelativePriceDistribution:
    deltas: np.ndarray          # signed cents, buys and sells pooled
    histogram: dict             # signed delta -> count (clipped support)
    fit: object                 # power-law fit over positive deltas, or note
    skipped: int
    at_or_through_touch: int    # delta <= 0 submissions
    reference_exponent: float = RELATIVE_PRICE_REFERENCE


def relative_price_distribution(trace) -> RelativePriceDistribution:
    """Distance of new limit prices from the same-side quote (replayed).

    Buys at b_t - delta, sells at a_t + delta; negative delta means a
    submission at or through the touch. The power-law tail is fitted on the
    strictly positive deltas only.
    """
    replay = as_replay(trace)
    deltas = replay.rel_delta
    positive = deltas[deltas > 0].astype(float)
    note = None
    if len(positive) >= distfit.MIN_SAMPLES and positive.min() < positive.max():
        fit = distfit.fit(positive, distfit.POWERLAW)
    else:
        fit = None
        note = "not applicable: no positive-delta tail to fit"
    lo, hi = (int(deltas.min()), int(deltas.max())) if len(deltas) else (0, 0)
    lo = max(lo, -200)
    hi = min(hi, 200)
    histogram = {}
    clipped = np.clip(deltas, lo, hi) if len(deltas) else deltas
    for value, count in zip(*np.unique(clipped, return_counts=True)):
        histogram[int(value)] = int(count)
    result = RelativePriceDistribution(deltas, histogram, fit,
                                       replay.rel_skipped,
                                       int((deltas <= 0).sum()))
    if note:
        result.fit = note
    return result


def lifetime_distributions(trace) -> dict:
    """Per-kind power-law fits of order lifetimes (ns), with the empirical
    reference band for the exponent attached."""
    replay = as_replay(trace)
    out = {}
    for kind in (CANCELLED, FIRST_FILL, COMPLETION):
        samples = replay.lifetime_ns_by_kind(kind).astype(float)
        entry = {"count": int(len(samples)),
                 "reference_band": LIFETIME_REFERENCE_BAND}
        try:
            entry["fit"] = distfit.fit(samples, distfit.POWERLAW)
        except (distfit.InsufficientDataError, distfit.DegenerateSampleError) as exc:
            entry["fit"] = str(exc)
        out[kind] = entry
    return out


@dataclass
class BestVolumeDistribution:
    side: str
    fit: object
    excluded_snapshots: int
    gamma_shape_leq_1: bool


def best_volume_distribution(trace, grid_ns: int = 1_000_000_000,
                             start_ns=None, stop_ns=None) -> dict:
    """Gamma fits of best-bid and best-ask volumes sampled on a grid."""
    replay = as_replay(trace)
    if start_ns is None or stop_ns is None:
        o, c = trace.span() if hasattr(trace, "span") else (
            int(replay.quote_time[0]), int(replay.quote_time[-1]) + 1)
        start_ns = o if start_ns is None else start_ns
        stop_ns = c if stop_ns is None else stop_ns
    n = (stop_ns - start_ns) // grid_ns
    grid = start_ns + grid_ns * np.arange(n, dtype=np.int64)
    out = {}
    for side, volumes in (("bid", replay.bid_size), ("ask", replay.ask_size)):
        sampled = _locf(replay.quote_time, volumes.astype(float), grid)
        valid = sampled[~np.isnan(sampled) & (sampled > 0)]
        excluded = int(len(sampled) - len(valid))
        try:
            fit = distfit.fit(valid, distfit.GAMMA)
            shape_flag = fit.params["shape"] <= 1.0
        except (distfit.InsufficientDataError, distfit.DegenerateSampleError) as exc:
            fit = str(exc)
            shape_flag = False
        out[side] = BestVolumeDistribution(side, fit, excluded, shape_flag)
    return out


def order_flow_autocorrelation(trace, max_lag: int = 20) -> ACFCurve:
    """Sign autocorrelation of successive incoming orders (event lags)."""
    signs = [1.0 if e.side == "BUY" else -1.0 for e in trace
             if e.event_type in (SUBMIT_LIMIT, SUBMIT_MARKET)]
    return acf_curve(np.array(signs), range(1, max_lag + 1))


@dataclass
class IntradayProfile:
    bin_edges_ns: np.ndarray
    volumes: np.ndarray
    coefficients: list          # ascending powers, fit on normalized time
    degree: int
    quadratic: list             # degree-2 coefficients used for the verdict
    u_shape: bool               # convex with an interior minimum
    inverted_u: bool            # concave with an interior maximum


def intraday_profile(trace, n_bins: int = 13, degree: int = 2,
                     start_ns=None, stop_ns=None) -> IntradayProfile:
    """Per-bin traded volume with a least-squares polynomial on [0, 1].

    The U-shape verdict always comes from the degree-2 fit: positive
    leading coefficient with the vertex strictly inside the session.
    """
    replay = as_replay(trace)
    if start_ns is None or stop_ns is None:
        o, c = trace.span()
        start_ns = o if start_ns is None else start_ns
        stop_ns = c if stop_ns is None else stop_ns
    edges = np.linspace(start_ns, stop_ns, n_bins + 1)
    volumes = np.zeros(n_bins)
    idx = np.searchsorted(edges, replay.fill_time, side="right") - 1
    ok = (idx >= 0) & (idx < n_bins)
    np.add.at(volumes, idx[ok], replay.fill_size[ok].astype(float))
    centers = ((edges[:-1] + edges[1:]) / 2 - start_ns) / (stop_ns - start_ns)
    coeffs = np.polynomial.polynomial.polyfit(centers, volumes, degree)
    quad = (coeffs if degree == 2
            else np.polynomial.polynomial.polyfit(centers, volumes, 2))
    c0, c1, c2 = quad
    # flat profiles fit with curvature at float-noise level; treat as zero
    material = abs(c2) > 1e-9 * (1.0 + abs(c0))
    vertex = -c1 / (2 * c2) if material else float("inf")
    interior = 0.0 < vertex < 1.0
    return IntradayProfile(edges.astype(np.int64), volumes, list(coeffs),
                           degree, list(quad),
                           u_shape=bool(material and c2 > 0 and interior),
                           inverted_u=bool(material and c2 < 0 and interior))


def volume_spread_correlation(aggregates) -> float:
    """Pearson correlation of per-interval volume and mean spread."""
    spread = aggregates.mean_spread
    ok = ~np.isnan(spread)
    if ok.sum() < 3:
        raise ValueError("too few intervals with a defined spread")
    return pearson(aggregates.volume[ok], spread[ok])
