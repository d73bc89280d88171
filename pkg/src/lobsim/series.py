"""Time series derived from an event trace: sampled mids, log returns,
and per-interval aggregates (volumes, volatility, spread, mid moves).

Sampling is last-observation-carried-forward on a fixed nanosecond grid;
grid points before the first two-sided quote are marked missing (NaN).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .replay import as_replay


class ConstantSeriesError(ValueError):
    """An operation that needs variation got a constant (or empty) input."""


@dataclass
class SampledSeries:
    start_ns: int
    stop_ns: int
    step_ns: int
    values: np.ndarray  # float; NaN where unobserved

    def times(self) -> np.ndarray:
        return self.start_ns + self.step_ns * np.arange(len(self.values),
                                                        dtype=np.int64)

    def trim_leading_missing(self) -> "SampledSeries":
        valid = np.flatnonzero(~np.isnan(self.values))
        if len(valid) == 0:
            raise ValueError("series is entirely missing")
        k = valid[0]
        return SampledSeries(self.start_ns + k * self.step_ns, self.stop_ns,
                             self.step_ns, self.values[k:])


@dataclass
class ReturnSeries:
    scale_ns: int
    values: np.ndarray


@dataclass
class IntervalAggregates:
    """Non-overlapping, contiguous intervals of length tau covering the window."""

    start_ns: int
    tau_ns: int
    dt_ns: int
    volume: np.ndarray          # traded shares per interval (once per trade)
    buy_volume: np.ndarray      # aggressor-buy shares
    sell_volume: np.ndarray
    volatility: np.ndarray      # stddev of dt-returns inside the interval
    interval_return: np.ndarray  # summed dt log returns
    mid_move: np.ndarray        # mid at interval end - mid at start, cents
    mean_spread: np.ndarray     # mean dt-sampled spread, cents

    def __len__(self):
        return len(self.volume)


def _locf(times: np.ndarray, values: np.ndarray, grid: np.ndarray) -> np.ndarray:
    """Last value at or before each grid instant; NaN before the first one."""
    out = np.full(len(grid), np.nan)
    if len(times) == 0:
        return out
    idx = np.searchsorted(times, grid, side="right") - 1
    seen = idx >= 0
    out[seen] = values[idx[seen]]
    return out


def sample_mid(source, dt_ns: int, start_ns=None, stop_ns=None) -> SampledSeries:
    """LOCF-sample the mid-price (cents) on a dt grid over [start, stop)."""
    replay = as_replay(source)
    times, mids = replay.mid_timeline()
    if start_ns is None or stop_ns is None:
        o, c = _default_span(source, replay)
        start_ns = o if start_ns is None else start_ns
        stop_ns = c if stop_ns is None else stop_ns
    n = (stop_ns - start_ns) // dt_ns
    grid = start_ns + dt_ns * np.arange(n, dtype=np.int64)
    return SampledSeries(start_ns, stop_ns, dt_ns, _locf(times, mids, grid))


def sample_spread(source, dt_ns: int, start_ns=None, stop_ns=None) -> SampledSeries:
    replay = as_replay(source)
    times, bid, ask = replay.two_sided_quotes()
    if start_ns is None or stop_ns is None:
        o, c = _default_span(source, replay)
        start_ns = o if start_ns is None else start_ns
        stop_ns = c if stop_ns is None else stop_ns
    n = (stop_ns - start_ns) // dt_ns
    grid = start_ns + dt_ns * np.arange(n, dtype=np.int64)
    return SampledSeries(start_ns, stop_ns, dt_ns,
                         _locf(times, (ask - bid).astype(float), grid))


def _default_span(source, replay):
    span = getattr(source, "span", None)
    if callable(span):
        try:
            return span()
        except ValueError:
            pass
    if len(replay.quote_time) == 0:
        raise ValueError("no quotes in trace and no explicit window given")
    return int(replay.quote_time[0]), int(replay.quote_time[-1]) + 1


def log_returns(series: SampledSeries) -> ReturnSeries:
    """r_i = ln m_{i+1} - ln m_i over the sampling grid."""
    values = series.values
    if np.isnan(values).any():
        raise ValueError("series has missing mids; trim_leading_missing() first")
    if (values <= 0).any():
        raise ValueError("log returns need strictly positive mids")
    return ReturnSeries(series.step_ns, np.diff(np.log(values)))


def returns_at_scale(series: SampledSeries, multiple: int) -> ReturnSeries:
    """Returns over k grid steps (telescoped sums of the base returns)."""
    if multiple < 1:
        raise ValueError("multiple must be >= 1")
    decimated = SampledSeries(series.start_ns, series.stop_ns,
                              series.step_ns * multiple,
                              series.values[::multiple])
    return log_returns(decimated)


def interval_aggregates(source, tau_ns: int, dt_ns: int,
                        start_ns=None, stop_ns=None) -> IntervalAggregates:
    """Slice the window into tau intervals; aggregate trades and returns.

    Requires tau to be a multiple of dt and at least 10 dt, so every
    interval holds enough returns for a volatility estimate. Intervals
    with fewer than two observed returns get NaN volatility.
    """
    if tau_ns % dt_ns != 0:
        raise ValueError("tau must be a multiple of dt")
    k = tau_ns // dt_ns
    if k < 10:
        raise ValueError("tau must be at least 10*dt")
    replay = as_replay(source)
    if start_ns is None or stop_ns is None:
        o, c = _default_span(source, replay)
        start_ns = o if start_ns is None else start_ns
        stop_ns = c if stop_ns is None else stop_ns
    n = (stop_ns - start_ns) // tau_ns
    if n < 1:
        raise ValueError("window shorter than one interval")

    in_window = ((replay.fill_time >= start_ns)
                 & (replay.fill_time < start_ns + n * tau_ns))
    f_time = replay.fill_time[in_window]
    f_size = replay.fill_size[in_window].astype(float)
    f_sign = replay.fill_sign[in_window]
    bucket = (f_time - start_ns) // tau_ns
    volume = np.bincount(bucket, weights=f_size, minlength=n)
    buy_volume = np.bincount(bucket[f_sign > 0], weights=f_size[f_sign > 0],
                             minlength=n)
    sell_volume = np.bincount(bucket[f_sign < 0], weights=f_size[f_sign < 0],
                              minlength=n)

    q_times, mids = replay.mid_timeline()
    fine_grid = start_ns + dt_ns * np.arange(n * k + 1, dtype=np.int64)
    fine_mids = _locf(q_times, mids, fine_grid)
    with np.errstate(invalid="ignore"):
        fine_returns = np.diff(np.log(fine_mids))  # NaN propagates
    per_interval = fine_returns.reshape(n, k)

    volatility = np.full(n, np.nan)
    interval_return = np.full(n, np.nan)
    counts = np.sum(~np.isnan(per_interval), axis=1)
    for i in range(n):
        ok = per_interval[i][~np.isnan(per_interval[i])]
        if counts[i] >= 2:
            volatility[i] = np.std(ok, ddof=1)
        if counts[i] == k:
            interval_return[i] = ok.sum()

    bound_mids = fine_mids[::k]
    mid_move = np.diff(bound_mids)

    spread_series = sample_spread(replay, dt_ns, start_ns, start_ns + n * tau_ns)
    spread_grid = spread_series.values.reshape(n, k)
    spread_ok = ~np.isnan(spread_grid)
    spread_counts = spread_ok.sum(axis=1)
    mean_spread = np.full(n, np.nan)
    has = spread_counts > 0
    mean_spread[has] = (np.where(spread_ok, spread_grid, 0.0).sum(axis=1)[has]
                        / spread_counts[has])

    return IntervalAggregates(start_ns, tau_ns, dt_ns, volume, buy_volume,
                              sell_volume, volatility, interval_return,
                              mid_move, mean_spread)
