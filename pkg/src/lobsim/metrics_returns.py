"""Stylized-fact statistics of return series.

Conventions: autocorrelation at lag k is the plain Pearson correlation of
the pairs (x_t, x_{t+k}) (each lag standardizes its own subseries);
kurtosis is raw (normal = 3), not excess; skewness and kurtosis use
population moments. Constant inputs raise instead of returning NaN.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .series import ConstantSeriesError, ReturnSeries, SampledSeries, returns_at_scale

RAW = "RAW"
SQUARED = "SQUARED"
ABSOLUTE = "ABSOLUTE"


@dataclass
class ACFCurve:
    lags: list
    values: list
    transform: str


@dataclass
class ScaleMoments:
    scale_ns: int
    volatility: float
    skewness: float
    kurtosis: float
    count: int


@dataclass
class DecayFit:
    beta: float
    r_squared: float
    applicable: bool
    lags: list
    acf_values: list
    reference_band: tuple = (0.2, 0.4)


def pearson(x, y) -> float:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if len(x) != len(y):
        raise ValueError("length mismatch")
    if len(x) < 3:
        raise ValueError("need at least 3 pairs")
    xc = x - x.mean()
    yc = y - y.mean()
    ssx = float(xc @ xc)
    ssy = float(yc @ yc)
    if ssx == 0.0 or ssy == 0.0:
        raise ConstantSeriesError("zero variance: correlation undefined")
    return float((xc @ yc) / np.sqrt(ssx * ssy))


def autocorrelation(values, lag: int) -> float:
    """Pearson correlation of (x_t, x_{t+lag}); exactly 1.0 at lag 0."""
    x = np.asarray(values, dtype=float)
    if lag < 0:
        raise ValueError("lag must be >= 0")
    if len(x) <= lag + 2:
        raise ValueError(f"series of length {len(x)} too short for lag {lag}")
    if lag == 0:
        if np.ptp(x) == 0.0:
            raise ConstantSeriesError("constant series")
        return 1.0
    return pearson(x[:-lag], x[lag:])


def acf_curve(values, lags, transform: str = RAW) -> ACFCurve:
    x = np.asarray(values, dtype=float)
    if transform == SQUARED:
        x = x * x
    elif transform == ABSOLUTE:
        x = np.abs(x)
    elif transform != RAW:
        raise ValueError(f"unknown transform {transform!r}")
    return ACFCurve(list(lags), [autocorrelation(x, int(k)) for k in lags],
                    transform)


def volatility_clustering(returns: ReturnSeries, lags) -> ACFCurve:
    """Autocorrelation of squared returns at the requested lags."""
    return acf_curve(returns.values, lags, SQUARED)


def moments_by_scale(mid_series: SampledSeries, scale_multiples) -> list[ScaleMoments]:
    """Volatility / skewness / kurtosis of returns at several horizons.

    `scale_multiples` are integer multiples of the sampling step. Requires
    at least 100 returns at the coarsest scale.
    """
    out = []
    coarsest = max(scale_multiples)
    n_coarse = (len(mid_series.values) - 1) // coarsest
    if n_coarse < 100:
        raise ValueError(f"only {n_coarse} returns at the coarsest scale; need >= 100")
    for mult in scale_multiples:
        r = returns_at_scale(mid_series, int(mult)).values
        out.append(ScaleMoments(mid_series.step_ns * int(mult),
                                volatility(r), skewness(r), kurtosis(r), len(r)))
    return out


def volatility(values) -> float:
    x = np.asarray(values, dtype=float)
    return float(np.sqrt(np.mean((x - x.mean()) ** 2)))


def skewness(values) -> float:
    x = np.asarray(values, dtype=float)
    m2 = np.mean((x - x.mean()) ** 2)
    if m2 == 0.0:
        raise ConstantSeriesError("constant series: skewness undefined")
    return float(np.mean((x - x.mean()) ** 3) / m2 ** 1.5)


def kurtosis(values) -> float:
    """Raw kurtosis m4/m2^2 (normal distribution = 3)."""
    x = np.asarray(values, dtype=float)
    m2 = np.mean((x - x.mean()) ** 2)
    if m2 == 0.0:
        raise ConstantSeriesError("constant series: kurtosis undefined")
    return float(np.mean((x - x.mean()) ** 4) / m2 ** 2)


def fit_power_decay(lags, acf_values) -> DecayFit:
    """OLS of ln f(tau) on ln tau; beta is the negated slope.

    Not applicable (beta undefined) when any ACF value is <= 0.
    """
    lags = np.asarray(lags, dtype=float)
    values = np.asarray(acf_values, dtype=float)
    if len(lags) < 3:
        raise ValueError("need at least 3 lags")
    if (values <= 0).any():
        return DecayFit(float("nan"), 0.0, False, list(lags), list(values))
    log_l = np.log(lags)
    log_f = np.log(values)
    slope, intercept = np.polyfit(log_l, log_f, 1)
    fitted = slope * log_l + intercept
    ss_res = float(np.sum((log_f - fitted) ** 2))
    ss_tot = float(np.sum((log_f - log_f.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return DecayFit(float(-slope), r2, True, list(lags), list(values))


def long_range_dependence(returns: ReturnSeries, lags) -> DecayFit:
    """Power-law decay exponent of the absolute-return autocorrelation."""
    curve = acf_curve(returns.values, lags, ABSOLUTE)
    return fit_power_decay(curve.lags, curve.values)


def volume_volatility_relation(aggregates):
    """OLS volume ~ alpha + beta * volatility, plus their correlation."""
    vol = aggregates.volatility
    volume = aggregates.volume
    ok = ~np.isnan(vol)
    if ok.sum() < 30:
        raise ValueError(f"need >= 30 intervals with volatility, got {int(ok.sum())}")
    x = vol[ok]
    y = volume[ok]
    corr = pearson(x, y)  # raises on constant volatility
    beta, alpha = np.polyfit(x, y, 1)
    return float(alpha), float(beta), corr


def returns_volatility_correlation(aggregates) -> float:
    """Pearson correlation of per-interval return and volatility."""
    ok = ~np.isnan(aggregates.volatility) & ~np.isnan(aggregates.interval_return)
    if ok.sum() < 3:
        raise ValueError("too few usable intervals")
    return pearson(aggregates.interval_return[ok], aggregates.volatility[ok])


def volatility_flow_asymmetry(returns: ReturnSeries, coarse_multiple: int, lags):
    """Lead/lag asymmetry between coarse and fine volatility proxies.

    Blocks of `coarse_multiple` base returns give per-block coarse
    volatility |sum r| and fine volatility sum |r|;
    A(tau) = corr(coarse_t, fine_{t+tau}) - corr(fine_t, coarse_{t+tau}).
    Positive values mean coarse volatility leads fine volatility.
    """
    r = np.asarray(returns.values, dtype=float)
    n_blocks = len(r) // coarse_multiple
    if n_blocks < max(lags) + 3:
        raise ValueError("not enough blocks for the requested lags")
    blocks = r[: n_blocks * coarse_multiple].reshape(n_blocks, coarse_multiple)
    coarse = np.abs(blocks.sum(axis=1))
    fine = np.abs(blocks).sum(axis=1)
    curve = []
    for lag in lags:
        lag = int(lag)
        if lag == 0:
            curve.append(0.0)
            continue
        forward = pearson(coarse[:-lag], fine[lag:])
        backward = pearson(fine[:-lag], coarse[lag:])
        curve.append(forward - backward)
    mean = float(np.mean([v for lag, v in zip(lags, curve) if lag > 0]))
    return ACFCurve(list(lags), curve, "ASYMMETRY"), mean
