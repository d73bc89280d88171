"""Assemble a MetricReport: every documented metric id, computed or marked
unavailable, as one JSON-serializable dict.

Entries all carry {value, sample_count, warnings} plus metric-specific
payloads (fit, fits, curve, samples, histogram). Metrics that cannot be
computed on the given trace record the reason in `warnings` instead of
raising, so a report is always complete. All numbers are finite (NaN is
replaced by null) and reports serialize byte-identically for identical
inputs.
"""

from __future__ import annotations

import math

import numpy as np

from . import distfit, metrics_flow, metrics_impact, metrics_returns
from .distfit import DistributionFit
from .replay import CANCELLED, COMPLETION, FIRST_FILL, as_replay
from .series import interval_aggregates, log_returns, sample_mid

MINUTE = 60_000_000_000

DEFAULTS = dict(dt_ns=MINUTE, tau_ns=5 * MINUTE, n_bins=10,
                acf_window_ns=30 * MINUTE, flow_window_ns=5 * MINUTE,
                coarse_scale=10, intraday_bins=13, intraday_degree=2,
                acf_max_lag=20)

METRIC_IDS = (
    "returns.autocorr_lag1.30m",
    "returns.kurtosis.1m",
    "returns.kurtosis.10m",
    "returns.skewness.1m",
    "returns.moments",
    "returns.volatility_clustering",
    "returns.long_range_beta",
    "returns.volume_volatility",
    "returns.returns_volatility_corr",
    "returns.coarse_fine_asymmetry",
    "flow.order_counts.5m",
    "flow.interarrival",
    "flow.order_size.limit",
    "flow.order_size.market",
    "flow.relative_price",
    "flow.lifetime.cancelled",
    "flow.lifetime.first_fill",
    "flow.lifetime.completion",
    "flow.best_volume.bid",
    "flow.best_volume.ask",
    "flow.sign_autocorr",
    "flow.intraday_profile",
    "flow.volume_spread_corr",
    "impact.curve",
    "impact.alpha",
    "impact.beta",
    "cross.correlation",
    "cross.tail_correlation",
)

_MAX_STORED_SAMPLES = 5000


def _json_safe(value):
    if isinstance(value, dict):
        return {str(k): _json_safe(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_safe(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_json_safe(v) for v in value.tolist()]
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.floating,)):
        value = float(value)
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, DistributionFit):
        return _json_safe(value.to_dict())
    return value


def _entry(value=None, sample_count=0, warnings=(), **extra):
    out = {"value": _json_safe(value), "sample_count": int(sample_count),
           "warnings": [str(w) for w in warnings]}
    for key, payload in extra.items():
        out[key] = _json_safe(payload)
    return out


def _unavailable(reason):
    return _entry(warnings=[f"unavailable: {reason}"])


def _samples_payload(values):
    values = list(np.asarray(values, dtype=float))
    if len(values) > _MAX_STORED_SAMPLES:
        return None
    return [_json_safe(v) for v in values]


def compute_report(trace, session_open_ns=None, session_close_ns=None,
                   metrics="all", **overrides) -> dict:
    """Compute the metric catalog over one trace.

    `metrics` is "all" or an iterable of metric ids; everything else in the
    catalog is still present, marked unavailable ("not requested").
    """
    params = dict(DEFAULTS)
    unknown = set(overrides) - set(params)
    if unknown:
        raise ValueError(f"unknown parameters {sorted(unknown)}")
    params.update(overrides)
    if metrics == "all":
        requested = set(METRIC_IDS)
    else:
        requested = set(metrics)
        bad = requested - set(METRIC_IDS)
        if bad:
            raise ValueError(f"unknown metric ids {sorted(bad)}")

    span_open, span_close = trace.span() if len(trace) or (
        trace.session_open_ns is not None) else (0, 0)
    if session_open_ns is None:
        session_open_ns = span_open
    if session_close_ns is None:
        session_close_ns = span_close

    report = {"_meta": {
        "tool": "lobsim",
        "parameters": _json_safe({**params,
                                  "session_open_ns": session_open_ns,
                                  "session_close_ns": session_close_ns,
                                  "metrics": sorted(requested)}),
        "trace": {"events": len(trace), "config": _json_safe(trace.config)},
    }}

    state = _SharedState(trace, session_open_ns, session_close_ns, params)
    for metric_id in METRIC_IDS:
        if metric_id not in requested:
            report[metric_id] = _unavailable("not requested")
            continue
        builder = _BUILDERS[metric_id]
        try:
            report[metric_id] = builder(state)
        except Exception as exc:
            report[metric_id] = _entry(warnings=[f"error: {exc}"])
    return report


class _SharedState:
    """Lazily computed intermediates shared between metric builders."""

    def __init__(self, trace, open_ns, close_ns, params):
        self.trace = trace
        self.open_ns = open_ns
        self.close_ns = close_ns
        self.params = params
        self._cache = {}

    def mid_1m(self):
        if "mid" not in self._cache:
            series = sample_mid(self.trace, self.params["dt_ns"],
                                self.open_ns, self.close_ns)
            self._cache["mid"] = series.trim_leading_missing()
        return self._cache["mid"]

    def returns_1m(self):
        if "returns" not in self._cache:
            self._cache["returns"] = log_returns(self.mid_1m())
        return self._cache["returns"]

    def aggregates(self):
        if "agg" not in self._cache:
            self._cache["agg"] = interval_aggregates(
                self.trace, self.params["tau_ns"], self.params["dt_ns"],
                self.open_ns, self.close_ns)
        return self._cache["agg"]


def _autocorr_windows(state):
    dt = state.params["dt_ns"]
    window = state.params["acf_window_ns"]
    series = state.mid_1m()
    per_window = window // dt
    values = series.values
    corrs = []
    skipped = 0
    for i in range(0, len(values) - per_window + 1, per_window):
        chunk = values[i:i + per_window]
        try:
            r = np.diff(np.log(chunk))
            corrs.append(metrics_returns.autocorrelation(r, 1))
        except ValueError:
            skipped += 1
    if not corrs:
        raise ValueError("no window produced a defined lag-1 autocorrelation")
    edges = np.arange(-1.0, 1.0001, 0.05)
    hist, _ = np.histogram(corrs, bins=edges)
    warnings = [f"{skipped} windows skipped"] if skipped else []
    return _entry(value=float(np.mean(corrs)), sample_count=len(corrs),
                  warnings=warnings, samples=_samples_payload(corrs),
                  histogram={"bin_edges": edges, "counts": hist})


def _kurtosis_at(state, multiple):
    r = np.asarray(state.returns_1m().values)
    if multiple > 1:
        n = (len(r) // multiple) * multiple
        r = r[:n].reshape(-1, multiple).sum(axis=1)
    return _entry(value=metrics_returns.kurtosis(r), sample_count=len(r))


def _skewness_1m(state):
    r = state.returns_1m().values
    return _entry(value=metrics_returns.skewness(r), sample_count=len(r))


def _moments(state):
    moments = metrics_returns.moments_by_scale(state.mid_1m(), [1, 2, 5, 10])
    curve = {str(m.scale_ns): {"volatility": m.volatility, "skewness": m.skewness,
                               "kurtosis": m.kurtosis, "count": m.count}
             for m in moments}
    return _entry(value=None, sample_count=moments[0].count, curve=curve)


def _vol_clustering(state):
    lags = list(range(1, state.params["acf_max_lag"] + 1))
    curve = metrics_returns.volatility_clustering(state.returns_1m(), lags)
    return _entry(value=curve.values[0], sample_count=len(state.returns_1m().values),
                  curve={"lags": curve.lags, "values": curve.values})


def _long_range(state):
    lags = list(range(1, state.params["acf_max_lag"] + 1))
    decay = metrics_returns.long_range_dependence(state.returns_1m(), lags)
    warnings = [] if decay.applicable else ["not applicable: non-positive ACF values"]
    return _entry(value=decay.beta if decay.applicable else None,
                  sample_count=len(decay.lags), warnings=warnings,
                  curve={"lags": decay.lags, "acf_values": decay.acf_values},
                  fit={"beta": decay.beta, "r_squared": decay.r_squared,
                       "reference_band": decay.reference_band})


def _volume_volatility(state):
    alpha, beta, corr = metrics_returns.volume_volatility_relation(state.aggregates())
    return _entry(value=corr, sample_count=len(state.aggregates()),
                  fit={"alpha": alpha, "beta": beta})


def _returns_volatility(state):
    corr = metrics_returns.returns_volatility_correlation(state.aggregates())
    return _entry(value=corr, sample_count=len(state.aggregates()))


def _asymmetry(state):
    lags = list(range(0, 11))
    curve, mean = metrics_returns.volatility_flow_asymmetry(
        state.returns_1m(), state.params["coarse_scale"], lags)
    return _entry(value=mean, sample_count=len(state.returns_1m().values),
                  curve={"lags": curve.lags, "values": curve.values})


def _order_counts(state):
    dist = metrics_flow.order_count_distribution(
        state.trace, state.params["flow_window_ns"], state.open_ns, state.close_ns)
    fits = {k.lower(): v for k, v in dist.fits.items()}
    return _entry(value=float(dist.counts.mean()), sample_count=len(dist.counts),
                  samples=_samples_payload(dist.counts), fits=fits)


def _interarrival(state):
    dist = metrics_flow.interarrival_distribution(state.trace)
    warnings = []
    if dist.near_zero_dominated:
        warnings.append("near-zero gaps dominate: Weibull shape < 1")
    fits = {k.lower(): v for k, v in dist.fits.items()}
    return _entry(value=dist.fits[distfit.WEIBULL].params["shape"],
                  sample_count=len(dist.gaps_ns), warnings=warnings,
                  fits=fits, zero_gaps=dist.zero_gaps)


def _order_size(state, kind):
    fit, reference = metrics_flow.order_size_distribution(state.trace, kind)
    return _entry(value=fit.params["exponent"], sample_count=fit.sample_count,
                  fit=fit, reference=reference)


def _relative_price(state):
    dist = metrics_flow.relative_price_distribution(state.trace)
    warnings = []
    fit_payload = dist.fit
    value = None
    if isinstance(dist.fit, str):
        warnings.append(dist.fit)
        fit_payload = None
    else:
        value = dist.fit.params["exponent"]
    return _entry(value=value, sample_count=len(dist.deltas), warnings=warnings,
                  fit=fit_payload, histogram=dist.histogram,
                  skipped=dist.skipped,
                  at_or_through_touch=dist.at_or_through_touch,
                  reference=dist.reference_exponent)


def _lifetime(state, kind):
    dists = metrics_flow.lifetime_distributions(state.trace)
    entry = dists[kind]
    warnings = []
    fit_payload = entry["fit"]
    value = None
    if isinstance(fit_payload, str):
        warnings.append(fit_payload)
        fit_payload = None
    else:
        value = fit_payload.params["exponent"]
    return _entry(value=value, sample_count=entry["count"], warnings=warnings,
                  fit=fit_payload, reference=entry["reference_band"])


def _best_volume(state, side):
    out = metrics_flow.best_volume_distribution(
        state.trace, start_ns=state.open_ns, stop_ns=state.close_ns)[side]
    warnings = []
    fit_payload = out.fit
    value = None
    if isinstance(fit_payload, str):
        warnings.append(fit_payload)
        fit_payload = None
    else:
        value = fit_payload.params["shape"]
    return _entry(value=value,
                  sample_count=fit_payload.sample_count if fit_payload else 0,
                  warnings=warnings, fit=fit_payload,
                  excluded_snapshots=out.excluded_snapshots,
                  gamma_shape_leq_1=out.gamma_shape_leq_1)


def _sign_acf(state):
    curve = metrics_flow.order_flow_autocorrelation(
        state.trace, state.params["acf_max_lag"])
    return _entry(value=curve.values[0], sample_count=len(curve.lags),
                  curve={"lags": curve.lags, "values": curve.values})


def _intraday(state):
    profile = metrics_flow.intraday_profile(
        state.trace, state.params["intraday_bins"],
        state.params["intraday_degree"], state.open_ns, state.close_ns)
    return _entry(value=profile.quadratic[2], sample_count=len(profile.volumes),
                  curve={"bin_edges_ns": profile.bin_edges_ns,
                         "volumes": profile.volumes},
                  fit={"coefficients": profile.coefficients,
                       "degree": profile.degree,
                       "quadratic": profile.quadratic},
                  u_shape=profile.u_shape, inverted_u=profile.inverted_u)


def _volume_spread(state):
    corr = metrics_flow.volume_spread_correlation(state.aggregates())
    return _entry(value=corr, sample_count=len(state.aggregates()))


def _impact_curve(state):
    series = metrics_impact.participation_series(state.aggregates())
    bins = metrics_impact.impact_curve(series, state.params["n_bins"])
    payload = [{"index": b.index, "count": b.count,
                "mean_participation": b.mean_participation,
                "mean_move": b.mean_move} for b in bins]
    empty = sum(1 for b in bins if b.count == 0)
    warnings = [f"{empty} empty bins"] if empty else []
    return _entry(value=None, sample_count=len(series.participation),
                  warnings=warnings, curve={"bins": payload},
                  skipped_intervals=series.skipped)


def _impact_fit(state, field):
    series = metrics_impact.participation_series(state.aggregates())
    bins = metrics_impact.impact_curve(series, state.params["n_bins"])
    fit = metrics_impact.fit_impact(bins)
    return _entry(value=getattr(fit, field), sample_count=fit.bins_used,
                  fit={"alpha": fit.alpha, "beta": fit.beta,
                       "residual_norm": fit.residual_norm,
                       "bins_used": fit.bins_used,
                       "bins_excluded": fit.bins_excluded})


_BUILDERS = {
    "returns.autocorr_lag1.30m": _autocorr_windows,
    "returns.kurtosis.1m": lambda s: _kurtosis_at(s, 1),
    "returns.kurtosis.10m": lambda s: _kurtosis_at(s, 10),
    "returns.skewness.1m": _skewness_1m,
    "returns.moments": _moments,
    "returns.volatility_clustering": _vol_clustering,
    "returns.long_range_beta": _long_range,
    "returns.volume_volatility": _volume_volatility,
    "returns.returns_volatility_corr": _returns_volatility,
    "returns.coarse_fine_asymmetry": _asymmetry,
    "flow.order_counts.5m": _order_counts,
    "flow.interarrival": _interarrival,
    "flow.order_size.limit": lambda s: _order_size(s, "LIMIT"),
    "flow.order_size.market": lambda s: _order_size(s, "MARKET"),
    "flow.relative_price": _relative_price,
    "flow.lifetime.cancelled": lambda s: _lifetime(s, CANCELLED),
    "flow.lifetime.first_fill": lambda s: _lifetime(s, FIRST_FILL),
    "flow.lifetime.completion": lambda s: _lifetime(s, COMPLETION),
    "flow.best_volume.bid": lambda s: _best_volume(s, "bid"),
    "flow.best_volume.ask": lambda s: _best_volume(s, "ask"),
    "flow.sign_autocorr": _sign_acf,
    "flow.intraday_profile": _intraday,
    "flow.volume_spread_corr": _volume_spread,
    "impact.curve": _impact_curve,
    "impact.alpha": lambda s: _impact_fit(s, "alpha"),
    "impact.beta": lambda s: _impact_fit(s, "beta"),
    "cross.correlation": lambda s: _unavailable(
        "needs multiple aligned traces; use metrics_impact.correlation_matrix"),
    "cross.tail_correlation": lambda s: _unavailable(
        "needs multiple aligned traces; use metrics_impact.tail_correlation"),
}


def compare_reports(baseline: dict, candidate: dict) -> dict:
    """Per-metric differences between two reports.

    Numeric values get absolute and relative differences (relative to the
    baseline); entries that stored raw samples also get a two-sample KS
    distance. Ids present on one side only are listed separately.
    """
    base_ids = {k for k in baseline if not k.startswith("_")}
    cand_ids = {k for k in candidate if not k.startswith("_")}
    common = {}
    for metric_id in sorted(base_ids & cand_ids):
        b = baseline[metric_id]
        c = candidate[metric_id]
        row = {"baseline": b.get("value"), "candidate": c.get("value")}
        bv, cv = b.get("value"), c.get("value")
        if isinstance(bv, (int, float)) and isinstance(cv, (int, float)):
            row["abs_diff"] = abs(bv - cv)
            row["rel_diff"] = abs(bv - cv) / abs(bv) if bv != 0 else None
        bs, cs = b.get("samples"), c.get("samples")
        if bs and cs:
            row["ks_distance"] = _two_sample_ks(bs, cs)
        common[metric_id] = row
    return {"common": common,
            "only_baseline": sorted(base_ids - cand_ids),
            "only_candidate": sorted(cand_ids - base_ids)}


def _two_sample_ks(a, b) -> float:
    a = np.sort(np.asarray(a, dtype=float))
    b = np.sort(np.asarray(b, dtype=float))
    grid = np.concatenate([a, b])
    cdf_a = np.searchsorted(a, grid, side="right") / len(a)
    cdf_b = np.searchsorted(b, grid, side="right") / len(b)
    return float(np.max(np.abs(cdf_a - cdf_b)))
