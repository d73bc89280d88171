"""Maximum-likelihood fits and KS goodness-of-fit for positive samples.

Families: gamma, lognormal, Weibull, exponential, and continuous power law
(Pareto tail above a cutoff x_min). Gamma and Weibull shapes are solved by
bracketed 1-D root finding on the profile-likelihood score to |score| <=
1e-10; the power-law exponent has the closed form 1 + n / sum(ln(x/x_min)).
Integer-valued inputs (sizes, counts) are fitted with the continuous MLEs;
that approximation is deliberate and documented in the README.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import special

GAMMA = "GAMMA"
LOGNORMAL = "LOGNORMAL"
WEIBULL = "WEIBULL"
EXPONENTIAL = "EXPONENTIAL"
POWERLAW = "POWERLAW"

FAMILIES = (GAMMA, LOGNORMAL, WEIBULL, EXPONENTIAL, POWERLAW)

_SHAPE_LO = 1e-4
_SHAPE_HI = 1e4
_SCORE_TOL = 1e-10
_MAX_ITER = 200
MIN_SAMPLES = 30


class InsufficientDataError(ValueError):
    pass


class DegenerateSampleError(ValueError):
    pass


class ConvergenceError(RuntimeError):
    pass


@dataclass
class DistributionFit:
    family: str
    params: dict
    sample_count: int
    ks: float
    loglik: float
    zeros_dropped: int = 0
    warnings: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"family": self.family, "params": dict(self.params),
                "sample_count": self.sample_count, "ks": self.ks,
                "loglik": self.loglik, "zeros_dropped": self.zeros_dropped,
                "warnings": list(self.warnings)}


def _clean(samples):
    x = np.asarray(samples, dtype=float).ravel()
    if np.isnan(x).any() or np.isinf(x).any():
        raise ValueError("samples must be finite")
    if (x < 0).any():
        raise ValueError("samples must be non-negative")
    zeros = int((x == 0).sum())
    if zeros:
        x = x[x > 0]
    if len(x) < MIN_SAMPLES:
        raise InsufficientDataError(
            f"need at least {MIN_SAMPLES} positive samples, got {len(x)}")
    if x.min() == x.max():
        raise DegenerateSampleError("all samples equal; nothing to fit")
    return x, zeros


def _solve_score(score, lo=_SHAPE_LO, hi=_SHAPE_HI):
    """Bracketed bisection on a monotone score to |score| <= 1e-10."""
    f_lo, f_hi = score(lo), score(hi)
    if f_lo == 0:
        return lo
    if f_hi == 0:
        return hi
    if np.sign(f_lo) == np.sign(f_hi):
        raise ConvergenceError(
            f"shape root not bracketed in [{lo}, {hi}] "
            f"(score {f_lo:.3g} .. {f_hi:.3g})")
    for _ in range(_MAX_ITER):
        mid = np.sqrt(lo * hi)  # bisect in log space; shape spans 8 decades
        f_mid = score(mid)
        if abs(f_mid) <= _SCORE_TOL:
            return mid
        if np.sign(f_mid) == np.sign(f_lo):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    raise ConvergenceError("score root finding did not converge in 200 iterations")


# -- per-family MLE + log density -----------------------------------------

def _fit_exponential(x):
    rate = 1.0 / x.mean()
    return {"rate": rate}


def _fit_lognormal(x):
    logs = np.log(x)
    mu = logs.mean()
    sigma = float(np.sqrt(np.mean((logs - mu) ** 2)))
    if sigma == 0.0:
        raise DegenerateSampleError("zero log-variance")
    return {"mu": float(mu), "sigma": sigma}


def _fit_gamma(x):
    s = float(np.log(x.mean()) - np.log(x).mean())

    def score(k):
        return np.log(k) - special.digamma(k) - s

    shape = _solve_score(score)
    return {"shape": float(shape), "scale": float(x.mean() / shape)}


def _fit_weibull(x):
    # normalize by the max so y**k never overflows
    y = x / x.max()
    log_y = np.log(y)
    mean_log = log_y.mean()

    def score(k):
        w = y ** k
        return float((w * log_y).sum() / w.sum() - 1.0 / k - mean_log)

    shape = _solve_score(score)
    scale = float(x.max() * np.mean(y ** shape) ** (1.0 / shape))
    return {"shape": float(shape), "scale": scale}


def _fit_powerlaw(x, x_min):
    tail = x[x >= x_min]
    if len(tail) < 2:
        raise InsufficientDataError("fewer than 2 samples above x_min")
    denom = np.log(tail / x_min).sum()
    if denom <= 0:
        raise DegenerateSampleError("all tail samples equal x_min")
    exponent = 1.0 + len(tail) / denom  # this is 1 + mu
    return {"exponent": float(exponent), "x_min": float(x_min),
            "tail_count": int(len(tail))}


def log_likelihood(samples, family: str, params: dict) -> float:
    x = np.asarray(samples, dtype=float)
    x = x[x > 0]
    if family == EXPONENTIAL:
        rate = params["rate"]
        return float(len(x) * np.log(rate) - rate * x.sum())
    if family == LOGNORMAL:
        mu, sigma = params["mu"], params["sigma"]
        logs = np.log(x)
        return float(-logs.sum() - len(x) * np.log(sigma * np.sqrt(2 * np.pi))
                     - np.sum((logs - mu) ** 2) / (2 * sigma ** 2))
    if family == GAMMA:
        k, theta = params["shape"], params["scale"]
        return float((k - 1) * np.log(x).sum() - x.sum() / theta
                     - len(x) * (k * np.log(theta) + special.gammaln(k)))
    if family == WEIBULL:
        k, lam = params["shape"], params["scale"]
        z = x / lam
        return float(len(x) * np.log(k / lam) + (k - 1) * np.log(z).sum()
                     - np.sum(z ** k))
    if family == POWERLAW:
        alpha, x_min = params["exponent"], params["x_min"]
        tail = x[x >= x_min]
        return float(len(tail) * np.log((alpha - 1) / x_min)
                     - alpha * np.log(tail / x_min).sum())
    raise ValueError(f"unknown family {family!r}")


def cdf(x, family: str, params: dict):
    x = np.asarray(x, dtype=float)
    if family == EXPONENTIAL:
        return 1.0 - np.exp(-params["rate"] * x)
    if family == LOGNORMAL:
        return special.ndtr((np.log(x) - params["mu"]) / params["sigma"])
    if family == GAMMA:
        return special.gammainc(params["shape"], x / params["scale"])
    if family == WEIBULL:
        return 1.0 - np.exp(-((x / params["scale"]) ** params["shape"]))
    if family == POWERLAW:
        out = np.zeros_like(x)
        above = x >= params["x_min"]
        out[above] = 1.0 - (x[above] / params["x_min"]) ** (1.0 - params["exponent"])
        return out
    raise ValueError(f"unknown family {family!r}")


def ks_statistic(samples, fit: DistributionFit) -> float:
    """Sup distance between the empirical CDF and the fitted CDF.

    For power-law fits only the tail at or above x_min is compared, which
    is the usual convention for tail fits.
    """
    x = np.asarray(samples, dtype=float)
    x = x[x > 0]
    if fit.family == POWERLAW:
        x = x[x >= fit.params["x_min"]]
    if len(x) == 0:
        raise InsufficientDataError("no samples in the fitted support")
    x = np.sort(x)
    n = len(x)
    model = cdf(x, fit.family, fit.params)
    grid = np.arange(n, dtype=float)
    d_plus = np.max((grid + 1) / n - model)
    d_minus = np.max(model - grid / n)
    return float(max(d_plus, d_minus, 0.0))


_FITTERS = {
    EXPONENTIAL: _fit_exponential,
    LOGNORMAL: _fit_lognormal,
    GAMMA: _fit_gamma,
    WEIBULL: _fit_weibull,
}


def fit(samples, family: str, x_min=None) -> DistributionFit:
    """MLE fit of one family; zeros are dropped (count reported on the fit).

    For POWERLAW, x_min=None triggers a Clauset-style scan over candidate
    cutoffs (see choose_xmin).
    """
    if family not in FAMILIES:
        raise ValueError(f"unknown family {family!r}; options: {FAMILIES}")
    x, zeros = _clean(samples)
    notes = []
    if zeros:
        notes.append(f"dropped {zeros} zero samples")
    if family == POWERLAW:
        if x_min is None:
            x_min, xmin_note = choose_xmin(x)
            if xmin_note:
                notes.append(xmin_note)
        params = _fit_powerlaw(x, x_min)
        count = params["tail_count"]
    else:
        params = _FITTERS[family](x)
        count = len(x)
    result = DistributionFit(family, params, count, 0.0, 0.0, zeros, notes)
    result.ks = ks_statistic(x, result)
    result.loglik = log_likelihood(x, family, params)
    return result


def choose_xmin(samples, max_candidates: int = 60, min_tail: int = 8):
    """Power-law cutoff minimizing the tail KS distance (Clauset-style scan).

    With fewer than 100 samples the scan is unreliable; falls back to the
    sample minimum and says so. Returns (x_min, note_or_None).
    """
    x = np.asarray(samples, dtype=float)
    x = x[x > 0]
    if len(x) < 100:
        return float(x.min()), "fewer than 100 samples: x_min set to sample minimum"
    candidates = np.unique(x)
    # never leave fewer than min_tail points above the cutoff
    candidates = candidates[candidates <= np.sort(x)[-min_tail]]
    if len(candidates) > max_candidates:
        idx = np.linspace(0, len(candidates) - 1, max_candidates).astype(int)
        candidates = candidates[np.unique(idx)]
    best = (np.inf, float(x.min()))
    for cand in candidates:
        try:
            params = _fit_powerlaw(x, cand)
        except (InsufficientDataError, DegenerateSampleError):
            continue
        probe = DistributionFit(POWERLAW, params, params["tail_count"], 0.0, 0.0)
        d = ks_statistic(x, probe)
        if d < best[0]:
            best = (d, float(cand))
    return best[1], None
