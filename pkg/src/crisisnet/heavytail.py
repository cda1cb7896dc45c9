"""Tail fitting for activity and degree samples.

Four families over a common tail x >= x_min: power law x^-gamma, truncated
power law x^-gamma * exp(-lambda_c x), lognormal, and exponential.  Discrete
samples (counts, degrees) use proper probability mass functions — zeta-
normalized for the power law, CDF differences for the lognormal, shifted
geometric for the exponential — so log-likelihoods of different families are
comparable on the same dominating measure.  Continuous variants back the
synthetic-data tests, where closed forms exist.

x_min selection follows the usual recipe: scan the distinct sample values,
fit the power law to each candidate tail, and keep the candidate whose
fitted CDF is closest to the empirical CDF in sup norm (ties to the smaller
candidate).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import integrate, optimize, special

from . import _kernels
from .errors import (
    ConvergenceError,
    DegenerateSampleError,
    FitError,
    InsufficientTailError,
)

FAMILIES = ("power_law", "truncated_power_law", "lognormal", "exponential")

MIN_TAIL = 10
XMIN_PERCENTILE = 90.0
SIGNIFICANCE = 0.05
_GAMMA_BOUNDS = (1.0 + 1e-9, 25.0)


@dataclass(eq=False)
class TailSample:
    """Positive sample values; `is_discrete` picks pmf vs density fitting."""

    values: np.ndarray
    is_discrete: bool = True

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.float64)
        if vals.size == 0:
            raise ValueError("empty sample")
        if np.any(vals < 1):
            raise ValueError("sample values must be >= 1")
        if self.is_discrete and not np.all(vals == np.floor(vals)):
            raise ValueError("discrete sample contains non-integers")
        self.values = vals

    @property
    def n(self) -> int:
        return len(self.values)

    @classmethod
    def from_degrees(cls, degrees: np.ndarray) -> "TailSample":
        """Degree sample; zero-degree nodes carry no tail information and are dropped."""
        d = np.asarray(degrees, dtype=np.int64)
        return cls(d[d >= 1].astype(np.float64), is_discrete=True)


@dataclass(eq=False)
class FitResult:
    family: str
    params: dict[str, float]
    x_min: float
    n_tail: int
    loglik: float
    ks: float
    gamma_se: float | None = None
    is_discrete: bool = True
    _log_norm: float | None = field(default=None, repr=False)


@dataclass(eq=False)
class ComparisonResult:
    family_a: str
    family_b: str
    ratio: float        # R = sum of per-point log-likelihood differences
    z: float            # R normalized by its empirical standard deviation
    p_value: float
    preferred: str      # family name or "indistinguishable"
    zero_variance: bool = False


# ---------------------------------------------------------------------------
# helpers
# ---------------------------------------------------------------------------

def _tail(sample: TailSample, x_min: float) -> np.ndarray:
    vals = sample.values[sample.values >= x_min]
    if len(vals) < MIN_TAIL:
        raise InsufficientTailError(
            f"only {len(vals)} points at or above x_min={x_min}; need {MIN_TAIL}"
        )
    if np.all(vals == vals[0]):
        raise DegenerateSampleError("all tail values are identical")
    return vals


def _log_diff(log_a: np.ndarray, log_b: np.ndarray) -> np.ndarray:
    """log(exp(log_a) - exp(log_b)) for log_a >= log_b, elementwise."""
    with np.errstate(divide="ignore", invalid="ignore"):
        out = log_a + np.log1p(-np.exp(np.minimum(log_b - log_a, 0.0)))
    return np.where(log_b >= log_a, -np.inf, out)


def _ks_stat(tail: np.ndarray, ccdf_incl: Callable, ccdf_excl: Callable) -> float:
    """Sup distance between empirical and model tail CDFs at the data steps."""
    vals, counts = np.unique(tail, return_counts=True)
    n = counts.sum()
    suffix = np.concatenate([np.cumsum(counts[::-1])[::-1], [0]])
    emp_incl = suffix[:-1] / n   # P_hat(X >= v)
    emp_excl = suffix[1:] / n    # P_hat(X > v)
    model_incl = ccdf_incl(vals)
    model_excl = ccdf_excl(vals)
    return float(
        max(np.max(np.abs(emp_incl - model_incl)), np.max(np.abs(emp_excl - model_excl)))
    )


def _fd_gamma_se(negloglik: Callable, theta: np.ndarray, index: int = 0) -> float:
    """Asymptotic SE of theta[index] from a finite-difference observed information."""
    p = len(theta)
    h = np.maximum(1e-5, 1e-5 * np.abs(theta))
    hess = np.empty((p, p))
    with np.errstate(all="ignore"):
        for i in range(p):
            for j in range(i, p):
                ei = np.zeros(p)
                ej = np.zeros(p)
                ei[i] = h[i]
                ej[j] = h[j]
                fpp = negloglik(theta + ei + ej)
                fpm = negloglik(theta + ei - ej)
                fmp = negloglik(theta - ei + ej)
                fmm = negloglik(theta - ei - ej)
                hess[i, j] = hess[j, i] = (fpp - fpm - fmp + fmm) / (4 * h[i] * h[j])
    if not np.all(np.isfinite(hess)):
        return math.nan
    try:
        cov = np.linalg.inv(hess)
        var = cov[index, index]
    except np.linalg.LinAlgError:
        return math.nan
    return math.sqrt(var) if var > 0 else math.nan


# ---------------------------------------------------------------------------
# power law
# ---------------------------------------------------------------------------

def _zeta(gamma: float, q) -> np.ndarray:
    return special.zeta(gamma, q)


def _fit_pl_discrete(tail: np.ndarray, x_min: float) -> tuple[float, float]:
    """Zeta-normalized discrete MLE; returns (gamma, loglik)."""
    n = len(tail)
    log_sum = float(np.sum(np.log(tail)))

    def neg(gamma: float) -> float:
        return n * math.log(_zeta(gamma, x_min)) + gamma * log_sum

    res = optimize.minimize_scalar(
        neg, bounds=_GAMMA_BOUNDS, method="bounded", options={"xatol": 1e-12}
    )
    if not res.success:
        raise ConvergenceError("discrete power-law MLE did not converge", trace=res)
    return float(res.x), -float(res.fun)


def fit_power_law(
    sample: TailSample,
    x_min: float | None = None,
    bootstrap: int | None = None,
    seed: int = 0,
) -> FitResult:
    """Power-law tail fit; selects x_min by KS scan when not given.

    The standard error defaults to the asymptotic (gamma-1)/sqrt(n_tail);
    `bootstrap` switches to the spread of gamma over that many resamples.
    """
    if x_min is None:
        x_min = select_xmin(sample)
    tail = _tail(sample, x_min)
    n = len(tail)
    if sample.is_discrete:
        gamma, loglik = _fit_pl_discrete(tail, x_min)
        log_norm = math.log(_zeta(gamma, x_min))

        def ccdf_incl(v):
            return _zeta(gamma, v) / math.exp(log_norm)

        def ccdf_excl(v):
            return _zeta(gamma, v + 1.0) / math.exp(log_norm)

    else:
        denom = float(np.sum(np.log(tail / x_min)))
        if denom <= 0.0:
            raise DegenerateSampleError("zero spread in log space")
        gamma = 1.0 + n / denom
        # density C x^-gamma with C = (gamma-1) * x_min^(gamma-1)
        log_norm = -math.log(gamma - 1.0) - (gamma - 1.0) * math.log(x_min)
        loglik = float(np.sum(-gamma * np.log(tail)) - n * log_norm)

        def ccdf_incl(v):
            return (v / x_min) ** (1.0 - gamma)

        ccdf_excl = ccdf_incl

    ks = _ks_stat(tail, ccdf_incl, ccdf_excl)
    se = (gamma - 1.0) / math.sqrt(n)
    if bootstrap:
        rng = np.random.default_rng(seed)
        draws = []
        for _ in range(bootstrap):
            re = rng.choice(tail, size=n, replace=True)
            if np.all(re == re[0]):
                continue
            if sample.is_discrete:
                draws.append(_fit_pl_discrete(re, x_min)[0])
            else:
                d = float(np.sum(np.log(re / x_min)))
                draws.append(1.0 + n / d)
        if len(draws) >= 2:
            se = float(np.std(draws, ddof=1))
    return FitResult(
        family="power_law",
        params={"gamma": gamma},
        x_min=float(x_min),
        n_tail=n,
        loglik=loglik,
        ks=ks,
        gamma_se=se,
        is_discrete=sample.is_discrete,
        _log_norm=log_norm,
    )


def select_xmin(sample: TailSample) -> float:
    """KS-minimizing tail start over the distinct values (ties -> smaller).

    Candidates stop at the 90th percentile so at least a tenth of the data
    stays in the tail; candidates whose tail is shorter than MIN_TAIL or
    degenerate are skipped.  The result does not depend on input order.
    """
    vals, counts = np.unique(sample.values, return_counts=True)
    if len(vals) < 2:
        raise DegenerateSampleError("x_min selection needs >= 2 distinct values")
    cap = np.percentile(sample.values, XMIN_PERCENTILE)
    cand_end = int(np.searchsorted(vals, cap, side="right"))
    cand_end = max(cand_end, 1)
    suffix_cnt = np.concatenate([np.cumsum(counts[::-1])[::-1], [0]])

    best_ks = math.inf
    best_xmin: float | None = None
    any_tail = False
    if sample.is_discrete:
        log_vals = np.log(vals)
        suffix_logsum = np.concatenate([np.cumsum((counts * log_vals)[::-1])[::-1], [0.0]])
        for c in range(cand_end):
            n_tail = int(suffix_cnt[c])
            if n_tail < MIN_TAIL:
                continue
            any_tail = True
            if c == len(vals) - 1:
                continue  # single distinct value in the tail
            x_min = float(vals[c])
            log_sum = float(suffix_logsum[c])

            def neg(gamma: float) -> float:
                return n_tail * math.log(_zeta(gamma, x_min)) + gamma * log_sum

            res = optimize.minimize_scalar(
                neg, bounds=_GAMMA_BOUNDS, method="bounded", options={"xatol": 1e-10}
            )
            gamma = float(res.x)
            z0 = _zeta(gamma, x_min)
            tail_vals = vals[c:]
            model_incl = _zeta(gamma, tail_vals) / z0
            model_excl = _zeta(gamma, tail_vals + 1.0) / z0
            emp_incl = suffix_cnt[c:-1] / n_tail
            emp_excl = suffix_cnt[c + 1:] / n_tail
            ks = max(
                float(np.max(np.abs(emp_incl - model_incl))),
                float(np.max(np.abs(emp_excl - model_excl))),
            )
            if ks < best_ks:
                best_ks = ks
                best_xmin = x_min
    else:
        _, ks_arr, ntail_arr = _kernels.pl_ks_scan(
            vals, counts.astype(np.int64), cand_end
        )
        for c in range(cand_end):
            if ntail_arr[c] < MIN_TAIL:
                continue
            any_tail = True
            if math.isfinite(ks_arr[c]) and ks_arr[c] < best_ks:
                best_ks = float(ks_arr[c])
                best_xmin = float(vals[c])

    if best_xmin is None:
        if any_tail:
            raise DegenerateSampleError("every candidate tail is degenerate")
        raise InsufficientTailError(
            f"no x_min candidate leaves >= {MIN_TAIL} tail points"
        )
    return best_xmin if not sample.is_discrete else float(int(best_xmin))


# ---------------------------------------------------------------------------
# truncated power law
# ---------------------------------------------------------------------------

_TPL_SUM_TERMS = 100_000


def _tpl_log_norm_discrete(gamma: float, lam: float, x_min: float) -> float:
    """log sum_{k>=x_min} k^-gamma e^-lam*k, explicit head + Euler-Maclaurin tail."""
    k = np.arange(x_min, x_min + _TPL_SUM_TERMS, dtype=np.float64)
    with np.errstate(over="ignore"):
        head = float(np.sum(np.exp(-gamma * np.log(k) - lam * k)))
    a = float(x_min + _TPL_SUM_TERMS)
    fa = math.exp(-gamma * math.log(a) - lam * a) if lam * a < 700 else 0.0
    if fa > 0.0:
        integral, _ = integrate.quad(
            lambda x: math.exp(-gamma * math.log(x) - lam * x), a, np.inf, limit=200
        )
        # sum_{k>=a} f(k) ~ integral + f(a)/2 - f'(a)/12
        fprime = fa * (-(gamma / a) - lam)
        tail = integral + 0.5 * fa - fprime / 12.0
    else:
        tail = 0.0
    total = head + tail
    if total <= 0.0 or not math.isfinite(total):
        return math.inf
    return math.log(total)


def _tpl_log_norm_continuous(gamma: float, lam: float, x_min: float) -> float:
    integral, _ = integrate.quad(
        lambda x: math.exp(-gamma * math.log(x) - lam * x), x_min, np.inf, limit=200
    )
    if integral <= 0.0 or not math.isfinite(integral):
        return math.inf
    return math.log(integral)


def _minimize_with_restarts(neg, x0: np.ndarray, what: str, attempts: int = 3):
    """Nelder-Mead with restarts.

    Heavy-tailed samples can put the optimum far from the moment-based start
    (the lognormal mu, in particular, may sit dozens of units away), and a
    single simplex run sometimes exhausts its budget while still crawling
    along a shallow valley.  Restart from the incumbent; accept a failed run
    whose improvement over the previous one has stalled below tolerance.
    """
    opts = {"xatol": 1e-8, "fatol": 1e-10, "maxiter": 4000, "maxfev": 8000}
    best = None
    for _ in range(attempts):
        res = optimize.minimize(neg, x0, method="Nelder-Mead", options=opts)
        if res.success:
            return res
        if best is not None and best.fun - res.fun <= abs(res.fun) * 1e-12 + 1e-10:
            return res  # stalled: treat the plateau as converged
        best = res
        x0 = res.x
    raise ConvergenceError(f"{what} fit did not converge", trace=best)


def fit_truncated_power_law(sample: TailSample, x_min: float) -> FitResult:
    """MLE of x^-gamma * exp(-lambda_c x) on the tail, by Nelder-Mead.

    The normalizing constant is summed/integrated to a relative tolerance of
    about 1e-10, so likelihoods are comparable across families.
    """
    tail = _tail(sample, x_min)
    n = len(tail)
    sum_log = float(np.sum(np.log(tail)))
    sum_x = float(np.sum(tail))
    log_norm_fn = _tpl_log_norm_discrete if sample.is_discrete else _tpl_log_norm_continuous

    def neg(theta: np.ndarray) -> float:
        gamma, log_lam = theta
        if not (-5.0 <= gamma <= 30.0) or not (-25.0 <= log_lam <= 4.0):
            return np.inf
        lam = math.exp(log_lam)
        log_norm = log_norm_fn(gamma, lam, x_min)
        if not math.isfinite(log_norm):
            return np.inf
        return gamma * sum_log + lam * sum_x + n * log_norm

    try:
        gamma0 = fit_power_law(sample, x_min).params["gamma"]
    except FitError:
        gamma0 = 2.0
    gamma0 = min(gamma0, 10.0)
    lam0 = 1.0 / float(np.mean(tail))
    res = _minimize_with_restarts(
        neg, np.array([gamma0, math.log(lam0)]), "truncated power-law"
    )
    gamma, log_lam = float(res.x[0]), float(res.x[1])
    lam = math.exp(log_lam)
    log_norm = log_norm_fn(gamma, lam, x_min)
    loglik = -float(res.fun)

    def neg_natural(theta: np.ndarray) -> float:
        g, l = theta
        if l <= 0:
            return np.inf
        return neg(np.array([g, math.log(l)]))

    se = _fd_gamma_se(neg_natural, np.array([gamma, lam]), index=0)
    fit = FitResult(
        family="truncated_power_law",
        params={"gamma": gamma, "lambda_c": lam},
        x_min=float(x_min),
        n_tail=n,
        loglik=loglik,
        ks=math.nan,
        gamma_se=se,
        is_discrete=sample.is_discrete,
        _log_norm=log_norm,
    )
    fit.ks = _ks_stat(tail, lambda v: model_ccdf(fit, v), lambda v: model_ccdf(fit, v + 1.0) if sample.is_discrete else model_ccdf(fit, v))
    return fit


# ---------------------------------------------------------------------------
# lognormal
# ---------------------------------------------------------------------------

def fit_lognormal(sample: TailSample, x_min: float) -> FitResult:
    """Tail-truncated lognormal MLE (CDF-difference pmf when discrete)."""
    tail = _tail(sample, x_min)
    n = len(tail)
    log_tail = np.log(tail)

    if sample.is_discrete:
        def neg(theta: np.ndarray) -> float:
            mu, log_sigma = theta
            if not (-15.0 <= log_sigma <= 8.0):
                return np.inf
            sigma = math.exp(log_sigma)
            a = (log_tail - mu) / sigma
            b = (np.log(tail + 1.0) - mu) / sigma
            log_pmf = _log_diff(special.log_ndtr(-a), special.log_ndtr(-b))
            log_norm = special.log_ndtr(-(math.log(x_min) - mu) / sigma)
            total = float(np.sum(log_pmf)) - n * float(log_norm)
            return np.inf if not math.isfinite(total) else -total
    else:
        def neg(theta: np.ndarray) -> float:
            mu, log_sigma = theta
            if not (-15.0 <= log_sigma <= 8.0):
                return np.inf
            sigma = math.exp(log_sigma)
            a = (log_tail - mu) / sigma
            ll = -0.5 * a * a - log_tail - log_sigma - 0.5 * math.log(2 * math.pi)
            log_norm = special.log_ndtr(-(math.log(x_min) - mu) / sigma)
            total = float(np.sum(ll)) - n * float(log_norm)
            return np.inf if not math.isfinite(total) else -total

    mu0 = float(np.mean(log_tail))
    s0 = float(np.std(log_tail))
    if s0 <= 0:
        raise DegenerateSampleError("zero spread in log space")
    res = _minimize_with_restarts(neg, np.array([mu0, math.log(s0)]), "lognormal")
    mu, sigma = float(res.x[0]), math.exp(float(res.x[1]))
    fit = FitResult(
        family="lognormal",
        params={"mu": mu, "sigma_ln": sigma},
        x_min=float(x_min),
        n_tail=n,
        loglik=-float(res.fun),
        ks=math.nan,
        gamma_se=None,
        is_discrete=sample.is_discrete,
    )
    fit.ks = _ks_stat(
        tail,
        lambda v: model_ccdf(fit, v),
        (lambda v: model_ccdf(fit, v + 1.0)) if sample.is_discrete else (lambda v: model_ccdf(fit, v)),
    )
    return fit


# ---------------------------------------------------------------------------
# exponential
# ---------------------------------------------------------------------------

def fit_exponential(sample: TailSample, x_min: float) -> FitResult:
    """Closed-form exponential tail MLE (shifted geometric when discrete)."""
    tail = _tail(sample, x_min)
    n = len(tail)
    mean_excess = float(np.mean(tail - x_min))
    if mean_excess <= 0:
        raise DegenerateSampleError("no spread above x_min")
    if sample.is_discrete:
        q = mean_excess / (1.0 + mean_excess)
        rate = -math.log(q)
        loglik = n * math.log(1.0 - q) + math.log(q) * float(np.sum(tail - x_min))
    else:
        rate = 1.0 / mean_excess
        loglik = n * math.log(rate) - rate * float(np.sum(tail - x_min))
    fit = FitResult(
        family="exponential",
        params={"lambda_e": rate},
        x_min=float(x_min),
        n_tail=n,
        loglik=loglik,
        ks=math.nan,
        gamma_se=None,
        is_discrete=sample.is_discrete,
    )
    fit.ks = _ks_stat(
        tail,
        lambda v: model_ccdf(fit, v),
        (lambda v: model_ccdf(fit, v + 1.0)) if sample.is_discrete else (lambda v: model_ccdf(fit, v)),
    )
    return fit


FITTERS: dict[str, Callable] = {
    "power_law": fit_power_law,
    "truncated_power_law": fit_truncated_power_law,
    "lognormal": fit_lognormal,
    "exponential": fit_exponential,
}


# ---------------------------------------------------------------------------
# pointwise model evaluation (shared by comparison, KS, plotting, tests)
# ---------------------------------------------------------------------------

def loglik_points(fit: FitResult, x: np.ndarray) -> np.ndarray:
    """Log pmf/density of the fitted tail model at x (x >= x_min assumed)."""
    x = np.asarray(x, dtype=np.float64)
    p = fit.params
    if fit.family == "power_law":
        if fit.is_discrete:
            return -p["gamma"] * np.log(x) - math.log(_zeta(p["gamma"], fit.x_min))
        c = math.log(p["gamma"] - 1.0) - math.log(fit.x_min)
        return c - p["gamma"] * (np.log(x) - math.log(fit.x_min))
    if fit.family == "truncated_power_law":
        log_norm = fit._log_norm
        if log_norm is None:
            fn = _tpl_log_norm_discrete if fit.is_discrete else _tpl_log_norm_continuous
            log_norm = fn(p["gamma"], p["lambda_c"], fit.x_min)
        return -p["gamma"] * np.log(x) - p["lambda_c"] * x - log_norm
    if fit.family == "lognormal":
        mu, sigma = p["mu"], p["sigma_ln"]
        log_norm = special.log_ndtr(-(math.log(fit.x_min) - mu) / sigma)
        if fit.is_discrete:
            a = (np.log(x) - mu) / sigma
            b = (np.log(x + 1.0) - mu) / sigma
            return _log_diff(special.log_ndtr(-a), special.log_ndtr(-b)) - log_norm
        a = (np.log(x) - mu) / sigma
        return -0.5 * a * a - np.log(x) - math.log(sigma) - 0.5 * math.log(2 * math.pi) - log_norm
    if fit.family == "exponential":
        rate = p["lambda_e"]
        if fit.is_discrete:
            q = math.exp(-rate)
            return math.log(1.0 - q) - rate * (x - fit.x_min)
        return math.log(rate) - rate * (x - fit.x_min)
    raise ValueError(f"unknown family {fit.family!r}")


def model_ccdf(fit: FitResult, x: np.ndarray) -> np.ndarray:
    """P(X >= x) for discrete fits, P(X > x) for continuous fits."""
    x = np.asarray(x, dtype=np.float64)
    scalar = x.ndim == 0
    x = np.atleast_1d(x)
    p = fit.params
    if fit.family == "power_law":
        if fit.is_discrete:
            out = _zeta(p["gamma"], x) / _zeta(p["gamma"], fit.x_min)
        else:
            out = (x / fit.x_min) ** (1.0 - p["gamma"])
    elif fit.family == "exponential":
        rate = p["lambda_e"]
        out = np.exp(-rate * (x - fit.x_min))
    elif fit.family == "lognormal":
        mu, sigma = p["mu"], p["sigma_ln"]
        log_norm = special.log_ndtr(-(math.log(fit.x_min) - mu) / sigma)
        out = np.exp(special.log_ndtr(-(np.log(x) - mu) / sigma) - log_norm)
    elif fit.family == "truncated_power_law":
        gamma, lam = p["gamma"], p["lambda_c"]
        log_norm = fit._log_norm
        fn = _tpl_log_norm_discrete if fit.is_discrete else _tpl_log_norm_continuous
        if log_norm is None:
            log_norm = fn(gamma, lam, fit.x_min)
        if fit.is_discrete:
            # cumulative pmf on the integer grid up to the largest query point
            top = int(x.max())
            if top - fit.x_min > 10_000_000:
                out = np.array([math.exp(fn(gamma, lam, v) - log_norm) for v in x])
            else:
                grid = np.arange(fit.x_min, top + 1, dtype=np.float64)
                pmf = np.exp(-gamma * np.log(grid) - lam * grid - log_norm)
                below = np.concatenate([[0.0], np.cumsum(pmf)[:-1]])
                out = 1.0 - below[(x - fit.x_min).astype(np.int64)]
        else:
            # cumulative mass between consecutive query points, then the rest
            order = np.argsort(x)
            xs = x[order]
            f = lambda t: math.exp(-gamma * math.log(t) - lam * t)
            pieces = [
                integrate.quad(f, a, b, limit=200)[0]
                for a, b in zip(xs[:-1], xs[1:])
            ]
            above_last = integrate.quad(f, xs[-1], np.inf, limit=200)[0]
            mass_above = (above_last + np.concatenate([np.cumsum(pieces[::-1])[::-1], [0.0]]))
            out = np.empty_like(xs)
            out[order] = mass_above / math.exp(log_norm)
    else:
        raise ValueError(f"unknown family {fit.family!r}")
    out = np.clip(out, 0.0, 1.0)
    return float(out[0]) if scalar else out


# ---------------------------------------------------------------------------
# pairwise comparison
# ---------------------------------------------------------------------------

def compare(
    sample: TailSample, x_min: float, family_a: str, family_b: str
) -> ComparisonResult:
    """Vuong-style normalized log-likelihood ratio on the shared tail.

    R > 0 favors family_a; "preferred" is set only when the two-sided normal
    p-value clears the 0.05 level.  Zero variance of the per-point
    differences (e.g. identical families) is flagged, not an error.
    """
    for fam in (family_a, family_b):
        if fam not in FITTERS:
            raise ValueError(f"unknown family {fam!r}")
    fit_a = FITTERS[family_a](sample, x_min)
    fit_b = FITTERS[family_b](sample, x_min)
    if fit_a.n_tail != fit_b.n_tail or fit_a.x_min != fit_b.x_min:
        raise FitError("fits do not share a tail")
    tail = _tail(sample, x_min)
    la = loglik_points(fit_a, tail)
    lb = loglik_points(fit_b, tail)
    diff = la - lb
    ratio = float(np.sum(diff))
    n = len(diff)
    var = float(np.mean(diff * diff) - np.mean(diff) ** 2)
    if var <= 0.0 or not math.isfinite(var):
        return ComparisonResult(
            family_a, family_b, ratio, 0.0, 1.0, "indistinguishable", zero_variance=True
        )
    z = ratio / math.sqrt(n * var)
    p = 2.0 * float(special.ndtr(-abs(z)))
    if p < SIGNIFICANCE:
        preferred = family_a if ratio > 0 else family_b
    else:
        preferred = "indistinguishable"
    return ComparisonResult(family_a, family_b, ratio, z, p, preferred)


# ---------------------------------------------------------------------------
# empirical CCDF and the fit report
# ---------------------------------------------------------------------------

def ccdf(sample: TailSample) -> tuple[np.ndarray, np.ndarray]:
    """Distinct values ascending with P(X >= value); strictly decreasing."""
    vals, counts = np.unique(sample.values, return_counts=True)
    suffix = np.cumsum(counts[::-1])[::-1]
    return vals, suffix / sample.n


def write_ccdf_csv(sample: TailSample, path) -> None:
    vals, cc = ccdf(sample)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("value,ccdf\n")
        for v, c in zip(vals.tolist(), cc.tolist()):
            v_txt = str(int(v)) if sample.is_discrete else repr(float(v))
            fh.write(f"{v_txt},{repr(float(c))}\n")


def fit_report(
    sample: TailSample,
    families: tuple[str, ...] = FAMILIES,
    x_min: float | None = None,
) -> dict:
    """Fit every requested family on one shared tail plus the pairwise matrix."""
    if x_min is None:
        x_min = select_xmin(sample)
    report: dict = {
        "x_min": float(x_min),
        "n": sample.n,
        "is_discrete": sample.is_discrete,
        "fits": {},
        "comparisons": [],
    }
    fitted: list[str] = []
    for fam in families:
        try:
            fit = FITTERS[fam](sample, x_min)
        except (FitError, DegenerateSampleError, InsufficientTailError) as exc:
            report["fits"][fam] = {"error": str(exc)}
            continue
        fitted.append(fam)
        entry = {
            "params": {k: float(v) for k, v in fit.params.items()},
            "n_tail": fit.n_tail,
            "loglik": float(fit.loglik),
            "ks": float(fit.ks),
        }
        if fit.gamma_se is not None:
            entry["gamma_se"] = float(fit.gamma_se)
        report["fits"][fam] = entry
    for i, fam_a in enumerate(fitted):
        for fam_b in fitted[i + 1:]:
            cmp = compare(sample, x_min, fam_a, fam_b)
            report["comparisons"].append(
                {
                    "family_a": cmp.family_a,
                    "family_b": cmp.family_b,
                    "ratio": float(cmp.ratio),
                    "z": float(cmp.z),
                    "p_value": float(cmp.p_value),
                    "preferred": cmp.preferred,
                }
            )
    return report
