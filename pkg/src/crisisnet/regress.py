"""Activity regressions: univariate polynomial models and left-censored tobit.

The tobit log-likelihood mixes Gaussian density terms for rows above the
censor point with normal-CDF terms for rows at or below it, and is maximized
by Newton steps on (beta, log sigma) with an analytic gradient, a finite-
difference Hessian, and a backtracking line search.  Regressors are
standardized internally for conditioning; estimates, standard errors and
confidence intervals are reported on the original scale.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import ConvergenceError, DegenerateSampleError, SingularDesignError

Z_95 = 1.959964  # two-sided 95% normal quantile


# ---------------------------------------------------------------------------
# univariate polynomial models
# ---------------------------------------------------------------------------

@dataclass(eq=False)
class UnivariateFit:
    order: int
    coef: np.ndarray          # theta_0 .. theta_order
    sigma: float              # residual scale, n - p denominator
    cov: np.ndarray           # coefficient covariance
    n: int
    loglik: float             # Gaussian ML (sigma^2 at the MLE RSS/n)
    rss: float
    x_range: tuple[float, float]

    def predict(self, x: np.ndarray) -> np.ndarray:
        return np.vander(np.asarray(x, dtype=np.float64), self.order + 1, increasing=True) @ self.coef


@dataclass(eq=False)
class PredictionBand:
    x: np.ndarray
    mean: np.ndarray
    lo: np.ndarray
    hi: np.ndarray


def fit_polynomial(y: np.ndarray, x: np.ndarray, order: int) -> UnivariateFit:
    """Least-squares polynomial fit with covariance sigma^2 (X'X)^-1."""
    if order not in (1, 2):
        raise ValueError("order must be 1 or 2")
    y = np.asarray(y, dtype=np.float64)
    x = np.asarray(x, dtype=np.float64)
    n = len(y)
    if len(x) != n:
        raise ValueError("y and x lengths differ")
    p = order + 1
    if n <= p:
        raise ValueError(f"need more than {p} points for an order-{order} fit")
    X = np.vander(x, p, increasing=True)
    if np.linalg.matrix_rank(X) < p:
        raise SingularDesignError("design matrix is rank-deficient (constant x?)")
    coef, _, _, _ = np.linalg.lstsq(X, y, rcond=None)
    resid = y - X @ coef
    rss = float(resid @ resid)
    sigma = math.sqrt(rss / (n - p))
    cov = (rss / (n - p)) * np.linalg.inv(X.T @ X)
    if rss > 0.0:
        loglik = -0.5 * n * (math.log(2 * math.pi * rss / n) + 1.0)
    else:
        loglik = math.inf
    return UnivariateFit(
        order=order,
        coef=coef,
        sigma=sigma,
        cov=cov,
        n=n,
        loglik=loglik,
        rss=rss,
        x_range=(float(x.min()), float(x.max())),
    )


def lr_test(fit_lin: UnivariateFit, fit_quad: UnivariateFit) -> tuple[float, float]:
    """Likelihood-ratio statistic (1 df) and p-value for quadratic vs linear."""
    if fit_quad.rss <= 0.0:
        stat = 0.0 if fit_lin.rss <= 0.0 else math.inf
    else:
        stat = max(0.0, fit_lin.n * math.log(fit_lin.rss / fit_quad.rss))
    p = float(special.chdtrc(1, stat)) if math.isfinite(stat) else 0.0
    return stat, p


def select_model(fit_lin: UnivariateFit, fit_quad: UnivariateFit) -> UnivariateFit:
    """Quadratic iff the 1-df likelihood-ratio test clears 0.05."""
    if fit_lin.order != 1 or fit_quad.order != 2:
        raise ValueError("select_model expects (linear fit, quadratic fit)")
    if fit_lin.n != fit_quad.n or fit_lin.x_range != fit_quad.x_range:
        raise ValueError("fits are not on identical data")
    _, p = lr_test(fit_lin, fit_quad)
    return fit_quad if p < 0.05 else fit_lin


def prediction_band(
    fit: UnivariateFit, x_grid: np.ndarray, level: float = 0.95
) -> PredictionBand:
    """Mean-response confidence band y_hat +- z * sqrt(g' Cov g)."""
    x_grid = np.asarray(x_grid, dtype=np.float64)
    lo_x, hi_x = fit.x_range
    half = (hi_x - lo_x) / 2.0
    mid = (lo_x + hi_x) / 2.0
    if np.any(x_grid < mid - 1.5 * half) or np.any(x_grid > mid + 1.5 * half):
        raise ValueError("grid extends beyond 1.5x the observed x range")
    z = float(special.ndtri(0.5 + level / 2.0))
    G = np.vander(x_grid, fit.order + 1, increasing=True)
    var = np.einsum("ij,jk,ik->i", G, fit.cov, G)
    half_width = z * np.sqrt(np.maximum(var, 0.0))
    mean = G @ fit.coef
    return PredictionBand(x=x_grid, mean=mean, lo=mean - half_width, hi=mean + half_width)


def write_band_csv(band: PredictionBand, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("x,mean,lo,hi\n")
        for i in range(len(band.x)):
            row = (band.x[i], band.mean[i], band.lo[i], band.hi[i])
            fh.write(",".join(repr(float(v)) for v in row) + "\n")


# ---------------------------------------------------------------------------
# tobit (left-censored) regression
# ---------------------------------------------------------------------------

@dataclass(eq=False)
class TobitModel:
    censor: float
    names: list[str]          # "const" first, then the regressors
    beta: np.ndarray
    sigma: float
    se: np.ndarray            # per beta entry
    sigma_se: float
    tstats: np.ndarray
    ci_lower: np.ndarray
    ci_upper: np.ndarray
    loglik: float
    loglik_null: float
    pseudo_r2: float
    n: int
    n_censored: int
    n_iter: int
    trace: list[tuple[int, float, float]]


def _tobit_loglik(theta: np.ndarray, y: np.ndarray, X: np.ndarray, censor: float) -> float:
    """theta = (beta..., log sigma); X already includes the intercept column."""
    beta = theta[:-1]
    log_s = theta[-1]
    s = math.exp(log_s)
    xb = X @ beta
    unc = y > censor
    z = (y[unc] - xb[unc]) / s
    ll = float(np.sum(-0.5 * z * z)) - len(z) * (0.5 * math.log(2 * math.pi) + log_s)
    w = (censor - xb[~unc]) / s
    ll += float(np.sum(special.log_ndtr(w)))
    return ll


def _tobit_grad(theta: np.ndarray, y: np.ndarray, X: np.ndarray, censor: float) -> np.ndarray:
    beta = theta[:-1]
    log_s = theta[-1]
    s = math.exp(log_s)
    xb = X @ beta
    unc = y > censor
    g = np.zeros_like(theta)
    z = (y[unc] - xb[unc]) / s
    g[:-1] += X[unc].T @ z / s
    g[-1] += float(np.sum(z * z - 1.0))
    w = (censor - xb[~unc]) / s
    # inverse Mills ratio phi(w)/Phi(w), computed in logs for stability
    lam = np.exp(-0.5 * w * w - 0.5 * math.log(2 * math.pi) - special.log_ndtr(w))
    g[:-1] -= X[~unc].T @ lam / s
    g[-1] -= float(np.sum(lam * w))
    return g


def _grad_hessian_fd(theta, y, X, censor) -> np.ndarray:
    """Central finite differences of the analytic gradient."""
    k = len(theta)
    H = np.empty((k, k))
    for j in range(k):
        h = 1e-6 * max(1.0, abs(theta[j]))
        tp = theta.copy()
        tm = theta.copy()
        tp[j] += h
        tm[j] -= h
        H[:, j] = (_tobit_grad(tp, y, X, censor) - _tobit_grad(tm, y, X, censor)) / (2 * h)
    return 0.5 * (H + H.T)


def _maximize(theta, y, X, censor, max_iter, tol):
    trace: list[tuple[int, float, float]] = []
    ll = _tobit_loglik(theta, y, X, censor)
    bump = 0
    while not math.isfinite(ll) and bump < 60:
        theta[-1] += 0.5  # inflate sigma until the start is feasible
        ll = _tobit_loglik(theta, y, X, censor)
        bump += 1
    if not math.isfinite(ll):
        raise ConvergenceError("could not find a feasible starting point", trace=trace)
    it = 0
    for it in range(1, max_iter + 1):
        g = _tobit_grad(theta, y, X, censor)
        gnorm = float(np.max(np.abs(g)))
        trace.append((it, ll, gnorm))
        # relative criterion: at large n the loglik is O(n) and float64 cannot
        # resolve improvements below ~|ll|*eps, so an absolute gradient floor
        # would spin forever at the numeric plateau
        if gnorm < tol * max(1.0, abs(ll)):
            return theta, ll, trace, it
        H = _grad_hessian_fd(theta, y, X, censor)
        try:
            step = np.linalg.solve(H, -g)
        except np.linalg.LinAlgError:
            step = g.copy()
        if float(g @ step) <= 0.0:
            step = g.copy()  # fall back to steepest ascent
        slope = float(g @ step)
        t = 1.0
        improved = False
        while t >= 1e-12:
            cand = theta + t * step
            llc = _tobit_loglik(cand, y, X, censor)
            if math.isfinite(llc) and llc >= ll + 1e-4 * t * slope:
                theta, ll = cand, llc
                improved = True
                break
            t *= 0.5
        if not improved:
            raise ConvergenceError(
                f"tobit line search stalled at iteration {it} (|g|={gnorm:.3g})",
                trace=trace,
            )
    raise ConvergenceError(f"tobit did not converge in {max_iter} iterations", trace=trace)


def fit_tobit(
    y: np.ndarray,
    X: np.ndarray,
    censor_left: float,
    names: list[str] | None = None,
    max_iter: int = 200,
    tol: float = 1e-8,
) -> TobitModel:
    """Left-censored Gaussian regression by maximum likelihood.

    `X` holds the regressors without an intercept (one is added).  Rows with
    y <= censor_left contribute the censored CDF term.  Standard errors come
    from the inverse observed information, mapped back through the internal
    standardization; pseudo-R^2 is McFadden's 1 - loglik/loglik_null.
    """
    y = np.asarray(y, dtype=np.float64)
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None]
    n, p = X.shape
    if len(y) != n:
        raise ValueError("y and X lengths differ")
    if n <= p + 2:
        raise ValueError(f"need more than {p + 2} rows to fit {p} regressors")
    n_censored = int(np.sum(y <= censor_left))
    if n_censored == n:
        raise DegenerateSampleError("all observations are censored")
    means = X.mean(axis=0)
    stds = X.std(axis=0)
    if np.any(stds == 0.0):
        bad = [i for i, s in enumerate(stds) if s == 0.0]
        raise SingularDesignError(f"constant regressor at column(s) {bad}")
    Xs = (X - means) / stds
    design = np.column_stack([np.ones(n), Xs])
    if np.linalg.matrix_rank(design) < p + 1:
        raise SingularDesignError("regressors are collinear")

    beta0, _, _, _ = np.linalg.lstsq(design, y, rcond=None)
    resid = y - design @ beta0
    s0 = float(np.std(resid))
    if s0 <= 0.0:
        s0 = max(1e-3, 1e-3 * float(np.std(y)))
    theta0 = np.append(beta0, math.log(s0))
    theta, ll, trace, n_iter = _maximize(theta0, y, design, censor_left, max_iter, tol)

    info = -_grad_hessian_fd(theta, y, design, censor_left)
    try:
        cov_std = np.linalg.inv(info)
    except np.linalg.LinAlgError as exc:
        raise SingularDesignError(f"observed information is singular: {exc}") from exc

    # map (beta_std, log sigma) back to the original regressor scale
    k = p + 2
    J = np.eye(k)
    for j in range(1, p + 1):
        J[0, j] = -means[j - 1] / stds[j - 1]
        J[j, j] = 1.0 / stds[j - 1]
    cov = J @ cov_std @ J.T
    beta = np.empty(p + 1)
    beta[0] = theta[0] - float(np.sum(theta[1 : p + 1] * means / stds))
    beta[1:] = theta[1 : p + 1] / stds
    sigma = math.exp(theta[-1])
    var = np.diag(cov)
    se = np.sqrt(np.maximum(var[: p + 1], 0.0))
    sigma_se = sigma * math.sqrt(max(var[-1], 0.0))
    with np.errstate(divide="ignore", invalid="ignore"):
        tstats = np.where(se > 0, beta / se, np.inf)

    # intercept + sigma only, for the McFadden denominator
    null_design = np.ones((n, 1))
    mean_y = float(y.mean())
    null0 = np.array([mean_y, math.log(max(float(np.std(y)), 1e-6))])
    _, ll_null, _, _ = _maximize(null0, y, null_design, censor_left, max_iter, tol)

    if names is None:
        names = [f"x{j}" for j in range(1, p + 1)]
    if len(names) != p:
        raise ValueError("names length must match the number of regressors")
    return TobitModel(
        censor=float(censor_left),
        names=["const"] + list(names),
        beta=beta,
        sigma=sigma,
        se=se,
        sigma_se=sigma_se,
        tstats=tstats,
        ci_lower=beta - Z_95 * se,
        ci_upper=beta + Z_95 * se,
        loglik=ll,
        loglik_null=ll_null,
        pseudo_r2=1.0 - ll / ll_null if ll_null != 0.0 else math.nan,
        n=n,
        n_censored=n_censored,
        n_iter=n_iter,
        trace=trace,
    )


def describe(columns: dict[str, np.ndarray]) -> list[dict]:
    """N / mean / SD / min / max per column (SD with the n-1 denominator)."""
    rows = []
    for name, col in columns.items():
        arr = np.asarray(col, dtype=np.float64)
        if arr.size == 0:
            raise ValueError(f"column {name!r} is empty")
        sd = float(np.std(arr, ddof=1)) if arr.size > 1 else 0.0
        rows.append(
            {
                "name": name,
                "n": int(arr.size),
                "mean": float(arr.mean()),
                "sd": sd,
                "min": float(arr.min()),
                "max": float(arr.max()),
            }
        )
    return rows
