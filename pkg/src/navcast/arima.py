"""ARIMA(p,d,q) estimation by conditional sum of squares, AIC-based order
selection, one-step forecasting, and residual extraction.

Estimation conventions:

* the series is differenced d times, then mean-centered; the removed mean is
  reported as the intercept (the drift of the differenced series when d >= 1);
* conditioning on the first p observations, pre-sample shocks are zero, and
  the CSS objective sums squared one-step residuals for t >= p;
* pure AR fits (q == 0) are solved exactly by least squares on lagged values,
  which is the minimizer of the same objective.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize
from scipy.signal import lfilter

from .errors import AnalysisError, DegenerateInputError, FitError, NumericalError
from .series import TimeSeries, adf_test, difference

MAX_ITER = 500
GRAD_TOL = 1e-8


@dataclass(frozen=True)
class ArimaOrder:
    p: int
    d: int
    q: int

    def __post_init__(self):
        if min(self.p, self.d, self.q) < 0:
            raise ValueError("orders must be non-negative")

    def __iter__(self):
        return iter((self.p, self.d, self.q))

    def __str__(self):
        return f"({self.p},{self.d},{self.q})"


@dataclass(frozen=True)
class ArimaModel:
    order: ArimaOrder
    ar_coeffs: np.ndarray
    ma_coeffs: np.ndarray
    intercept: float
    sigma2: float
    in_sample_residuals: np.ndarray
    n_obs: int
    ar_stationary: bool = True

    def __post_init__(self):
        object.__setattr__(self, "ar_coeffs", np.array(self.ar_coeffs, dtype=float))
        object.__setattr__(self, "ma_coeffs", np.array(self.ma_coeffs, dtype=float))
        object.__setattr__(
            self, "in_sample_residuals", np.array(self.in_sample_residuals, dtype=float)
        )

    @property
    def effective_n(self) -> int:
        # Conditional estimation keeps all n - d residuals: the first p are
        # computed against zero-padded pre-sample terms, not dropped, so every
        # (p,q) candidate on the same series is scored on the same sample.
        return self.n_obs - self.order.d

    def css(self) -> float:
        eps = self.in_sample_residuals
        return float(eps @ eps)


@dataclass(frozen=True)
class OrderSearchReport:
    candidates: list = field(default_factory=list)  # (ArimaOrder, aic, converged)
    chosen: ArimaOrder = None


def _arma_residuals(z, phi, theta):
    """One-step residuals of the ARMA recursion with zero pre-sample terms.

    eps_t = z_t - sum phi_i z_{t-i} + sum theta_j eps_{t-j}, run from t=0 with
    z and eps zero-padded before the sample.
    """
    b = np.concatenate(([1.0], -np.asarray(phi, dtype=float)))
    a = np.concatenate(([1.0], -np.asarray(theta, dtype=float)))
    return lfilter(b, a, z)


def _css(z, phi, theta, p):
    with np.errstate(over="ignore", invalid="ignore"):
        eps = _arma_residuals(z, phi, theta)
        tail = eps[p:]
        css = float(tail @ tail)
    # Explosive candidates overflow; report a huge finite value so the
    # optimizer backs away instead of propagating NaN.
    if not np.isfinite(css):
        return 1e300
    return css


def _yule_walker_ar(z, p):
    """Yule-Walker AR(p) start values from the biased autocovariances."""
    n = len(z)
    c = np.array([float(np.dot(z[: n - k], z[k:])) / n for k in range(p + 1)])
    if c[0] <= 0:
        return np.zeros(p)
    R = np.array([[c[abs(i - j)] for j in range(p)] for i in range(p)])
    try:
        return np.linalg.solve(R, c[1: p + 1])
    except np.linalg.LinAlgError:
        return np.zeros(p)


def _ar_roots_outside_unit_circle(phi) -> bool:
    if len(phi) == 0:
        return True
    poly = np.concatenate(([1.0], -np.asarray(phi, dtype=float)))
    roots = np.roots(poly[::-1])  # roots of 1 - phi_1 z - ... - phi_p z^p
    return bool(np.all(np.abs(roots) > 1.0))


def fit(series: TimeSeries, order: ArimaOrder) -> ArimaModel:
    """Estimate an ARIMA(p,d,q) model by conditional sum of squares."""
    p, d, q = order
    n = len(series)
    if n < p + q + d + 2:
        raise DegenerateInputError(
            f"series of length {n} too short for ARIMA{order}"
        )
    w = difference(series, d).values
    mu = float(w.mean())
    z = w - mu

    if p == 0 and q == 0:
        eps = z.copy()
        phi, theta = np.zeros(0), np.zeros(0)
    elif q == 0:
        # Exact least squares on lagged values.
        X = np.column_stack([z[p - 1 - i: len(z) - 1 - i] for i in range(p)])
        y = z[p:]
        phi, _, _, _ = np.linalg.lstsq(X, y, rcond=None)
        theta = np.zeros(0)
        eps = _arma_residuals(z, phi, theta)
    else:
        phi0 = _yule_walker_ar(z, p) if p else np.zeros(0)
        x0 = np.concatenate((phi0, np.zeros(q)))

        def objective(x):
            return _css(z, x[:p], x[p:], p)

        bounds = [(-10.0, 10.0)] * p + [(-0.99, 0.99)] * q
        res = minimize(
            objective,
            x0,
            method="L-BFGS-B",
            bounds=bounds,
            options={"maxiter": MAX_ITER, "gtol": GRAD_TOL},
        )
        if not res.success and not np.isfinite(res.fun):
            raise FitError(
                f"CSS optimization failed for ARIMA{order}: {res.message}",
                best_params=res.x,
            )
        phi, theta = res.x[:p], res.x[p:]
        eps = _arma_residuals(z, phi, theta)

    stationary = _ar_roots_outside_unit_circle(phi)
    if not stationary:
        warnings.warn(f"AR polynomial of ARIMA{order} fit is non-stationary")
    neff = len(z)
    css = float(eps @ eps)
    sigma2 = css / neff if neff > 0 else 0.0
    return ArimaModel(
        order=order,
        ar_coeffs=phi,
        ma_coeffs=theta,
        intercept=mu,
        sigma2=sigma2,
        in_sample_residuals=eps,
        n_obs=n,
        ar_stationary=stationary,
    )


def aic(model: ArimaModel) -> float:
    """Gaussian-CSS Akaike criterion: n ln(CSS/n) + 2(p + q + 1)."""
    n = model.effective_n
    css = model.css()
    if css <= 0.0 or n <= 0:
        raise DegenerateInputError("AIC undefined for zero residual sum of squares")
    k = model.order.p + model.order.q + 1
    return n * float(np.log(css / n)) + 2 * k


def select_order(series: TimeSeries, caps: ArimaOrder = ArimaOrder(5, 2, 5)) -> OrderSearchReport:
    """Pick d by the ADF test, then (p,q) by AIC over the grid.

    Ties break toward the smallest p+q, then the smallest p, so the result is
    independent of grid evaluation order.
    """
    d_chosen = None
    for d in range(caps.d + 1):
        w = difference(series, d).values
        if adf_test(w).is_stationary_5pct:
            d_chosen = d
            break
    if d_chosen is None:
        raise AnalysisError(
            f"series is not stationary after up to {caps.d} differences; "
            "unsuitable for ARIMA modelling"
        )
    candidates = []
    for p in range(caps.p + 1):
        for q in range(caps.q + 1):
            order = ArimaOrder(p, d_chosen, q)
            try:
                model = fit(series, order)
                candidates.append((order, aic(model), True))
            except Exception:
                candidates.append((order, float("inf"), False))
    converged = [c for c in candidates if c[2]]
    if not converged:
        raise AnalysisError("no ARIMA candidate converged")
    chosen = min(converged, key=lambda c: (c[1], c[0].p + c[0].q, c[0].p))[0]
    return OrderSearchReport(candidates=candidates, chosen=chosen)


def _forecast_differenced(model: ArimaModel, history: TimeSeries) -> float:
    """One-step forecast of the d-times differenced series."""
    p, d, q = model.order
    z = difference(history, d).values - model.intercept
    eps = _arma_residuals(z, model.ar_coeffs, model.ma_coeffs)
    zhat = 0.0
    for i in range(1, p + 1):
        zhat += model.ar_coeffs[i - 1] * z[-i]
    for j in range(1, q + 1):
        zhat -= model.ma_coeffs[j - 1] * eps[-j]
    return model.intercept + zhat


def forecast_one(model: ArimaModel, history: TimeSeries) -> float:
    """One-step-ahead point forecast at the original (undifferenced) level."""
    p, d, q = model.order
    if len(history) < p + d + 1:
        raise DegenerateInputError(
            f"history of length {len(history)} too short for ARIMA{model.order} forecast"
        )
    xhat = _forecast_differenced(model, history)
    # Integrate back up: each lower difference level adds its own last value.
    vals = history.values
    levels = [vals]
    for _ in range(d):
        levels.append(np.diff(levels[-1]))
    yhat = xhat
    for k in range(d - 1, -1, -1):
        yhat = levels[k][-1] + yhat
    return float(yhat)


def residuals(model: ArimaModel, series: TimeSeries) -> np.ndarray:
    """One-step in-sample prediction errors where a genuine prediction exists.

    Length is n - d - p: the first p differenced points only condition the
    recursion and receive no prediction.
    """
    p, d, q = model.order
    if len(series) < p + d + 1:
        raise DegenerateInputError("series too short for residual extraction")
    z = difference(series, d).values - model.intercept
    eps = _arma_residuals(z, model.ar_coeffs, model.ma_coeffs)
    return eps[p:]


# ---------------------------------------------------------------------------
# Flat key-value serialization (order, coefficients, sigma2, n_obs).

def serialize(model: ArimaModel) -> str:
    lines = [
        "format arima-model v1",
        f"p {model.order.p}",
        f"d {model.order.d}",
        f"q {model.order.q}",
        f"intercept {model.intercept:.17g}",
        f"sigma2 {model.sigma2:.17g}",
        f"n_obs {model.n_obs}",
        "ar " + " ".join(f"{c:.17g}" for c in model.ar_coeffs),
        "ma " + " ".join(f"{c:.17g}" for c in model.ma_coeffs),
        "residuals " + " ".join(f"{c:.17g}" for c in model.in_sample_residuals),
    ]
    return "\n".join(lines) + "\n"


def deserialize(text: str) -> ArimaModel:
    fields = {}
    for line in text.strip().splitlines():
        key, _, rest = line.partition(" ")
        fields[key] = rest
    if fields.get("format") != "arima-model v1":
        raise ValueError("not an arima-model v1 document")
    order = ArimaOrder(int(fields["p"]), int(fields["d"]), int(fields["q"]))

    def vec(key):
        s = fields.get(key, "").split()
        return np.array([float(v) for v in s])

    return ArimaModel(
        order=order,
        ar_coeffs=vec("ar"),
        ma_coeffs=vec("ma"),
        intercept=float(fields["intercept"]),
        sigma2=float(fields["sigma2"]),
        in_sample_residuals=vec("residuals"),
        n_obs=int(fields["n_obs"]),
    )
