"""Univariate series core: differencing, stationarity testing, correlograms,
min-max scaling, and chronological splitting.

All functions are pure; every returned container is immutable in practice
(numpy arrays are copied on construction and never written to afterwards).
"""

from __future__ import annotations

import datetime
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, DegenerateInputError, NumericalError

# Large-sample critical values for the Dickey-Fuller distribution,
# constant-only regression (no deterministic trend).
ADF_CRITICAL_VALUES = {0.01: -3.43, 0.05: -2.86, 0.10: -2.57}


@dataclass(frozen=True)
class TimeSeries:
    """Ordered, timestamped univariate observations."""

    timestamps: tuple
    values: np.ndarray
    name: str = ""

    def __post_init__(self):
        ts = tuple(self.timestamps)
        vals = np.array(self.values, dtype=float)
        if vals.ndim != 1:
            raise ConfigurationError("values must be one-dimensional")
        if len(ts) != len(vals):
            raise ConfigurationError(
                f"{len(ts)} timestamps but {len(vals)} values"
            )
        if len(vals) < 1:
            raise DegenerateInputError("a series needs at least 1 observation")
        if not np.all(np.isfinite(vals)):
            raise DegenerateInputError("series contains non-finite values")
        for a, b in zip(ts, ts[1:]):
            if not a < b:
                raise ConfigurationError(f"timestamps not strictly increasing at {b}")
        object.__setattr__(self, "timestamps", ts)
        object.__setattr__(self, "values", vals)

    def __len__(self):
        return len(self.values)

    def segment(self, start: int, stop: int) -> np.ndarray:
        """Return values[start:stop].  The single read path used by rolling
        evaluation, so tests can subclass and audit every access."""
        return self.values[start:stop]

    def slice(self, start: int, stop: int, name: str | None = None) -> "TimeSeries":
        return TimeSeries(
            self.timestamps[start:stop],
            self.segment(start, stop),
            self.name if name is None else name,
        )

    @staticmethod
    def from_values(values, name: str = "", start=datetime.date(2000, 1, 1)) -> "TimeSeries":
        """Attach synthetic consecutive daily timestamps to bare values."""
        n = len(values)
        ts = tuple(start + datetime.timedelta(days=i) for i in range(n))
        return TimeSeries(ts, values, name)


@dataclass(frozen=True)
class DifferencedSeries:
    """d-th forward differences plus the leading anchor values needed to invert."""

    values: np.ndarray
    order_d: int
    anchors: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", np.array(self.values, dtype=float))
        object.__setattr__(self, "anchors", np.array(self.anchors, dtype=float))
        if len(self.anchors) != self.order_d:
            raise ConfigurationError(
                f"order {self.order_d} requires {self.order_d} anchors, "
                f"got {len(self.anchors)}"
            )


@dataclass(frozen=True)
class AdfResult:
    """Augmented Dickey-Fuller outcome (constant-only regression)."""

    statistic: float
    lag_used: int
    critical_values: dict = field(default_factory=lambda: dict(ADF_CRITICAL_VALUES))

    @property
    def is_stationary_5pct(self) -> bool:
        return self.statistic < self.critical_values[0.05]


@dataclass(frozen=True)
class CorrelogramPoint:
    lag: int
    value: float
    confidence_bound: float


@dataclass(frozen=True)
class ScaleParams:
    """Affine map [min, max] -> [target_lo, target_hi]."""

    min: float
    max: float
    target_lo: float = -1.0
    target_hi: float = 1.0

    def __post_init__(self):
        if not self.max > self.min:
            raise DegenerateInputError("scale range is degenerate (max <= min)")
        if not self.target_hi > self.target_lo:
            raise ConfigurationError("target_hi must exceed target_lo")


@dataclass(frozen=True)
class SplitSpec:
    train_len: int
    val_len: int
    test_len: int

    def __post_init__(self):
        if min(self.train_len, self.val_len, self.test_len) <= 0:
            raise ConfigurationError("all split segments must be positive")

    @property
    def total(self) -> int:
        return self.train_len + self.val_len + self.test_len

    @staticmethod
    def proportional(n: int, ratios=(900, 100, 260)) -> "SplitSpec":
        """Scale the reference 900/100/260 split to length n (largest remainder)."""
        total = sum(ratios)
        raw = [n * r / total for r in ratios]
        base = [int(x) for x in raw]
        rem = n - sum(base)
        order = sorted(range(3), key=lambda i: raw[i] - base[i], reverse=True)
        for i in order[:rem]:
            base[i] += 1
        return SplitSpec(*base)


def difference(series: TimeSeries, d: int) -> DifferencedSeries:
    """d-th forward difference, keeping the d leading source values as anchors."""
    if d < 0:
        raise ConfigurationError("difference order must be non-negative")
    vals = series.values
    if len(vals) <= d:
        raise DegenerateInputError(f"series of length {len(vals)} cannot be differenced {d} times")
    out = vals.copy()
    for _ in range(d):
        out = np.diff(out)
    return DifferencedSeries(out, d, vals[:d])


def integrate(diff: DifferencedSeries) -> np.ndarray:
    """Exact left-inverse of :func:`difference`; returns level values."""
    d = diff.order_d
    if len(diff.anchors) != d:
        raise DegenerateInputError("anchors missing or inconsistent with order")
    vals = diff.values
    for k in range(d, 0, -1):
        first = np.diff(diff.anchors, k - 1)[0] if k > 1 else np.diff(diff.anchors, 0)[0]
        vals = np.concatenate(([first], first + np.cumsum(vals)))
    return vals


def acf(values, max_lag: int) -> list[CorrelogramPoint]:
    """Sample autocorrelations for lags 1..max_lag (lag 0 on request via max_lag>=0).

    Uses the biased divide-by-n covariance estimator, so the +-1.96/sqrt(n)
    white-noise bound applies.
    """
    x = np.asarray(values, dtype=float)
    n = len(x)
    if max_lag < 0 or n <= max_lag:
        raise DegenerateInputError(f"need more than {max_lag} observations, got {n}")
    x = x - x.mean()
    c0 = float(np.dot(x, x)) / n
    if c0 == 0.0:
        raise DegenerateInputError("zero-variance series has no correlogram")
    bound = 1.96 / np.sqrt(n)
    points = []
    for k in range(1, max_lag + 1):
        ck = float(np.dot(x[:-k], x[k:])) / n
        points.append(CorrelogramPoint(k, ck / c0, bound))
    return points


def _acf_values(values, max_lag):
    return np.array([p.value for p in acf(values, max_lag)])


def pacf(values, max_lag: int) -> list[CorrelogramPoint]:
    """Partial autocorrelations via the Durbin-Levinson recursion on the ACF."""
    x = np.asarray(values, dtype=float)
    n = len(x)
    if max_lag >= n / 2:
        raise DegenerateInputError("max_lag must be below half the series length")
    rho = _acf_values(x, max_lag)
    bound = 1.96 / np.sqrt(n)
    phi_prev = np.zeros(0)
    points = []
    for k in range(1, max_lag + 1):
        if k == 1:
            phi_kk = rho[0]
            phi = np.array([phi_kk])
        else:
            den = 1.0 - float(np.dot(phi_prev, rho[:k - 1]))
            if abs(den) < 1e-14:
                raise NumericalError(f"Durbin-Levinson recursion singular at lag {k}")
            phi_kk = (rho[k - 1] - float(np.dot(phi_prev, rho[k - 2::-1]))) / den
            phi = np.concatenate((phi_prev - phi_kk * phi_prev[::-1], [phi_kk]))
        points.append(CorrelogramPoint(k, float(phi_kk), bound))
        phi_prev = phi
    return points


def _ols(X, y):
    """Least squares with coefficient standard errors."""
    coef, _, rank, _ = np.linalg.lstsq(X, y, rcond=None)
    if rank < X.shape[1]:
        raise NumericalError("collinear regressors in ADF regression")
    resid = y - X @ coef
    dof = len(y) - X.shape[1]
    sigma2 = float(resid @ resid) / dof
    cov = sigma2 * np.linalg.inv(X.T @ X)
    se = np.sqrt(np.diag(cov))
    return coef, se, resid


def adf_test(values, max_lag: int | None = None) -> AdfResult:
    """Augmented Dickey-Fuller unit-root test, constant-only regression.

    Lag order is chosen by minimizing the Gaussian AIC of the augmented
    regression over 0..max_lag; the default cap is the Schwert bound
    floor(12 * (n/100)^0.25).
    """
    y = np.asarray(values, dtype=float)
    n = len(y)
    if n < 20:
        raise DegenerateInputError(f"ADF test needs at least 20 observations, got {n}")
    if max_lag is None:
        max_lag = int(np.floor(12.0 * (n / 100.0) ** 0.25))
    max_lag = min(max_lag, n // 2 - 2)

    dy = np.diff(y)
    best = None
    # Common effective sample across candidate lags so AICs are comparable.
    t0 = max_lag + 1
    for lag in range(max_lag + 1):
        lhs = dy[t0 - 1:]
        cols = [np.ones_like(lhs), y[t0 - 1:-1]]
        for i in range(1, lag + 1):
            cols.append(dy[t0 - 1 - i:-i])
        X = np.column_stack(cols)
        coef, se, resid = _ols(X, lhs)
        neff = len(lhs)
        rss = float(resid @ resid)
        if rss <= 0.0:
            raise NumericalError("degenerate ADF regression (zero residual sum)")
        aic = neff * np.log(rss / neff) + 2 * X.shape[1]
        stat = coef[1] / se[1]
        if best is None or aic < best[0]:
            best = (aic, lag, float(stat))
    return AdfResult(statistic=best[2], lag_used=best[1])


def fit_scale(values, target_lo: float = -1.0, target_hi: float = 1.0) -> ScaleParams:
    """Fit min-max parameters on (training) values."""
    x = np.asarray(values, dtype=float)
    lo, hi = float(x.min()), float(x.max())
    if hi == lo:
        raise DegenerateInputError("cannot scale a constant series")
    return ScaleParams(lo, hi, target_lo, target_hi)


def minmax_scale(values, params: ScaleParams) -> np.ndarray:
    x = np.asarray(values, dtype=float)
    span = params.max - params.min
    tspan = params.target_hi - params.target_lo
    return params.target_lo + (x - params.min) * tspan / span


def minmax_unscale(scaled, params: ScaleParams) -> np.ndarray:
    x = np.asarray(scaled, dtype=float)
    span = params.max - params.min
    tspan = params.target_hi - params.target_lo
    return params.min + (x - params.target_lo) * span / tspan


def split(series: TimeSeries, spec: SplitSpec):
    """Contiguous chronological (train, val, test) partition."""
    if spec.total != len(series):
        raise ConfigurationError(
            f"split {spec.train_len}+{spec.val_len}+{spec.test_len} != series length {len(series)}"
        )
    a = spec.train_len
    b = a + spec.val_len
    return (
        series.slice(0, a),
        series.slice(a, b),
        series.slice(b, spec.total),
    )
