"""ARIMA + residual-LSTM hybrid pipeline and rolling one-step evaluation.

The hybrid decomposes a series into a linear part handled by ARIMA and a
nonlinear part learned by an LSTM trained on the ARIMA residuals; the final
forecast is the exact sum of the two one-step predictions.  Evaluation walks
the test segment one day at a time, predicting each day from the trailing
window of past observations only and appending the actual afterwards.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from . import arima as arima_mod
from . import lstm as lstm_mod
from .errors import ConfigurationError, DegenerateInputError
from .lstm import LstmNetwork, SupervisedWindowSet, TrainConfig
from .series import (
    ScaleParams,
    SplitSpec,
    TimeSeries,
    fit_scale,
    minmax_scale,
    minmax_unscale,
)

MODEL_KINDS = ("arima", "lstm", "hybrid")
DEFAULT_WINDOW_L = 120

# Fixed seed offsets so the three model evaluations draw independent streams.
SEED_OFFSETS = {"arima": 0, "lstm": 1, "hybrid": 2}


@dataclass
class HybridModel:
    arima: arima_mod.ArimaModel
    residual_net: LstmNetwork
    residual_scale: ScaleParams
    window_m: int
    val_mse: float | None = None
    best_val_epoch: int | None = None


@dataclass
class EvalRun:
    model_kind: str
    predictions: np.ndarray
    actuals: np.ndarray
    timestamps: tuple
    window_L: int
    linear: np.ndarray | None = None  # hybrid only: the ARIMA component
    nonlinear: np.ndarray | None = None  # hybrid only: the LSTM component


def _resolve_order(train: TimeSeries, arima_order, caps=arima_mod.ArimaOrder(5, 2, 5)):
    if arima_order == "auto" or arima_order is None:
        return arima_mod.select_order(train, caps).chosen
    return arima_order


def fit_hybrid(
    train: TimeSeries,
    val: TimeSeries | None,
    arima_order="auto",
    cfg: TrainConfig = None,
) -> HybridModel:
    """Fit ARIMA on train, then train the residual LSTM on its in-sample errors.

    The validation segment, when given, only produces a per-epoch quality
    trace (best-epoch validation MSE is recorded); final weights are always
    last-epoch.
    """
    cfg = cfg or TrainConfig()
    order = _resolve_order(train, arima_order)
    model = arima_mod.fit(train, order)
    resid = arima_mod.residuals(model, train)
    if len(resid) <= cfg.window_m:
        raise ConfigurationError(
            f"{len(resid)} training residuals cannot fill windows of length {cfg.window_m}"
        )
    # Symmetric scaling so that zero residual maps to zero scaled value: with
    # the zero-initialized output head the untrained correction is then
    # exactly 0 and the hybrid starts at the pure linear baseline.
    bound = float(np.max(np.abs(resid)))
    if bound == 0.0:
        raise DegenerateInputError("all training residuals are zero")
    scale = ScaleParams(-bound, bound, -1.0, 1.0)
    data = lstm_mod.make_windows(resid, cfg.window_m, scale)

    val_windows = None
    if val is not None and len(val) > 0:
        # Residual stream continued through the validation segment: the model
        # stays fixed, only the data window extends.
        joint = TimeSeries(
            train.timestamps + val.timestamps,
            np.concatenate((train.values, val.values)),
            train.name,
        )
        joint_resid = arima_mod.residuals(model, joint)
        val_resid = joint_resid[-(len(val) + cfg.window_m):]
        if len(val_resid) > cfg.window_m:
            val_windows = lstm_mod.make_windows(val_resid, cfg.window_m, scale)

    rng = np.random.default_rng(cfg.seed)
    net = lstm_mod.init_network(1, cfg.hidden_dim, cfg.layers, rng)
    result = lstm_mod.train(net, data, cfg, val_data=val_windows)
    val_mse = None
    if result.val_losses is not None:
        val_mse = float(result.val_losses[result.best_val_epoch])
    return HybridModel(
        arima=model,
        residual_net=result.net,
        residual_scale=scale,
        window_m=cfg.window_m,
        val_mse=val_mse,
        best_val_epoch=result.best_val_epoch,
    )


def predict_one(model: HybridModel, history: TimeSeries, recent_residuals):
    """One-step hybrid forecast; returns (yhat, linear, nonlinear).

    yhat is exactly linear + nonlinear: the superposition is an identity, not
    an approximation.
    """
    resid = np.asarray(recent_residuals, dtype=float)
    if len(resid) < model.window_m:
        raise DegenerateInputError(
            f"need {model.window_m} recent residuals, got {len(resid)}"
        )
    lhat = arima_mod.forecast_one(model.arima, history)
    window = minmax_scale(resid[-model.window_m:], model.residual_scale)
    raw = lstm_mod.forward(model.residual_net, window)
    nhat = float(minmax_unscale(np.array([raw]), model.residual_scale)[0])
    return lhat + nhat, lhat, nhat


def _history_slice(series: TimeSeries, t: int, window_L: int) -> TimeSeries:
    """Trailing window of (at most) window_L observations strictly before t."""
    start = max(0, t - window_L)
    return TimeSeries(series.timestamps[start:t], series.segment(start, t), series.name)


def sliding_window_evaluate(
    series: TimeSeries,
    spec: SplitSpec,
    kind: str,
    cfg: TrainConfig = None,
    window_L: int = DEFAULT_WINDOW_L,
    refit: str = "none",
    arima_order="auto",
) -> EvalRun:
    """Walk the test segment one step at a time with a trailing history window.

    Models are fit once on the training segment (ARIMA coefficients are refit
    on each step's window when refit == "arima"); every prediction for test
    index t reads observations strictly before t.
    """
    if kind not in MODEL_KINDS:
        raise ConfigurationError(f"unknown model kind {kind!r}")
    if refit not in ("none", "arima"):
        raise ConfigurationError(f"unknown refit policy {refit!r}")
    cfg = cfg or TrainConfig()
    if spec.total != len(series):
        raise ConfigurationError(
            f"split total {spec.total} != series length {len(series)}"
        )
    test_start = spec.train_len + spec.val_len
    n = spec.total
    # Test values are read one at a time, each only after its prediction is
    # made; the split here must not touch the test segment.
    train = series.slice(0, spec.train_len)
    val = series.slice(spec.train_len, test_start)

    preds = np.empty(spec.test_len)
    actuals = np.empty(spec.test_len)
    linear = np.empty(spec.test_len) if kind == "hybrid" else None
    nonlinear = np.empty(spec.test_len) if kind == "hybrid" else None

    if kind == "arima":
        order = _resolve_order(train, arima_order)
        model = arima_mod.fit(train, order)
        for j, t in enumerate(range(test_start, n)):
            hist = _history_slice(series, t, window_L)
            if refit == "arima":
                model = arima_mod.fit(hist, order)
            preds[j] = arima_mod.forecast_one(model, hist)
            actuals[j] = series.segment(t, t + 1)[0]
    elif kind == "lstm":
        # Single-model baseline: trained on scaled raw levels with the same
        # window and config as the residual net.
        scale = fit_scale(train.values)
        data = lstm_mod.make_windows(train.values, cfg.window_m, scale)
        val_windows = None
        if len(val) > cfg.window_m:
            val_windows = lstm_mod.make_windows(val.values, cfg.window_m, scale)
        rng = np.random.default_rng(cfg.seed)
        net = lstm_mod.init_network(1, cfg.hidden_dim, cfg.layers, rng)
        lstm_mod.train(net, data, cfg, val_data=val_windows)
        for j, t in enumerate(range(test_start, n)):
            window = series.segment(t - cfg.window_m, t)
            raw = lstm_mod.forward(net, minmax_scale(window, scale))
            preds[j] = float(minmax_unscale(np.array([raw]), scale)[0])
            actuals[j] = series.segment(t, t + 1)[0]
    else:
        model = fit_hybrid(train, val, arima_order=arima_order, cfg=cfg)
        order = model.arima.order
        for j, t in enumerate(range(test_start, n)):
            hist = _history_slice(series, t, window_L)
            if refit == "arima":
                refit_model = arima_mod.fit(hist, order)
                model = replace_arima(model, refit_model)
            resid = arima_mod.residuals(model.arima, hist)
            yhat, lhat, nhat = predict_one(model, hist, resid)
            preds[j] = yhat
            linear[j] = lhat
            nonlinear[j] = nhat
            actuals[j] = series.segment(t, t + 1)[0]

    return EvalRun(
        model_kind=kind,
        predictions=preds,
        actuals=actuals,
        timestamps=series.timestamps[test_start:n],
        window_L=window_L,
        linear=linear,
        nonlinear=nonlinear,
    )


def replace_arima(model: HybridModel, new_arima) -> HybridModel:
    return HybridModel(
        arima=new_arima,
        residual_net=model.residual_net,
        residual_scale=model.residual_scale,
        window_m=model.window_m,
        val_mse=model.val_mse,
        best_val_epoch=model.best_val_epoch,
    )


@dataclass
class CompareResult:
    runs: dict  # kind -> EvalRun (successful only)
    report: "object"  # MetricsReport
    failures: dict = field(default_factory=dict)  # kind -> error message


def compare_models(
    series: TimeSeries,
    spec: SplitSpec,
    cfg: TrainConfig = None,
    window_L: int = DEFAULT_WINDOW_L,
    refit: str = "none",
    arima_order="auto",
) -> CompareResult:
    """Evaluate arima, lstm, and hybrid under identical splits and derived seeds."""
    from .metrics import build_report

    cfg = cfg or TrainConfig()
    runs, failures = {}, {}
    for kind in MODEL_KINDS:
        kind_cfg = replace(cfg, seed=cfg.seed + SEED_OFFSETS[kind])
        try:
            runs[kind] = sliding_window_evaluate(
                series, spec, kind, kind_cfg,
                window_L=window_L, refit=refit, arima_order=arima_order,
            )
        except Exception as exc:  # one model failing must not sink the others
            failures[kind] = f"{type(exc).__name__}: {exc}"
    if not runs:
        raise ConfigurationError("all three model evaluations failed")
    report = build_report(runs.values())
    return CompareResult(runs=runs, report=report, failures=failures)
