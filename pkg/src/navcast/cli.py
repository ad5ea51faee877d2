"""Command-line front end: `analyze`, `fit-arima`, `fit-hybrid`, `compare`, `synth`.

Exit codes: 0 success, 2 usage/configuration, 3 ingestion, 4 analysis,
5 training.  Machine-readable outputs are JSON; plottable series are CSV.
"""

from __future__ import annotations

import argparse
import datetime
import json
import sys
from pathlib import Path

import numpy as np

from . import arima as arima_mod
from . import lstm as lstm_mod
from .arima import ArimaOrder
from .errors import (
    AnalysisError,
    ConfigurationError,
    DegenerateInputError,
    FitError,
    IngestionError,
    NavcastError,
    NumericalError,
)
from .hybrid import DEFAULT_WINDOW_L, compare_models, fit_hybrid
from .lstm import TrainConfig
from .metrics import format_table
from .series import SplitSpec, TimeSeries, acf, adf_test, difference, pacf

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_INGESTION = 3
EXIT_ANALYSIS = 4
EXIT_TRAINING = 5

SYNTH_START_DATE = datetime.date(2016, 6, 6)


# ---------------------------------------------------------------------------
# Ingestion and emission


def ingest_csv(path) -> TimeSeries:
    """Read a `date,nav` CSV into a validated, chronologically sorted series."""
    p = Path(path)
    if not p.is_file():
        raise IngestionError(f"input file not found: {p}")
    lines = p.read_text(encoding="utf-8").splitlines()
    if not lines:
        raise IngestionError(f"{p}: empty file")
    if lines[0].strip() != "date,nav":
        raise IngestionError(f"{p}: line 1: expected header 'date,nav'")
    records = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != 2:
            raise IngestionError(f"{p}: line {lineno}: expected 2 comma-separated fields")
        try:
            date = datetime.date.fromisoformat(parts[0].strip())
        except ValueError:
            raise IngestionError(f"{p}: line {lineno}: bad date {parts[0]!r}")
        try:
            nav = float(parts[1])
        except ValueError:
            raise IngestionError(f"{p}: line {lineno}: bad nav value {parts[1]!r}")
        if not np.isfinite(nav) or nav <= 0:
            raise IngestionError(f"{p}: line {lineno}: nav must be a positive finite number")
        records.append((date, nav, lineno))
    if len(records) < 2:
        raise IngestionError(f"{p}: need at least 2 data rows")
    records.sort(key=lambda r: r[0])
    for (d1, _, _), (d2, _, ln) in zip(records, records[1:]):
        if d1 == d2:
            raise IngestionError(f"{p}: line {ln}: duplicate date {d2}")
    return TimeSeries(
        tuple(r[0] for r in records),
        np.array([r[1] for r in records]),
        name=p.stem,
    )


def write_series_csv(path, series: TimeSeries, value_header: str = "nav"):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"date,{value_header}\n")
        for ts, v in zip(series.timestamps, series.values):
            fh.write(f"{ts.isoformat()},{float(v)!r}\n")


def generate_synthetic(kind: str, n: int, params: dict | None = None, seed: int = 0) -> TimeSeries:
    """Seeded fixture generator: random-walk, ar1, or linear-plus-sine."""
    if n < 30:
        raise ConfigurationError("synthetic series need n >= 30")
    params = dict(params or {})
    base = float(params.pop("base", 2.0))
    rng = np.random.default_rng(seed)
    if kind == "random-walk":
        drift = float(params.pop("drift", 0.0))
        sigma = float(params.pop("sigma", 0.01))
        values = base + np.concatenate(([0.0], np.cumsum(rng.normal(drift, sigma, n - 1))))
    elif kind == "ar1":
        phi = float(params.pop("phi", 0.6))
        sigma = float(params.pop("sigma", 0.01))
        x = np.empty(n)
        x[0] = 0.0
        shocks = rng.normal(0.0, sigma, n)
        for t in range(1, n):
            x[t] = phi * x[t - 1] + shocks[t]
        values = base + x
    elif kind == "linear-plus-sine":
        drift = float(params.pop("drift", 0.0))
        sigma = float(params.pop("sigma", 0.01))
        amplitude = float(params.pop("amplitude", 0.1))
        period = float(params.pop("period", 50.0))
        walk = base + np.concatenate(([0.0], np.cumsum(rng.normal(drift, sigma, n - 1))))
        t = np.arange(n)
        values = walk + amplitude * np.sin(2 * np.pi * t / period)
    else:
        raise ConfigurationError(f"unknown synthetic kind {kind!r}")
    if params:
        raise ConfigurationError(f"unknown parameters for {kind}: {sorted(params)}")
    ts = tuple(SYNTH_START_DATE + datetime.timedelta(days=i) for i in range(n))
    return TimeSeries(ts, values, name=f"synth-{kind}")


# ---------------------------------------------------------------------------
# Command implementations


def _adf_payload(result):
    return {
        "statistic": result.statistic,
        "lag_used": result.lag_used,
        "critical_values": {f"{k:.2f}": v for k, v in result.critical_values.items()},
        "is_stationary_5pct": result.is_stationary_5pct,
    }


def cmd_analyze(series: TimeSeries, out_dir: Path, max_lag: int = 20) -> dict:
    """Stationarity and correlogram artifacts: adf.json, acf.csv, pacf.csv, diff.csv."""
    out_dir.mkdir(parents=True, exist_ok=True)
    adf = {}
    stationary_d = None
    for d in range(3):
        w = difference(series, d).values
        res = adf_test(w)
        adf[str(d)] = _adf_payload(res)
        if stationary_d is None and res.is_stationary_5pct:
            stationary_d = d
    (out_dir / "adf.json").write_text(json.dumps(adf, indent=2) + "\n", encoding="utf-8")

    d_used = stationary_d if stationary_d is not None else 1
    w = difference(series, d_used).values
    for name, points in (("acf.csv", acf(w, max_lag)), ("pacf.csv", pacf(w, max_lag))):
        with open(out_dir / name, "w", encoding="utf-8") as fh:
            fh.write("lag,value,confidence_bound\n")
            for pt in points:
                fh.write(f"{pt.lag},{float(pt.value)!r},{float(pt.confidence_bound)!r}\n")

    diff1 = difference(series, 1)
    with open(out_dir / "diff.csv", "w", encoding="utf-8") as fh:
        fh.write("date,value\n")
        for ts, v in zip(series.timestamps[1:], diff1.values):
            fh.write(f"{ts.isoformat()},{float(v)!r}\n")
    return {"adf": adf, "stationary_d": stationary_d, "correlogram_d": d_used}


def cmd_fit_arima(series: TimeSeries, order, out_dir: Path) -> arima_mod.ArimaModel:
    if order == "auto":
        order = arima_mod.select_order(series).chosen
    model = arima_mod.fit(series, order)
    models_dir = out_dir / "models"
    models_dir.mkdir(parents=True, exist_ok=True)
    (models_dir / "arima.txt").write_text(arima_mod.serialize(model), encoding="utf-8")
    return model


def cmd_fit_hybrid(series: TimeSeries, spec: SplitSpec, order, cfg: TrainConfig, out_dir: Path):
    test_start = spec.train_len + spec.val_len
    train = series.slice(0, spec.train_len)
    val = series.slice(spec.train_len, test_start)
    model = fit_hybrid(train, val, arima_order=order, cfg=cfg)
    models_dir = out_dir / "models"
    models_dir.mkdir(parents=True, exist_ok=True)
    (models_dir / "arima.txt").write_text(arima_mod.serialize(model.arima), encoding="utf-8")
    (models_dir / "lstm.txt").write_text(lstm_mod.serialize(model.residual_net), encoding="utf-8")
    summary = {
        "arima_order": [model.arima.order.p, model.arima.order.d, model.arima.order.q],
        "window_m": model.window_m,
        "val_mse": model.val_mse,
        "best_val_epoch": model.best_val_epoch,
        "residual_scale": {
            "min": model.residual_scale.min,
            "max": model.residual_scale.max,
            "target_lo": model.residual_scale.target_lo,
            "target_hi": model.residual_scale.target_hi,
        },
    }
    (out_dir / "hybrid.json").write_text(json.dumps(summary, indent=2) + "\n", encoding="utf-8")
    return model


def cmd_compare(series: TimeSeries, spec: SplitSpec, cfg: TrainConfig, out_dir: Path,
                window_L: int = DEFAULT_WINDOW_L, refit: str = "none",
                order="auto", stream=None):
    """Three-model rolling comparison; emits predictions.csv, metrics.json, models/."""
    stream = stream or sys.stdout
    out_dir.mkdir(parents=True, exist_ok=True)
    result = compare_models(series, spec, cfg, window_L=window_L, refit=refit,
                            arima_order=order)
    test_start = spec.train_len + spec.val_len
    dates = series.timestamps[test_start: spec.total]
    actuals = series.values[test_start: spec.total]

    with open(out_dir / "predictions.csv", "w", encoding="utf-8") as fh:
        fh.write("date,actual,arima,lstm,hybrid\n")
        for j, (ts, actual) in enumerate(zip(dates, actuals)):
            cells = [ts.isoformat(), repr(float(actual))]
            for kind in ("arima", "lstm", "hybrid"):
                run = result.runs.get(kind)
                cells.append(repr(float(run.predictions[j])) if run is not None else "")
            fh.write(",".join(cells) + "\n")

    payload = result.report.to_dict()
    if result.failures:
        payload["failed"] = result.failures
    (out_dir / "metrics.json").write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")

    models_dir = out_dir / "models"
    models_dir.mkdir(exist_ok=True)
    # Persist the fit-once artifacts by refitting identically (same seeds).
    train = series.slice(0, spec.train_len)
    val = series.slice(spec.train_len, test_start)
    if "hybrid" in result.runs:
        from dataclasses import replace
        from .hybrid import SEED_OFFSETS
        hybrid_cfg = replace(cfg, seed=cfg.seed + SEED_OFFSETS["hybrid"])
        model = fit_hybrid(train, val, arima_order=order, cfg=hybrid_cfg)
        (models_dir / "arima.txt").write_text(arima_mod.serialize(model.arima), encoding="utf-8")
        (models_dir / "lstm.txt").write_text(lstm_mod.serialize(model.residual_net), encoding="utf-8")

    print(format_table(result.report), file=stream)
    if result.failures:
        for kind, msg in result.failures.items():
            print(f"FAILED {kind}: {msg}", file=stream)
    return result


# ---------------------------------------------------------------------------
# Argument parsing and dispatch


def _parse_split(text: str) -> tuple:
    parts = text.split(",")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("split must be A,B,C")
    try:
        return tuple(int(p) for p in parts)
    except ValueError:
        raise argparse.ArgumentTypeError("split parts must be integers")


def _parse_order(text: str):
    if text == "auto":
        return "auto"
    parts = text.split(",")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("order must be 'auto' or p,d,q")
    try:
        p, d, q = (int(x) for x in parts)
    except ValueError:
        raise argparse.ArgumentTypeError("order parts must be integers")
    return ArimaOrder(p, d, q)


def _resolve_split(series: TimeSeries, raw) -> SplitSpec:
    if raw is None:
        if len(series) == 1260:
            return SplitSpec(900, 100, 260)
        return SplitSpec.proportional(len(series))
    return SplitSpec(*raw)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="navcast",
        description="ARIMA / LSTM / hybrid one-step-ahead forecasting of fund NAV series.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, need_input=True):
        if need_input:
            p.add_argument("--input", required=True, help="CSV file with header date,nav")
        p.add_argument("--out", default="out", help="output directory")
        p.add_argument("--seed", type=int, default=0)

    def add_train_flags(p):
        p.add_argument("--split", type=_parse_split, default=None,
                       help="train,val,test lengths (default: 900,100,260 scaled)")
        p.add_argument("--order", type=_parse_order, default="auto")
        p.add_argument("--lr", type=float, default=0.005)
        p.add_argument("--epochs", type=int, default=100)
        p.add_argument("--batch", type=int, default=64)
        p.add_argument("--layers", type=int, default=3)
        p.add_argument("--hidden", type=int, default=32)
        p.add_argument("--window-m", type=int, default=20)
        p.add_argument("--window-L", type=int, default=DEFAULT_WINDOW_L)
        p.add_argument("--refit", choices=("none", "arima"), default="none")

    p = sub.add_parser("analyze", help="ADF / ACF / PACF / differencing artifacts")
    add_common(p)
    p.add_argument("--max-lag", type=int, default=20)

    p = sub.add_parser("fit-arima", help="fit an ARIMA model and serialize it")
    add_common(p)
    p.add_argument("--order", type=_parse_order, default="auto")

    p = sub.add_parser("fit-hybrid", help="fit the ARIMA + residual-LSTM hybrid")
    add_common(p)
    add_train_flags(p)

    p = sub.add_parser("compare", help="rolling three-model comparison")
    add_common(p)
    add_train_flags(p)

    p = sub.add_parser("synth", help="generate a synthetic fixture CSV")
    add_common(p, need_input=False)
    p.add_argument("--kind", choices=("random-walk", "ar1", "linear-plus-sine"),
                   default="random-walk")
    p.add_argument("--n", type=int, default=1260)
    p.add_argument("--param", action="append", default=[], metavar="KEY=VALUE",
                   help="generator parameter, e.g. --param sigma=0.01")
    p.add_argument("--output", default=None, help="CSV path (default <out>/synthetic.csv)")

    return parser


def _train_config(args) -> TrainConfig:
    return TrainConfig(
        learning_rate=args.lr,
        epochs=args.epochs,
        batch_size=args.batch,
        layers=args.layers,
        hidden_dim=args.hidden,
        window_m=args.window_m,
        seed=args.seed,
    )


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK

    try:
        out_dir = Path(args.out)
        if args.command == "synth":
            params = {}
            for item in args.param:
                key, _, value = item.partition("=")
                if not _:
                    raise ConfigurationError(f"bad --param {item!r}, expected KEY=VALUE")
                params[key] = float(value)
            series = generate_synthetic(args.kind, args.n, params, args.seed)
            out_dir.mkdir(parents=True, exist_ok=True)
            target = Path(args.output) if args.output else out_dir / "synthetic.csv"
            write_series_csv(target, series)
            print(f"wrote {len(series)} rows to {target}")
            return EXIT_OK

        series = ingest_csv(args.input)
        if args.command == "analyze":
            info = cmd_analyze(series, out_dir, max_lag=args.max_lag)
            d = info["stationary_d"]
            print(f"stationary at d={d}" if d is not None else "not stationary for d<=2")
            return EXIT_OK
        if args.command == "fit-arima":
            model = cmd_fit_arima(series, args.order, out_dir)
            print(f"fitted ARIMA{model.order}; sigma2={model.sigma2:.6g}")
            return EXIT_OK

        spec = _resolve_split(series, args.split)
        cfg = _train_config(args)
        if args.command == "fit-hybrid":
            model = cmd_fit_hybrid(series, spec, args.order, cfg, out_dir)
            print(f"fitted hybrid: ARIMA{model.arima.order} + LSTM window {model.window_m}")
            return EXIT_OK
        if args.command == "compare":
            result = cmd_compare(series, spec, cfg, out_dir,
                                 window_L=args.window_L, refit=args.refit,
                                 order=args.order)
            return EXIT_OK if not result.failures else EXIT_TRAINING
    except IngestionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INGESTION
    except (AnalysisError, DegenerateInputError, NumericalError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ANALYSIS
    except (FitError,) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_TRAINING
    except (ConfigurationError, NavcastError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
