"""navcast: ARIMA, from-scratch LSTM, and their additive hybrid for
one-step-ahead forecasting of fund net-asset-value series."""

from .arima import ArimaModel, ArimaOrder, OrderSearchReport, aic, fit, forecast_one, residuals, select_order
from .errors import (
    AnalysisError,
    ConfigurationError,
    DegenerateInputError,
    FitError,
    IngestionError,
    NavcastError,
    NumericalError,
)
from .hybrid import (
    CompareResult,
    EvalRun,
    HybridModel,
    compare_models,
    fit_hybrid,
    predict_one,
    sliding_window_evaluate,
)
from .lstm import (
    LstmCellParams,
    LstmNetwork,
    LstmState,
    SupervisedWindowSet,
    TrainConfig,
    bptt_gradients,
    cell_forward,
    forward,
    init_network,
    make_windows,
    train,
)
from .metrics import MetricsReport, build_report, mae, mse, rmse
from .series import (
    AdfResult,
    CorrelogramPoint,
    DifferencedSeries,
    ScaleParams,
    SplitSpec,
    TimeSeries,
    acf,
    adf_test,
    difference,
    fit_scale,
    integrate,
    minmax_scale,
    minmax_unscale,
    pacf,
    split,
)

__version__ = "0.1.0"
