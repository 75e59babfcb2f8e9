"""Forecast instability tests over block partitions of out-of-sample losses."""

from ._fbreak import (
    FbreakError,
    __version__,
    cdf_V,
    critical_value,
    forecast_losses,
    newey_west,
    preset_names,
    quantile_V,
    reproduce,
    run_experiment,
    simulate,
    test_forecasts,
    test_losses,
)

__all__ = [
    "FbreakError",
    "__version__",
    "cdf_V",
    "critical_value",
    "forecast_losses",
    "newey_west",
    "preset_names",
    "quantile_V",
    "reproduce",
    "run_experiment",
    "simulate",
    "test_forecasts",
    "test_losses",
]
