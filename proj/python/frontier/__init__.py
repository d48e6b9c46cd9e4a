"""Python access to the frontier portfolio library."""

from ._frontier import (
    ConfigError,
    CostParams,
    DataError,
    DimensionError,
    FactorRiskModel,
    HistoryError,
    InvestorPreferences,
    NumericalError,
    discounted_returns,
    fit_factor_model,
    full_grid,
    pareto_filter,
    plan_trades,
    project_to_simplex,
    realized_return,
    run_cli,
    small_grid,
    summarize,
    transaction_cost,
    with_cash_slot,
)

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "CostParams",
    "DataError",
    "DimensionError",
    "FactorRiskModel",
    "HistoryError",
    "InvestorPreferences",
    "NumericalError",
    "discounted_returns",
    "fit_factor_model",
    "full_grid",
    "pareto_filter",
    "plan_trades",
    "project_to_simplex",
    "realized_return",
    "run_cli",
    "small_grid",
    "summarize",
    "transaction_cost",
    "with_cash_slot",
]
