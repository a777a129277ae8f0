"""Quantify volatility clustering in return series.

Pipeline: load prices, take log returns, standardize, bin into symbols,
estimate each symbol's successor distribution, and fit the slopes of the
mean absolute successor value against the conditioning symbol value
(dvc_p for nonnegative symbols, dvc_n for negative ones). The
:mod:`volclust.garch` and :mod:`volclust.surrogate` modules supply the
synthetic-data machinery (GARCH(1,1) simulate/fit/filter, seeded
shuffling) used to validate the measure.
"""

from .dvc import (
    AnalysisConfig,
    ConditionalDistribution,
    DvcPoint,
    DvcProfile,
    DvcResult,
    PipelineError,
    analyze,
    conditional_abs_mean,
    conditional_distribution,
    dvc_profile,
    fit_dvc,
)
from .ingest import PriceSeries, ReturnSeries, compute_returns, load_prices, standardize
from .symbolize import BinningScheme, SymbolicSeries, build_bins, symbol_value, symbolize

__version__ = "0.1.0"

__all__ = [
    "AnalysisConfig",
    "BinningScheme",
    "ConditionalDistribution",
    "DvcPoint",
    "DvcProfile",
    "DvcResult",
    "PipelineError",
    "PriceSeries",
    "ReturnSeries",
    "SymbolicSeries",
    "analyze",
    "build_bins",
    "compute_returns",
    "conditional_abs_mean",
    "conditional_distribution",
    "dvc_profile",
    "fit_dvc",
    "load_prices",
    "standardize",
    "symbol_value",
    "symbolize",
    "__version__",
]
