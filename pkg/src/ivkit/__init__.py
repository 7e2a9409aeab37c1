"""ivkit: instrumental-variable estimation of average treatment effects.

Estimates the effect of a continuous treatment on an outcome from
observational data, with and without adjustment for measured confounders,
using ordinary least squares and instrumental-variable (two-stage least
squares) regression.  Includes a confounded-data simulator for estimator
comparison, correlation-based screening of candidate instruments, and a
command-line front end.
"""

from .dataset import (
    Dataset,
    StandardizationRecord,
    Standardizer,
    load_table,
    select,
    standardize,
    write_table,
)
from .estimators import (
    AdjustedOlsAte,
    AteEstimate,
    GFormulaTable,
    IvAte,
    OlsAte,
    TslsAte,
    confidence_interval,
    g_formula_binary,
    g_formula_table,
    hat_matrix,
    iv_just_identified,
    ols,
    ols_adj,
    tsls,
)
from .ivsearch import IvCandidate, SearchCriteria, evaluate_candidate, search, sweep
from .simulate import (
    METHODS,
    BoxplotStats,
    DgpConfig,
    ReplicateTable,
    boxplot_stats,
    generate,
    monte_carlo,
)
from .stats import (
    CorrelationReport,
    correlation_matrix,
    fisher_interval,
    partial_correlation,
    partial_report,
    pearson,
    pearson_report,
)

__version__ = "0.1.0"

__all__ = [
    "Dataset",
    "StandardizationRecord",
    "Standardizer",
    "load_table",
    "write_table",
    "standardize",
    "select",
    "CorrelationReport",
    "pearson",
    "pearson_report",
    "correlation_matrix",
    "partial_correlation",
    "partial_report",
    "fisher_interval",
    "AteEstimate",
    "GFormulaTable",
    "ols",
    "ols_adj",
    "iv_just_identified",
    "tsls",
    "g_formula_table",
    "g_formula_binary",
    "confidence_interval",
    "hat_matrix",
    "OlsAte",
    "AdjustedOlsAte",
    "IvAte",
    "TslsAte",
    "DgpConfig",
    "ReplicateTable",
    "BoxplotStats",
    "METHODS",
    "generate",
    "monte_carlo",
    "boxplot_stats",
    "SearchCriteria",
    "IvCandidate",
    "evaluate_candidate",
    "search",
    "sweep",
    "__version__",
]
