"""Average-treatment-effect estimators for a single continuous treatment.

Four regression-based estimators are provided, differing in how they handle
an unmeasured or measured confounder:

* :func:`ols` — naive regression of outcome on treatment.
* :func:`ols_adj` — multiple regression adjusting for measured covariates.
* :func:`iv_just_identified` — ratio estimator using one instrument.
* :func:`tsls` — two-stage least squares, supporting several instruments
  and optional exogenous covariates (the adjusted-IV configuration).

A g-formula estimator for the binary-treatment, discrete-confounder case is
included as an oracle for cross-checks, along with scikit-learn-style
wrapper classes (``fit`` / ``predict`` / ``get_params``) so the estimators
compose with standard pipeline tooling.

All estimators include an intercept (equivalently, center the inputs) by
default; pass ``intercept=False`` only for data already standardized to
mean zero.  Standard errors are homoskedastic; for the two-stage estimator
the residual variance is computed from the observed treatment, not the
first-stage fitted values, following standard IV practice.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import norm
from sklearn.base import BaseEstimator

from .exceptions import (
    PositivityError,
    ShapeMismatchError,
    WeakInstrumentError,
    WeakInstrumentWarning,
)
from .linalg import LstsqFit, hat_matrix, lstsq_fit
from .stats import pearson
from .validation import as_vector, as_vector_list, check_same_length

__all__ = [
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
]

#: Correlations below this are treated as "no instrument" (hard failure).
NO_INSTRUMENT_TOL = 1e-8

#: First-stage F below this rule-of-thumb triggers a weak-instrument warning.
WEAK_F_THRESHOLD = 10.0

#: Pairwise covariate correlation above this is flagged as near-collinear.
COLLINEARITY_THRESHOLD = 0.99


@dataclass(frozen=True)
class AteEstimate:
    """Point estimate of the average treatment effect with its uncertainty.

    ``ci`` is the 95% interval ``ate +/- z_{0.975} * se``; other levels are
    available through :func:`confidence_interval`.  ``diagnostics`` holds
    method-specific scalars such as ``first_stage_corr`` or
    ``residual_variance``.
    """

    method: str  # ols | ols_adj | iv | tsls | iv_adj
    ate: float
    se: float
    ci: tuple[float, float]
    n: int
    diagnostics: dict[str, float] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "ate": self.ate,
            "se": self.se,
            "ci": [self.ci[0], self.ci[1]],
            "n": self.n,
            "diagnostics": dict(self.diagnostics),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


@dataclass(frozen=True)
class GFormulaTable:
    """Stratified cell means backing the binary-treatment g-formula."""

    levels: np.ndarray
    mean_treated: np.ndarray
    mean_control: np.ndarray
    probs: np.ndarray

    def __post_init__(self):
        if abs(float(self.probs.sum()) - 1.0) > 1e-12:
            raise ValueError("level probabilities must sum to 1")
        if np.any(self.probs < 0):
            raise ValueError("level probabilities must be nonnegative")

    def ate(self) -> float:
        return float(((self.mean_treated - self.mean_control) * self.probs).sum())


def _z_quantile(level: float) -> float:
    if not 0.0 < level < 1.0:
        raise ValueError(f"level must be in (0, 1), got {level}")
    return float(norm.ppf(0.5 + level / 2.0))


def _wald_ci(ate: float, se: float, level: float = 0.95) -> tuple[float, float]:
    half = _z_quantile(level) * se
    return (ate - half, ate + half)


def _design(columns: list[np.ndarray], intercept: bool, labels: list[str]):
    """Assemble a design matrix, prepending a constant column if asked."""
    n = columns[0].shape[0]
    if intercept:
        return np.column_stack([np.ones(n)] + columns), ["const"] + labels
    return np.column_stack(columns), list(labels)


def _max_pairwise_corr(columns: list[np.ndarray]) -> float | None:
    if len(columns) < 2:
        return None
    worst = 0.0
    for i in range(len(columns)):
        for j in range(i + 1, len(columns)):
            worst = max(worst, abs(pearson(columns[i], columns[j])))
    return worst


def _ols_core(
    a: np.ndarray,
    u: list[np.ndarray],
    y: np.ndarray,
    intercept: bool,
    method: str,
) -> tuple[AteEstimate, LstsqFit, np.ndarray]:
    labels = ["a"] + [f"u{k + 1}" for k in range(len(u))]
    X, labels = _design([a] + u, intercept, labels)
    n, p = X.shape
    if n <= p:
        raise ShapeMismatchError(f"need n > {p} observations, got {n}")
    fit = lstsq_fit(X, y, labels)
    ia = labels.index("a")
    ate = float(fit.coef[ia])
    sigma2 = float(fit.residuals @ fit.residuals) / (n - p)
    se = math.sqrt(sigma2 * fit.xtx_inv[ia, ia])
    diagnostics = {"residual_variance": sigma2, "condition_number": fit.cond}
    worst = _max_pairwise_corr(u)
    if worst is not None:
        diagnostics["max_covariate_corr"] = worst
    estimate = AteEstimate(
        method=method,
        ate=ate,
        se=se,
        ci=_wald_ci(ate, se),
        n=n,
        diagnostics=diagnostics,
    )
    return estimate, fit, X


def ols(a, y, intercept: bool = True) -> AteEstimate:
    """Least-squares regression of outcome on treatment alone.

    Consistent for the ATE only when no confounder correlates with the
    treatment; under confounding this is the biased baseline the other
    estimators are compared against.

    Parameters
    ----------
    a, y : array-like, shape (n,)
        Treatment and outcome observations.
    intercept : bool
        Include a constant term (disable only for pre-standardized data).
    """
    av = as_vector(a, "a")
    yv = as_vector(y, "y")
    check_same_length(("a", av), ("y", yv))
    estimate, _, _ = _ols_core(av, [], yv, intercept, "ols")
    return estimate


def ols_adj(a, u, y, intercept: bool = True) -> AteEstimate:
    """Multiple regression of outcome on treatment plus measured covariates.

    ``u`` is a sequence of covariate vectors (may be empty, reducing to
    :func:`ols`).  The reported effect is the coefficient on the treatment.
    Diagnostics carry the design condition number and, with two or more
    covariates, their largest pairwise correlation magnitude.
    """
    av = as_vector(a, "a")
    yv = as_vector(y, "y")
    uv = as_vector_list(u, "u")
    check_same_length(("a", av), ("y", yv), *((f"u[{k}]", c) for k, c in enumerate(uv)))
    estimate, _, _ = _ols_core(av, uv, yv, intercept, "ols_adj")
    return estimate


def _iv_core(
    z: np.ndarray, a: np.ndarray, y: np.ndarray, intercept: bool
) -> tuple[AteEstimate, float]:
    n = z.shape[0]
    if np.ptp(z) == 0.0:
        raise WeakInstrumentError("instrument is constant")
    first_stage_corr = pearson(z, a)
    if abs(first_stage_corr) < NO_INSTRUMENT_TOL:
        raise WeakInstrumentError(
            f"|corr(z, a)| = {abs(first_stage_corr):.3g} is numerically zero"
        )
    if intercept:
        zc, ac, yc = z - z.mean(), a - a.mean(), y - y.mean()
        dof = n - 2
    else:
        zc, ac, yc = z, a, y
        dof = n - 1
    zta = float(zc @ ac)
    ate = float(zc @ yc) / zta
    resid = yc - ate * ac
    sigma2 = float(resid @ resid) / dof
    se = math.sqrt(sigma2 * float(zc @ zc)) / abs(zta)
    estimate = AteEstimate(
        method="iv",
        ate=ate,
        se=se,
        ci=_wald_ci(ate, se),
        n=n,
        diagnostics={
            "first_stage_corr": first_stage_corr,
            "residual_variance": sigma2,
        },
    )
    return estimate, ate


def iv_just_identified(z, a, y, intercept: bool = True) -> AteEstimate:
    """Ratio instrumental-variable estimator for a single instrument.

    Computes the moment ratio of instrument-outcome to instrument-treatment
    cross products on centered data.  Consistent for the ATE when the
    instrument is relevant, independent of the unmeasured confounder, and
    excluded from the outcome equation.

    Raises WeakInstrumentError when the instrument-treatment correlation is
    numerically indistinguishable from zero.
    """
    zv = as_vector(z, "z")
    av = as_vector(a, "a")
    yv = as_vector(y, "y")
    check_same_length(("z", zv), ("a", av), ("y", yv))
    estimate, _ = _iv_core(zv, av, yv, intercept)
    return estimate


def _tsls_core(
    z: list[np.ndarray],
    a: np.ndarray,
    w: list[np.ndarray],
    y: np.ndarray,
    intercept: bool,
):
    n = a.shape[0]
    z_labels = [f"z{k + 1}" for k in range(len(z))]
    w_labels = [f"w{k + 1}" for k in range(len(w))]

    # Stage 1: project the treatment onto instruments (+ exogenous covariates).
    Z1, labels1 = _design(z + w, intercept, z_labels + w_labels)
    if n <= Z1.shape[1]:
        raise ShapeMismatchError(f"need n > {Z1.shape[1]} observations, got {n}")
    stage1 = lstsq_fit(Z1, a, labels1)
    a_hat = stage1.fitted

    # Stage 2: regress the outcome on the fitted treatment (+ covariates).
    X2, labels2 = _design([a_hat] + w, intercept, ["a"] + w_labels)
    if n <= X2.shape[1]:
        raise ShapeMismatchError(f"need n > {X2.shape[1]} observations, got {n}")
    stage2 = lstsq_fit(X2, y, labels2)
    ia = labels2.index("a")
    ate = float(stage2.coef[ia])

    # Residuals for the error variance use the observed treatment.
    X_obs, _ = _design([a] + w, intercept, ["a"] + w_labels)
    resid = y - X_obs @ stage2.coef
    sigma2 = float(resid @ resid) / (n - X2.shape[1])
    se = math.sqrt(sigma2 * stage2.xtx_inv[ia, ia])

    diagnostics = _first_stage_diagnostics(stage1, a, w, intercept, len(z), n)
    diagnostics["residual_variance"] = sigma2
    worst = _max_pairwise_corr(w)
    if worst is not None:
        diagnostics["max_covariate_corr"] = worst

    estimate = AteEstimate(
        method="iv_adj" if w else "tsls",
        ate=ate,
        se=se,
        ci=_wald_ci(ate, se),
        n=n,
        diagnostics=diagnostics,
    )
    return estimate, stage1, stage2, X2, X_obs


def _first_stage_diagnostics(
    stage1: LstsqFit,
    a: np.ndarray,
    w: list[np.ndarray],
    intercept: bool,
    n_instruments: int,
    n: int,
) -> dict[str, float]:
    rss_full = float(stage1.residuals @ stage1.residuals)
    # Restricted model: treatment on covariates (and constant) only.
    if w:
        X_r, _ = _design(list(w), intercept, [f"w{k + 1}" for k in range(len(w))])
        coef_r, *_ = np.linalg.lstsq(X_r, a, rcond=None)
        resid_r = a - X_r @ coef_r
        rss_restricted = float(resid_r @ resid_r)
    elif intercept:
        centered = a - a.mean()
        rss_restricted = float(centered @ centered)
    else:
        rss_restricted = float(a @ a)

    diagnostics: dict[str, float] = {}
    if rss_restricted > 0.0:
        diagnostics["first_stage_r2"] = 1.0 - rss_full / rss_restricted
    p1 = n_instruments + len(w) + (1 if intercept else 0)
    if rss_full > 0.0 and n > p1:
        f_stat = ((rss_restricted - rss_full) / n_instruments) / (rss_full / (n - p1))
        diagnostics["first_stage_f"] = f_stat
        if f_stat < WEAK_F_THRESHOLD:
            diagnostics["weak_instrument"] = 1.0
            warnings.warn(
                f"first-stage F = {f_stat:.2f} is below {WEAK_F_THRESHOLD:g}; "
                "IV estimates may be unreliable",
                WeakInstrumentWarning,
                stacklevel=4,
            )
    return diagnostics


def tsls(z, a, w, y, intercept: bool = True) -> AteEstimate:
    """Two-stage least-squares estimate of the treatment effect.

    Parameters
    ----------
    z : sequence of array-like
        One or more instrument vectors; must be jointly full rank.
    a : array-like
        Treatment vector.
    w : sequence of array-like
        Measured exogenous covariates, appended to both stages; may be
        empty.  Non-empty ``w`` yields the adjusted-IV configuration and
        the estimate is tagged ``iv_adj`` instead of ``tsls``.
    y : array-like
        Outcome vector.
    intercept : bool
        Include a constant in both stages.

    Notes
    -----
    A weak first stage (F below 10) is reported in the diagnostics and as a
    :class:`WeakInstrumentWarning`, never as a hard error.
    """
    zv = as_vector_list(z, "z")
    if not zv:
        raise ShapeMismatchError("at least one instrument is required")
    av = as_vector(a, "a")
    yv = as_vector(y, "y")
    wv = as_vector_list(w, "w")
    check_same_length(
        ("a", av),
        ("y", yv),
        *((f"z[{k}]", c) for k, c in enumerate(zv)),
        *((f"w[{k}]", c) for k, c in enumerate(wv)),
    )
    estimate, *_ = _tsls_core(zv, av, wv, yv, intercept)
    return estimate


def g_formula_table(a, u, y) -> GFormulaTable:
    """Build the stratified-means table for a binary treatment.

    ``u`` is treated as a discrete confounder; its level probabilities are
    the empirical frequencies.  Every (treatment value, level) cell must be
    occupied, otherwise PositivityError names the empty cell.
    """
    av = as_vector(a, "a")
    uv = as_vector(u, "u")
    yv = as_vector(y, "y")
    n = check_same_length(("a", av), ("u", uv), ("y", yv))
    values = np.unique(av)
    if not np.array_equal(values, [0.0, 1.0]):
        raise ValueError("treatment must be binary with both 0 and 1 present")
    treated = av == 1.0
    levels = np.unique(uv)
    mean_treated = np.empty(levels.shape[0])
    mean_control = np.empty(levels.shape[0])
    probs = np.empty(levels.shape[0])
    for i, level in enumerate(levels):
        in_level = uv == level
        for arm, sink in ((treated, mean_treated), (~treated, mean_control)):
            cell = yv[in_level & arm]
            if cell.shape[0] == 0:
                raise PositivityError(
                    f"no observations with a={1 if sink is mean_treated else 0}, u={level:g}"
                )
            sink[i] = cell.mean()
        probs[i] = in_level.sum() / n
    return GFormulaTable(levels, mean_treated, mean_control, probs)


def g_formula_binary(a, u, y) -> float:
    """Confounder-standardized mean outcome contrast for a binary treatment."""
    return g_formula_table(a, u, y).ate()


def confidence_interval(e: AteEstimate, level: float) -> tuple[float, float]:
    """Normal-theory interval for an estimate at an arbitrary level."""
    return _wald_ci(e.ate, e.se, level)


# ---------------------------------------------------------------------------
# scikit-learn style wrappers
# ---------------------------------------------------------------------------


class _AteEstimatorBase(BaseEstimator):
    """Shared plumbing for the fit/predict wrapper classes."""

    def _store(self, estimate: AteEstimate) -> None:
        self.result_ = estimate
        self.ate_ = estimate.ate
        self.se_ = estimate.se
        self.ci_ = estimate.ci
        self.n_ = estimate.n
        self.diagnostics_ = dict(estimate.diagnostics)

    def _linear_predict(self, columns: list[np.ndarray]) -> np.ndarray:
        X, _ = _design(columns, self.intercept, [""] * len(columns))
        return X @ self.coef_


class OlsAte(_AteEstimatorBase):
    """Naive outcome-on-treatment regression with a ``fit``/``predict`` API."""

    def __init__(self, intercept: bool = True):
        self.intercept = intercept

    def fit(self, a, y):
        av = as_vector(a, "a")
        yv = as_vector(y, "y")
        check_same_length(("a", av), ("y", yv))
        estimate, fit, _ = _ols_core(av, [], yv, self.intercept, "ols")
        self._store(estimate)
        self.coef_ = fit.coef
        self.intercept_ = float(fit.coef[0]) if self.intercept else 0.0
        return self

    def predict(self, a):
        return self._linear_predict([as_vector(a, "a")])


class AdjustedOlsAte(_AteEstimatorBase):
    """Covariate-adjusted regression; ``covariate_coef_`` holds the
    coefficients on the adjustment columns."""

    def __init__(self, intercept: bool = True):
        self.intercept = intercept

    def fit(self, a, y, u):
        av = as_vector(a, "a")
        yv = as_vector(y, "y")
        uv = as_vector_list(u, "u")
        check_same_length(
            ("a", av), ("y", yv), *((f"u[{k}]", c) for k, c in enumerate(uv))
        )
        estimate, fit, _ = _ols_core(av, uv, yv, self.intercept, "ols_adj")
        self._store(estimate)
        self.coef_ = fit.coef
        offset = 1 if self.intercept else 0
        self.intercept_ = float(fit.coef[0]) if self.intercept else 0.0
        self.covariate_coef_ = fit.coef[offset + 1 :]
        return self

    def predict(self, a, u):
        return self._linear_predict(
            [as_vector(a, "a")] + as_vector_list(u, "u")
        )


class IvAte(_AteEstimatorBase):
    """Just-identified instrumental-variable ratio estimator."""

    def __init__(self, intercept: bool = True):
        self.intercept = intercept

    def fit(self, a, y, z):
        zv = as_vector(z, "z")
        av = as_vector(a, "a")
        yv = as_vector(y, "y")
        check_same_length(("z", zv), ("a", av), ("y", yv))
        estimate, ate = _iv_core(zv, av, yv, self.intercept)
        self._store(estimate)
        self.intercept_ = float(yv.mean() - ate * av.mean()) if self.intercept else 0.0
        return self

    def predict(self, a):
        return self.intercept_ + self.ate_ * as_vector(a, "a")


class TslsAte(_AteEstimatorBase):
    """Two-stage least squares with optional exogenous covariates.

    After ``fit``, ``treatment_fitted_`` holds the first-stage fitted
    treatment and ``coef_`` the second-stage coefficient vector, which is
    enough to reconstruct both stage regressions for diagnostics.
    """

    def __init__(self, intercept: bool = True):
        self.intercept = intercept

    def fit(self, a, y, z, w=None):
        zv = as_vector_list(z, "z")
        if not zv:
            raise ShapeMismatchError("at least one instrument is required")
        av = as_vector(a, "a")
        yv = as_vector(y, "y")
        wv = as_vector_list(w, "w") if w is not None else []
        check_same_length(
            ("a", av),
            ("y", yv),
            *((f"z[{k}]", c) for k, c in enumerate(zv)),
            *((f"w[{k}]", c) for k, c in enumerate(wv)),
        )
        estimate, stage1, stage2, X2, _ = _tsls_core(zv, av, wv, yv, self.intercept)
        self._store(estimate)
        self.first_stage_coef_ = stage1.coef
        self.treatment_fitted_ = stage1.fitted
        self.coef_ = stage2.coef
        self.intercept_ = float(stage2.coef[0]) if self.intercept else 0.0
        self._n_covariates = len(wv)
        return self

    def predict(self, a, w=None):
        wv = as_vector_list(w, "w") if w is not None else []
        if len(wv) != self._n_covariates:
            raise ShapeMismatchError(
                f"expected {self._n_covariates} covariate columns, got {len(wv)}"
            )
        return self._linear_predict([as_vector(a, "a")] + wv)
