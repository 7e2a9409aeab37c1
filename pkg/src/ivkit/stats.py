"""Correlation machinery: Pearson and first-order partial correlation with
Fisher-z confidence intervals.

Intervals assume independent rows.  For gridded data with spatial structure
they are therefore optimistic; callers should treat them as descriptive.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.stats import norm

from .dataset import Dataset
from .exceptions import (
    DegenerateConditioningError,
    InsufficientSampleError,
)
from .validation import as_vector, check_nonconstant, check_same_length

#: Excess magnitude beyond 1 that is treated as floating-point noise.
CLAMP_TOL = 1e-12


@dataclass(frozen=True)
class CorrelationReport:
    """A correlation point value with its Fisher-z confidence interval.

    ``n`` is the effective sample size used for the interval: the raw row
    count for plain correlations, reduced by the number of conditioning
    variables for partial correlations.
    """

    kind: str  # "pearson" or "partial"
    value: float
    n: int
    level: float
    ci: tuple[float, float]

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "value": self.value,
            "n": self.n,
            "ci": [self.ci[0], self.ci[1]],
            "level": self.level,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def pearson(x, y) -> float:
    """Sample Pearson correlation of two equal-length vectors.

    Requires n >= 3 and non-constant inputs; the result is clamped to
    [-1, 1] against floating-point overshoot.
    """
    xv = as_vector(x, "x")
    yv = as_vector(y, "y")
    n = check_same_length(("x", xv), ("y", yv))
    if n < 3:
        raise InsufficientSampleError(f"correlation needs n >= 3, got {n}")
    check_nonconstant(xv, "x")
    check_nonconstant(yv, "y")
    xc = xv - xv.mean()
    yc = yv - yv.mean()
    r = float(xc @ yc / math.sqrt((xc @ xc) * (yc @ yc)))
    return min(1.0, max(-1.0, r))


def correlation_matrix(d: Dataset, names: Sequence[str]) -> np.ndarray:
    """Symmetric matrix of pairwise Pearson correlations for ``names``."""
    if len(names) < 2:
        raise InsufficientSampleError("correlation matrix needs at least two variables")
    cols = d.select(names)
    k = len(cols)
    out = np.eye(k)
    for i in range(k):
        for j in range(i + 1, k):
            out[i, j] = out[j, i] = pearson(cols[i], cols[j])
    return out


def partial_correlation(r_zy: float, r_za: float, r_ya: float) -> float:
    """First-order partial correlation of z and y given a, from the three
    pairwise correlations.

    The correlations involving the conditioning variable (``r_za``,
    ``r_ya``) must be strictly inside (-1, 1) or the denominator
    degenerates; ``r_zy`` may be anything in [-1, 1].  Tiny excursions
    beyond [-1, 1] (up to ``CLAMP_TOL``) are clamped; larger ones indicate
    an inconsistent input triple and are returned as-is.
    """
    if not -1.0 <= r_zy <= 1.0:
        raise ValueError(f"r_zy = {r_zy} must lie in [-1, 1]")
    for label, r in (("r_za", r_za), ("r_ya", r_ya)):
        if not -1.0 < r < 1.0:
            raise DegenerateConditioningError(
                f"{label} = {r} must lie strictly inside (-1, 1)"
            )
    denom = (1.0 - r_za**2) * (1.0 - r_ya**2)
    value = (r_zy - r_za * r_ya) / math.sqrt(denom)
    if 1.0 < abs(value) <= 1.0 + CLAMP_TOL:
        value = math.copysign(1.0, value)
    return value


def fisher_interval(r: float, n: int, level: float = 0.95) -> tuple[float, float]:
    """Fisher-z confidence interval for a correlation from ``n`` samples."""
    if not -1.0 < r < 1.0:
        raise DegenerateConditioningError(f"r = {r} must lie strictly inside (-1, 1)")
    if n < 4:
        raise InsufficientSampleError(f"Fisher interval needs n >= 4, got {n}")
    if not 0.0 < level < 1.0:
        raise ValueError(f"level must be in (0, 1), got {level}")
    z = float(norm.ppf(0.5 + level / 2.0))
    half_width = z / math.sqrt(n - 3)
    center = math.atanh(r)
    return (math.tanh(center - half_width), math.tanh(center + half_width))


def pearson_report(x, y, level: float = 0.95) -> CorrelationReport:
    """Pearson correlation with its Fisher interval, as a report record."""
    xv = as_vector(x, "x")
    yv = as_vector(y, "y")
    n = check_same_length(("x", xv), ("y", yv))
    r = pearson(xv, yv)
    return CorrelationReport(
        kind="pearson", value=r, n=n, level=level, ci=fisher_interval(r, n, level)
    )


def partial_report(z, y, given, level: float = 0.95) -> CorrelationReport:
    """First-order partial correlation report of z and y given one variable.

    The interval's effective sample size is n - 1, one fewer than the raw
    row count, to account for the conditioning variable.
    """
    zv = as_vector(z, "z")
    yv = as_vector(y, "y")
    av = as_vector(given, "given")
    n = check_same_length(("z", zv), ("y", yv), ("given", av))
    value = partial_correlation(
        pearson(zv, yv), pearson(zv, av), pearson(yv, av)
    )
    n_eff = n - 1
    return CorrelationReport(
        kind="partial",
        value=value,
        n=n_eff,
        level=level,
        ci=fisher_interval(value, n_eff, level),
    )
