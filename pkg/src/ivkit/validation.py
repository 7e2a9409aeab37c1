"""Input validation helpers used by the estimator and statistics layers."""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

from .exceptions import (
    DegenerateVarianceError,
    NonFiniteValueError,
    ShapeMismatchError,
)


def as_vector(x, name: str = "x", *, check_finite: bool = True) -> np.ndarray:
    """Coerce ``x`` to a 1-D float64 array.

    Raises ShapeMismatchError for non-1-D input and NonFiniteValueError
    if ``check_finite`` and any entry is NaN or infinite.
    """
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim != 1:
        raise ShapeMismatchError(f"{name} must be 1-dimensional, got shape {arr.shape}")
    if arr.size == 0:
        raise ShapeMismatchError(f"{name} must be non-empty")
    if check_finite and not np.isfinite(arr).all():
        raise NonFiniteValueError(f"{name} contains non-finite values")
    return arr


def as_vector_list(
    vs: Iterable, name: str = "columns", *, check_finite: bool = True
) -> list[np.ndarray]:
    """Coerce an iterable of column vectors, without checking lengths."""
    return [
        as_vector(v, f"{name}[{i}]", check_finite=check_finite)
        for i, v in enumerate(vs)
    ]


def check_same_length(*named: tuple[str, np.ndarray]) -> int:
    """Check that all named vectors share a common length; return it."""
    (first_name, first), *rest = named
    n = first.shape[0]
    for name, arr in rest:
        if arr.shape[0] != n:
            raise ShapeMismatchError(
                f"{name} has length {arr.shape[0]}, expected {n} (length of {first_name})"
            )
    return n


def check_nonconstant(x: np.ndarray, name: str = "x") -> None:
    """Reject vectors whose values are all (numerically) identical."""
    if x.shape[0] < 2 or np.ptp(x) == 0.0:
        raise DegenerateVarianceError(f"{name} has zero sample variance")


def column_matrix(columns: Sequence[np.ndarray]) -> np.ndarray:
    """Stack equal-length column vectors into an (n, k) matrix."""
    return np.column_stack(columns) if columns else np.empty((0, 0))
