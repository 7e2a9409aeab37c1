"""Numerically stable least-squares core.

All regressions in the package go through :func:`lstsq_fit`, which solves
via the singular value decomposition instead of forming explicit inverses.
Rank deficiency is detected at a relative tolerance of the largest singular
value and reported with the names of the offending columns when labels are
supplied.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .exceptions import SingularSystemError

#: Relative singular-value cutoff below which a design counts as rank deficient.
RANK_RTOL = 1e-10


@dataclass(frozen=True)
class LstsqFit:
    """Result of a full-rank least-squares solve.

    Attributes
    ----------
    coef : (p,) coefficient vector
    fitted : (n,) fitted values ``X @ coef``
    residuals : (n,) ``y - fitted``
    xtx_inv : (p, p) unscaled coefficient covariance ``(X^T X)^{-1}``
    cond : condition number of the design (ratio of singular values)
    """

    coef: np.ndarray
    fitted: np.ndarray
    residuals: np.ndarray
    xtx_inv: np.ndarray
    cond: float


def lstsq_fit(
    X: np.ndarray,
    y: np.ndarray,
    labels: Sequence[str] | None = None,
) -> LstsqFit:
    """Solve ``min ||X b - y||`` by SVD, requiring X to be full rank.

    Raises SingularSystemError when the design is rank deficient; the
    message names columns that are (numerically) linear combinations of
    the others when ``labels`` are given.
    """
    n, p = X.shape
    if n < p:
        raise SingularSystemError(f"need at least {p} rows for {p} regressors, got {n}")
    u, s, vt = np.linalg.svd(X, full_matrices=False)
    rank = int(np.count_nonzero(s > RANK_RTOL * s[0])) if s[0] > 0 else 0
    if rank < p:
        raise SingularSystemError(_describe_deficiency(X, labels, p - rank))
    coef = vt.T @ ((u.T @ y) / s)
    fitted = X @ coef
    xtx_inv = (vt.T / s**2) @ vt
    return LstsqFit(
        coef=coef,
        fitted=fitted,
        residuals=y - fitted,
        xtx_inv=xtx_inv,
        cond=float(s[0] / s[-1]),
    )


def hat_matrix(Z: np.ndarray) -> np.ndarray:
    """Projection matrix onto the column space of a full-rank ``Z``.

    Computed as ``Q Q^T`` from the reduced QR decomposition, which is the
    stable equivalent of the textbook ``Z (Z^T Z)^{-1} Z^T`` form.  Forms an
    (n, n) matrix; intended for diagnostics on moderate sample sizes.
    """
    n, p = Z.shape
    q, r = np.linalg.qr(Z)
    diag = np.abs(np.diag(r))
    if diag.min() <= RANK_RTOL * max(diag.max(), np.finfo(float).tiny):
        raise SingularSystemError("projection requires a full-rank column set")
    return q @ q.T


def _describe_deficiency(
    X: np.ndarray, labels: Sequence[str] | None, deficiency: int
) -> str:
    base = f"design matrix is rank deficient (deficiency {deficiency})"
    if labels is None:
        return base
    collinear = []
    for j, label in enumerate(labels):
        others = np.delete(X, j, axis=1)
        if others.shape[1] == 0:
            continue
        target = X[:, j]
        proj, *_ = np.linalg.lstsq(others, target, rcond=None)
        resid = target - others @ proj
        scale = np.linalg.norm(target)
        if scale == 0 or np.linalg.norm(resid) <= 1e-8 * scale:
            collinear.append(label)
    if collinear:
        return f"{base}; collinear columns: {', '.join(collinear)}"
    return base
