"""Exhaustive screening of instrument-confounder pairs.

A candidate pair (z, u) is screened against three correlation thresholds:
relevance (|corr(z, a)| large), independence (|corr(z, u)| small), and
exclusion (|partial corr(z, y | a)| small).  Thresholds apply to point
estimates; Fisher intervals are attached for reporting only.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

from .dataset import Dataset
from .exceptions import (
    DegenerateColumnWarning,
    DegenerateConditioningError,
    DegenerateVarianceError,
)
from .stats import CorrelationReport, fisher_interval, partial_correlation, pearson

__all__ = ["SearchCriteria", "IvCandidate", "evaluate_candidate", "search", "sweep"]


@dataclass(frozen=True)
class SearchCriteria:
    """Roles, candidate pools, and screening thresholds."""

    treatment: str
    outcome: str
    confounder_pool: tuple[str, ...]
    instrument_pool: tuple[str, ...]
    tau_relevance: float
    tau_independence: float
    tau_exclusion: float
    ci_level: float = 0.95

    def __post_init__(self):
        object.__setattr__(self, "confounder_pool", tuple(self.confounder_pool))
        object.__setattr__(self, "instrument_pool", tuple(self.instrument_pool))
        for label, tau in (
            ("tau_relevance", self.tau_relevance),
            ("tau_independence", self.tau_independence),
            ("tau_exclusion", self.tau_exclusion),
        ):
            if not 0.0 <= tau <= 1.0:
                raise ValueError(f"{label} must be in [0, 1], got {tau}")
        reserved = {self.treatment, self.outcome}
        for pool_name, pool in (
            ("confounder_pool", self.confounder_pool),
            ("instrument_pool", self.instrument_pool),
        ):
            overlap = reserved.intersection(pool)
            if overlap:
                raise ValueError(
                    f"{pool_name} must not contain treatment/outcome: {sorted(overlap)}"
                )


@dataclass(frozen=True)
class IvCandidate:
    """One scored instrument-confounder pairing."""

    instrument: str
    confounder: str
    rho_za: CorrelationReport
    rho_zu: CorrelationReport
    rho_zy_given_a: CorrelationReport
    passed: bool

    def to_dict(self) -> dict:
        return {
            "instrument": self.instrument,
            "confounder": self.confounder,
            "rho_za": self.rho_za.to_dict(),
            "rho_zu": self.rho_zu.to_dict(),
            "rho_zy_given_a": self.rho_zy_given_a.to_dict(),
            "passed": self.passed,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def _passes(
    c: SearchCriteria, rho_za: float, rho_zu: float, rho_zy_a: float
) -> bool:
    return (
        abs(rho_za) >= c.tau_relevance
        and abs(rho_zu) <= c.tau_independence
        and abs(rho_zy_a) <= c.tau_exclusion
    )


def _report(kind: str, value: float, n: int, level: float) -> CorrelationReport:
    # A perfect correlation (e.g. a candidate that duplicates another role)
    # has no Fisher interval; report the degenerate point so the candidate
    # can still be recorded as failing.
    if abs(value) >= 1.0:
        return CorrelationReport(kind=kind, value=value, n=n, level=level, ci=(value, value))
    return CorrelationReport(
        kind=kind, value=value, n=n, level=level, ci=fisher_interval(value, n, level)
    )


def _build_candidate(
    z_name: str,
    u_name: str,
    n: int,
    c: SearchCriteria,
    corr: Callable[[str, str], float],
) -> IvCandidate:
    r_za = corr(z_name, c.treatment)
    r_zu = corr(z_name, u_name)
    r_zy = corr(z_name, c.outcome)
    r_ya = corr(c.outcome, c.treatment)
    r_zy_a = partial_correlation(r_zy, r_za, r_ya)
    return IvCandidate(
        instrument=z_name,
        confounder=u_name,
        rho_za=_report("pearson", r_za, n, c.ci_level),
        rho_zu=_report("pearson", r_zu, n, c.ci_level),
        rho_zy_given_a=_report("partial", r_zy_a, n - 1, c.ci_level),
        passed=_passes(c, r_za, r_zu, r_zy_a),
    )


def evaluate_candidate(
    d: Dataset, z: str, u: str, c: SearchCriteria
) -> IvCandidate:
    """Score a single (instrument, confounder) pairing against the criteria."""
    cache: dict[tuple[str, str], float] = {}

    def corr(x: str, y: str) -> float:
        key = (x, y) if x <= y else (y, x)
        if key not in cache:
            cache[key] = pearson(d.column(key[0]), d.column(key[1]))
        return cache[key]

    return _build_candidate(z, u, d.n, c, corr)


def _all_candidates(d: Dataset, c: SearchCriteria) -> list[IvCandidate]:
    """Score every pool pairing, skipping degenerate columns with a warning."""
    cache: dict[tuple[str, str], float] = {}

    def corr(x: str, y: str) -> float:
        key = (x, y) if x <= y else (y, x)
        if key not in cache:
            cache[key] = pearson(d.column(key[0]), d.column(key[1]))
        return cache[key]

    out = []
    for z_name in c.instrument_pool:
        for u_name in c.confounder_pool:
            try:
                out.append(_build_candidate(z_name, u_name, d.n, c, corr))
            except (DegenerateVarianceError, DegenerateConditioningError) as exc:
                warnings.warn(
                    f"skipping pair ({z_name}, {u_name}): {exc}",
                    DegenerateColumnWarning,
                    stacklevel=3,
                )
    return out


def _rank(candidates: Iterable[IvCandidate]) -> list[IvCandidate]:
    passing = [cand for cand in candidates if cand.passed]
    passing.sort(key=lambda cand: (-abs(cand.rho_za.value), cand.instrument, cand.confounder))
    return passing


def search(d: Dataset, c: SearchCriteria) -> list[IvCandidate]:
    """All passing pairs, strongest relevance first (ties lexicographic)."""
    if not c.instrument_pool or not c.confounder_pool:
        raise ValueError("instrument and confounder pools must be non-empty")
    return _rank(_all_candidates(d, c))


def sweep(
    d: Dataset,
    c: SearchCriteria,
    grid: Sequence[tuple[float, float, float]],
) -> dict[tuple[float, float, float], list[IvCandidate]]:
    """Re-screen the same pairings across a grid of threshold triples.

    Correlations are computed once; each grid cell re-applies its own
    thresholds.  Returns the passing candidates per (relevance,
    independence, exclusion) cell, in grid order.
    """
    if not grid:
        raise ValueError("sweep grid must be non-empty")
    if not c.instrument_pool or not c.confounder_pool:
        raise ValueError("instrument and confounder pools must be non-empty")
    scored = _all_candidates(d, c)
    results: dict[tuple[float, float, float], list[IvCandidate]] = {}
    for taus in grid:
        tau_rel, tau_ind, tau_exc = taus
        cell = SearchCriteria(
            treatment=c.treatment,
            outcome=c.outcome,
            confounder_pool=c.confounder_pool,
            instrument_pool=c.instrument_pool,
            tau_relevance=tau_rel,
            tau_independence=tau_ind,
            tau_exclusion=tau_exc,
            ci_level=c.ci_level,
        )
        rescored = [
            IvCandidate(
                instrument=cand.instrument,
                confounder=cand.confounder,
                rho_za=cand.rho_za,
                rho_zu=cand.rho_zu,
                rho_zy_given_a=cand.rho_zy_given_a,
                passed=_passes(
                    cell,
                    cand.rho_za.value,
                    cand.rho_zu.value,
                    cand.rho_zy_given_a.value,
                ),
            )
            for cand in scored
        ]
        results[(tau_rel, tau_ind, tau_exc)] = _rank(rescored)
    return results
