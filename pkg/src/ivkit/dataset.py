"""Columnar dataset: loading, validation, standardization, selection.

Rows are exchangeable observation units (for gridded data, one row per grid
cell); columns are named real-valued variables.  Loading rejects missing,
non-numeric, and non-finite cells outright rather than imputing.

The canonical CSV dialect is comma-separated with a mandatory header row,
``.`` decimal point, and numbers written with 17 significant digits so that
a write/load cycle is lossless.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
from dataclasses import dataclass
from typing import IO, Iterable, Sequence

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .exceptions import (
    CsvParseError,
    DegenerateVarianceError,
    NonFiniteValueError,
    SchemaError,
    ShapeMismatchError,
    UnknownVariableError,
)

#: printf-style format giving round-trip-safe decimal text for a float64.
NUMBER_FORMAT = "%.17g"


def format_number(x: float) -> str:
    return NUMBER_FORMAT % x


@dataclass(frozen=True)
class Dataset:
    """Immutable table of named, equal-length, finite float columns.

    Construction validates the schema (unique non-empty names), the shape
    (common length >= 1) and finiteness; the stored arrays are read-only,
    so a Dataset can be shared freely across threads.
    """

    names: tuple[str, ...]
    columns: tuple[np.ndarray, ...]

    def __post_init__(self):
        names = tuple(self.names)
        if len(names) == 0:
            raise SchemaError("dataset needs at least one column")
        seen = set()
        for name in names:
            if not isinstance(name, str) or name == "":
                raise SchemaError(f"invalid column name {name!r}")
            if name in seen:
                raise SchemaError(f"duplicate column name {name!r}")
            seen.add(name)
        if len(self.columns) != len(names):
            raise ShapeMismatchError(
                f"{len(names)} names but {len(self.columns)} columns"
            )
        frozen = []
        n = None
        for name, col in zip(names, self.columns):
            arr = np.array(col, dtype=np.float64, copy=True)
            if arr.ndim != 1:
                raise ShapeMismatchError(f"column {name!r} must be 1-dimensional")
            if n is None:
                n = arr.shape[0]
                if n < 1:
                    raise ShapeMismatchError("columns must have length >= 1")
            elif arr.shape[0] != n:
                raise ShapeMismatchError(
                    f"column {name!r} has length {arr.shape[0]}, expected {n}"
                )
            if not np.isfinite(arr).all():
                row = int(np.flatnonzero(~np.isfinite(arr))[0])
                raise NonFiniteValueError(
                    f"non-finite value in column {name!r}, row {row}"
                )
            arr.setflags(write=False)
            frozen.append(arr)
        object.__setattr__(self, "names", names)
        object.__setattr__(self, "columns", tuple(frozen))

    @property
    def n(self) -> int:
        """Number of rows (observation units)."""
        return self.columns[0].shape[0]

    def column(self, name: str) -> np.ndarray:
        """The stored (read-only) column vector for ``name``."""
        try:
            idx = self.names.index(name)
        except ValueError:
            raise UnknownVariableError(
                f"unknown variable {name!r}; available: {', '.join(self.names)}"
            ) from None
        return self.columns[idx]

    def select(self, names: Sequence[str]) -> list[np.ndarray]:
        """Columns in the requested order, without copying."""
        return [self.column(name) for name in names]

    @classmethod
    def from_dict(cls, data: dict[str, Iterable[float]]) -> "Dataset":
        return cls(tuple(data.keys()), tuple(np.asarray(v) for v in data.values()))


@dataclass(frozen=True)
class StandardizationRecord:
    """Per-variable affine parameters used to z-score a dataset."""

    scales: dict[str, tuple[float, float]]  # name -> (mean, sd)

    def __post_init__(self):
        for name, (_, sd) in self.scales.items():
            if not sd > 0.0:
                raise DegenerateVarianceError(
                    f"standard deviation for {name!r} must be positive"
                )

    def mean(self, name: str) -> float:
        return self.scales[name][0]

    def sd(self, name: str) -> float:
        return self.scales[name][1]

    def to_json(self) -> str:
        payload = {
            name: {"mean": mean, "sd": sd} for name, (mean, sd) in self.scales.items()
        }
        return json.dumps(payload, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "StandardizationRecord":
        payload = json.loads(text)
        return cls({name: (v["mean"], v["sd"]) for name, v in payload.items()})

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.to_json() + "\n")

    @classmethod
    def load(cls, path) -> "StandardizationRecord":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_json(fh.read())


def load_table(source: str | os.PathLike | IO, fmt: str = "csv") -> Dataset:
    """Load a Dataset from a CSV file path or an open byte/text stream.

    Error messages use 1-based file line numbers (the header is line 1).

    Raises
    ------
    CsvParseError
        Ragged row, or a cell that does not parse as a real number.
    SchemaError
        Duplicate or empty header names.
    NonFiniteValueError
        A cell parses but is NaN or infinite.
    """
    if fmt != "csv":
        raise ValueError(f"unsupported format {fmt!r}; only 'csv' is available")
    if hasattr(source, "read"):
        if isinstance(source.read(0), bytes):
            source = io.TextIOWrapper(source, encoding="utf-8", newline="")
        return _parse_csv(source)
    with open(source, "r", encoding="utf-8", newline="") as fh:
        return _parse_csv(fh)


def _parse_csv(stream: IO) -> Dataset:
    reader = csv.reader(stream)
    try:
        header = next(reader)
    except StopIteration:
        raise CsvParseError("empty input: missing header row") from None
    names = [h.strip() for h in header]
    seen = set()
    for name in names:
        if name == "":
            raise SchemaError("empty column name in header")
        if name in seen:
            raise SchemaError(f"duplicate column name {name!r}")
        seen.add(name)

    k = len(names)
    cells: list[list[float]] = [[] for _ in range(k)]
    for line, row in enumerate(reader, start=2):
        if len(row) != k:
            raise CsvParseError(f"line {line}: expected {k} cells, got {len(row)}")
        for j, cell in enumerate(row):
            try:
                value = float(cell)
            except ValueError:
                raise CsvParseError(
                    f"line {line}, column {names[j]!r}: cannot parse {cell!r}"
                ) from None
            if not math.isfinite(value):
                raise NonFiniteValueError(
                    f"line {line}, column {names[j]!r}: non-finite value {cell!r}"
                )
            cells[j].append(value)
    if not cells[0]:
        raise CsvParseError("no data rows")
    return Dataset(tuple(names), tuple(np.array(c) for c in cells))


def write_table(d: Dataset, dest: str | os.PathLike | IO) -> None:
    """Write a Dataset in the canonical CSV dialect."""
    if hasattr(dest, "write"):
        _emit_csv(d, dest)
        return
    with open(dest, "w", encoding="utf-8", newline="") as fh:
        _emit_csv(d, fh)


def _emit_csv(d: Dataset, fh: IO) -> None:
    fh.write(",".join(d.names) + "\n")
    for i in range(d.n):
        fh.write(",".join(format_number(col[i]) for col in d.columns) + "\n")


def table_to_csv(d: Dataset) -> str:
    buf = io.StringIO()
    _emit_csv(d, buf)
    return buf.getvalue()


def standardize(d: Dataset) -> tuple[Dataset, StandardizationRecord]:
    """Z-score every column (sample sd, divisor n-1).

    Returns the standardized dataset plus the affine parameters needed to
    undo the transformation.  Raises DegenerateVarianceError naming the
    first constant column encountered.
    """
    scales: dict[str, tuple[float, float]] = {}
    out = []
    for name, col in zip(d.names, d.columns):
        mean = float(col.mean())
        sd = float(col.std(ddof=1)) if d.n > 1 else 0.0
        if sd == 0.0:
            raise DegenerateVarianceError(f"column {name!r} has zero sample variance")
        scales[name] = (mean, sd)
        out.append((col - mean) / sd)
    return Dataset(d.names, tuple(out)), StandardizationRecord(scales)


def select(d: Dataset, names: Sequence[str]) -> list[np.ndarray]:
    """Module-level alias for :meth:`Dataset.select`."""
    return d.select(names)


class Standardizer(TransformerMixin, BaseEstimator):
    """Column z-scoring transformer with the fit/transform interface.

    Operates on 2-D arrays (scikit-learn convention) or on
    :class:`Dataset` instances, returning the same kind it was given.
    """

    def fit(self, X, y=None):
        if isinstance(X, Dataset):
            _, record = standardize(X)
            self.feature_names_in_ = np.asarray(X.names, dtype=object)
            self.means_ = np.array([record.mean(n) for n in X.names])
            self.sds_ = np.array([record.sd(n) for n in X.names])
        else:
            arr = np.asarray(X, dtype=np.float64)
            if arr.ndim != 2:
                raise ShapeMismatchError("expected a 2-D array or a Dataset")
            self.means_ = arr.mean(axis=0)
            self.sds_ = arr.std(axis=0, ddof=1) if arr.shape[0] > 1 else np.zeros(arr.shape[1])
            if np.any(self.sds_ == 0.0):
                j = int(np.flatnonzero(self.sds_ == 0.0)[0])
                raise DegenerateVarianceError(f"column {j} has zero sample variance")
        self.n_features_in_ = self.means_.shape[0]
        return self

    def transform(self, X):
        if isinstance(X, Dataset):
            cols = [
                (X.column(n) - m) / s
                for n, m, s in zip(self.feature_names_in_, self.means_, self.sds_)
            ]
            return Dataset(tuple(self.feature_names_in_), tuple(cols))
        arr = np.asarray(X, dtype=np.float64)
        return (arr - self.means_) / self.sds_

    def inverse_transform(self, X):
        if isinstance(X, Dataset):
            cols = [
                X.column(n) * s + m
                for n, m, s in zip(self.feature_names_in_, self.means_, self.sds_)
            ]
            return Dataset(tuple(self.feature_names_in_), tuple(cols))
        arr = np.asarray(X, dtype=np.float64)
        return arr * self.sds_ + self.means_

    def record(self) -> StandardizationRecord:
        names = getattr(self, "feature_names_in_", None)
        if names is None:
            names = [str(j) for j in range(self.n_features_in_)]
        return StandardizationRecord(
            {str(n): (float(m), float(s)) for n, m, s in zip(names, self.means_, self.sds_)}
        )
