"""Tabular dataset model: schema, CSV loading, and one-hot encoding.

A dataset is a dense table of p feature columns plus one label column.
Categorical cells are stored as integer category ids; the id of a category
is its first-appearance position in file order, so ids are reproducible
from the file alone. Continuous cells are stored as float64. Labels are
always treated as categorical.

CSV handling follows the usual quoting conventions (header row required,
UTF-8). Rows with missing cells are rejected at load time rather than
imputed; column kinds are inferred (a column is continuous iff every cell
parses as a finite number) unless the caller declares them.
"""

from __future__ import annotations

import csv
import enum
from dataclasses import dataclass

import numpy as np

from .errors import (
    ContinuousPresentError,
    DataError,
    EmptyDatasetError,
    MissingValueError,
    MixedColumnError,
    RaggedRowError,
    UnknownLabelColumnError,
    UsageError,
)


class ColumnKind(enum.Enum):
    CATEGORICAL = "categorical"
    CONTINUOUS = "continuous"


@dataclass(frozen=True)
class Column:
    """One feature column: name, kind, and (for categorical) its categories.

    categories is ordered by first appearance in the source; a cell's id is
    its index into this tuple. Continuous columns keep an empty tuple.
    """

    name: str
    kind: ColumnKind
    categories: tuple[str, ...] = ()


@dataclass(frozen=True)
class Schema:
    """Feature columns in file order plus the label column's name and classes."""

    features: tuple[Column, ...]
    label_name: str
    classes: tuple[str, ...]

    @property
    def p(self) -> int:
        return len(self.features)

    @property
    def num_classes(self) -> int:
        return len(self.classes)

    def feature_index(self, name: str) -> int:
        for j, col in enumerate(self.features):
            if col.name == name:
                return j
        raise KeyError(name)

    def feature_names(self) -> list[str]:
        return [col.name for col in self.features]


@dataclass(frozen=True)
class Dataset:
    """Immutable table: one numpy column per feature plus an int label vector.

    Categorical columns are int64 arrays of category ids; continuous columns
    are float64 arrays. All columns and the label vector share length n.
    """

    schema: Schema
    columns: tuple[np.ndarray, ...]
    labels: np.ndarray

    def __post_init__(self) -> None:
        n = len(self.labels)
        if len(self.columns) != self.schema.p:
            raise DataError("column count does not match schema")
        for col, spec in zip(self.columns, self.schema.features):
            if len(col) != n:
                raise DataError("column %r length differs from label length" % spec.name)
            if spec.kind is ColumnKind.CATEGORICAL:
                if col.size and (col.min() < 0 or col.max() >= len(spec.categories)):
                    raise DataError("category id out of range in column %r" % spec.name)
        if self.labels.size and (self.labels.min() < 0 or self.labels.max() >= self.schema.num_classes):
            raise DataError("label id out of range")

    @property
    def n(self) -> int:
        return len(self.labels)

    @property
    def p(self) -> int:
        return self.schema.p

    @property
    def num_classes(self) -> int:
        return self.schema.num_classes

    def categorical_matrix(self) -> np.ndarray:
        """Return the n x p matrix of category ids.

        Raises ContinuousPresentError when any feature is continuous; callers
        that need this view should discretize first.
        """
        for spec in self.schema.features:
            if spec.kind is ColumnKind.CONTINUOUS:
                raise ContinuousPresentError(
                    "column %r is continuous; discretize before this operation" % spec.name
                )
        if self.p == 0:
            return np.empty((self.n, 0), dtype=np.int64)
        return np.column_stack([col.astype(np.int64, copy=False) for col in self.columns])

    def class_counts(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=self.num_classes).astype(np.int64)

    def decode_cell(self, row: int, j: int) -> str:
        spec = self.schema.features[j]
        if spec.kind is ColumnKind.CATEGORICAL:
            return spec.categories[int(self.columns[j][row])]
        return repr(float(self.columns[j][row]))

    def values_equal(self, other: "Dataset") -> bool:
        """Compare decoded cell values and labels, ignoring id assignment."""
        if self.n != other.n or self.p != other.p:
            return False
        for i in range(self.n):
            if self.schema.classes[self.labels[i]] != other.schema.classes[other.labels[i]]:
                return False
            for j in range(self.p):
                if self.decode_cell(i, j) != other.decode_cell(i, j):
                    return False
        return True


class _CategoryEncoder:
    """Assigns dense ids in first-appearance order."""

    def __init__(self) -> None:
        self.ids: dict[str, int] = {}

    def encode(self, value: str) -> int:
        got = self.ids.get(value)
        if got is None:
            got = len(self.ids)
            self.ids[value] = got
        return got

    def categories(self) -> tuple[str, ...]:
        return tuple(self.ids)


def _parses_as_real(cell: str) -> bool:
    try:
        v = float(cell)
    except ValueError:
        return False
    return np.isfinite(v)


def _normalize_kind(value: "ColumnKind | str") -> ColumnKind:
    if isinstance(value, ColumnKind):
        return value
    try:
        return ColumnKind(value.lower())
    except ValueError:
        raise UsageError("unknown column kind %r" % (value,)) from None


def load_csv(
    path: str,
    label_column: str,
    declared_kinds: "dict[str, ColumnKind | str] | None" = None,
) -> Dataset:
    """Load a CSV file with a header row into a Dataset.

    label_column names the class column; every other column becomes a
    feature. declared_kinds overrides kind inference per column name.
    Raises UnknownLabelColumnError, RaggedRowError, EmptyDatasetError,
    MissingValueError, or MixedColumnError on malformed input.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise EmptyDatasetError("file %r has no header row" % path) from None
        rows = list(reader)

    if len(set(header)) != len(header):
        raise DataError("duplicate column names in header")
    if label_column not in header:
        raise UnknownLabelColumnError(
            "label column %r not in header %r" % (label_column, header)
        )
    if not rows:
        raise EmptyDatasetError("file %r has a header but no data rows" % path)

    width = len(header)
    for i, row in enumerate(rows):
        if len(row) != width:
            raise RaggedRowError(
                "row %d has %d cells, header has %d" % (i + 2, len(row), width)
            )
        for cell in row:
            if cell == "":
                raise MissingValueError("row %d has an empty cell" % (i + 2))

    declared = {}
    if declared_kinds:
        for name, kind in declared_kinds.items():
            if name not in header:
                raise UsageError("declared kind for unknown column %r" % name)
            declared[name] = _normalize_kind(kind)

    label_pos = header.index(label_column)
    feature_names = [name for name in header if name != label_column]

    columns: list[np.ndarray] = []
    specs: list[Column] = []
    for name in feature_names:
        pos = header.index(name)
        cells = [row[pos] for row in rows]
        kind = declared.get(name)
        if kind is None:
            kind = (
                ColumnKind.CONTINUOUS
                if all(_parses_as_real(c) for c in cells)
                else ColumnKind.CATEGORICAL
            )
        if kind is ColumnKind.CONTINUOUS:
            bad = next((c for c in cells if not _parses_as_real(c)), None)
            if bad is not None:
                raise MixedColumnError(
                    "column %r declared continuous but cell %r is not a number" % (name, bad)
                )
            columns.append(np.array([float(c) for c in cells], dtype=np.float64))
            specs.append(Column(name, ColumnKind.CONTINUOUS))
        else:
            enc = _CategoryEncoder()
            columns.append(np.array([enc.encode(c) for c in cells], dtype=np.int64))
            specs.append(Column(name, ColumnKind.CATEGORICAL, enc.categories()))

    label_enc = _CategoryEncoder()
    labels = np.array([label_enc.encode(row[label_pos]) for row in rows], dtype=np.int64)

    schema = Schema(tuple(specs), label_column, label_enc.categories())
    return Dataset(schema, tuple(columns), labels)


def write_csv(ds: Dataset, path: str) -> None:
    """Write the dataset back to CSV; loading the result preserves values."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow([c.name for c in ds.schema.features] + [ds.schema.label_name])
        for i in range(ds.n):
            row = [ds.decode_cell(i, j) for j in range(ds.p)]
            row.append(ds.schema.classes[ds.labels[i]])
            writer.writerow(row)


def one_hot(ds: Dataset) -> tuple[np.ndarray, list[str]]:
    """Expand every categorical feature into indicator columns.

    Returns (matrix, names) where names follow the "column=category"
    convention in schema order. Raises ContinuousPresentError when a
    continuous column is present.
    """
    for spec in ds.schema.features:
        if spec.kind is ColumnKind.CONTINUOUS:
            raise ContinuousPresentError(
                "column %r is continuous; one-hot needs categorical data" % spec.name
            )
    blocks: list[np.ndarray] = []
    names: list[str] = []
    for j, spec in enumerate(ds.schema.features):
        k = len(spec.categories)
        block = np.zeros((ds.n, k), dtype=np.uint8)
        block[np.arange(ds.n), ds.columns[j]] = 1
        blocks.append(block)
        names.extend("%s=%s" % (spec.name, cat) for cat in spec.categories)
    if not blocks:
        return np.empty((ds.n, 0), dtype=np.uint8), names
    return np.concatenate(blocks, axis=1), names


def binary_dataset(
    matrix: np.ndarray,
    labels: np.ndarray,
    feature_names: "list[str] | None" = None,
    class_names: "tuple[str, ...] | None" = None,
    label_name: str = "Y",
) -> Dataset:
    """Wrap a 0/1 integer matrix as a categorical Dataset.

    Every feature gets the two categories ("0", "1") with ids equal to the
    cell values, even if one value never occurs; this keeps constant columns
    representable. Used by the synthetic generators.
    """
    matrix = np.asarray(matrix, dtype=np.int64)
    labels = np.asarray(labels, dtype=np.int64)
    n, p = matrix.shape
    if feature_names is None:
        feature_names = ["X%d" % (j + 1) for j in range(p)]
    if class_names is None:
        class_names = tuple(str(c) for c in range(int(labels.max()) + 1 if n else 1))
    feats = tuple(
        Column(name, ColumnKind.CATEGORICAL, ("0", "1")) for name in feature_names
    )
    schema = Schema(feats, label_name, class_names)
    cols = tuple(np.ascontiguousarray(matrix[:, j]) for j in range(p))
    return Dataset(schema, cols, labels)
