"""Labeled matrix containers shared across the package.

All containers validate their structural invariants at construction time
so downstream numerics can assume them. Values are always stored as
float64 arrays; labels are plain strings.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.distance import pdist, squareform


def _as_float_matrix(values, name: str) -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be a 2-d array, got ndim={arr.ndim}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite entries")
    return arr


def _default_labels(count: int, prefix: str = "x") -> list[str]:
    return [f"{prefix}{i + 1}" for i in range(count)]


def _check_square_symmetric(arr: np.ndarray, labels: list[str], name: str) -> None:
    n_rows, n_cols = arr.shape
    if n_rows != n_cols:
        raise ValueError(f"{name} must be square, got shape {arr.shape}")
    if len(labels) != n_rows:
        raise ValueError(
            f"{name} has {n_rows} rows but {len(labels)} labels"
        )
    if not np.array_equal(arr, arr.T):
        raise ValueError(f"{name} must be symmetric")
    if np.any(np.diag(arr) != 0.0):
        raise ValueError(f"{name} must have a zero diagonal")


@dataclass
class DissimilarityMatrix:
    """Square symmetric nonnegative dissimilarities with a zero diagonal."""

    values: np.ndarray
    labels: list[str] = field(default_factory=list)

    def __post_init__(self) -> None:
        self.values = _as_float_matrix(self.values, "dissimilarity matrix")
        self.labels = [str(x) for x in self.labels] or _default_labels(
            self.values.shape[0]
        )
        _check_square_symmetric(self.values, self.labels, "dissimilarity matrix")
        if np.any(self.values < 0.0):
            raise ValueError("dissimilarity matrix must be nonnegative")

    @property
    def n(self) -> int:
        return self.values.shape[0]

    def condensed(self) -> np.ndarray:
        """Strict upper triangle in row-major pair order."""
        iu = np.triu_indices(self.n, k=1)
        return self.values[iu]


@dataclass
class UltrametricMatrix:
    """Square symmetric matrix of cophenetic-style levels, zero diagonal.

    The strong triangle inequality is a property of how the matrix was
    produced (for example from an inversion-free dendrogram); it is not
    re-verified at construction. Use check_ultrametric for that.
    """

    values: np.ndarray
    labels: list[str] = field(default_factory=list)

    def __post_init__(self) -> None:
        self.values = _as_float_matrix(self.values, "ultrametric matrix")
        self.labels = [str(x) for x in self.labels] or _default_labels(
            self.values.shape[0]
        )
        _check_square_symmetric(self.values, self.labels, "ultrametric matrix")

    @property
    def n(self) -> int:
        return self.values.shape[0]

    def condensed(self) -> np.ndarray:
        iu = np.triu_indices(self.n, k=1)
        return self.values[iu]


@dataclass
class CoordinateMatrix:
    """n points in p-dimensional real space, one row per point."""

    coords: np.ndarray
    point_labels: list[str] = field(default_factory=list)

    def __post_init__(self) -> None:
        self.coords = _as_float_matrix(self.coords, "coordinate matrix")
        self.point_labels = [str(x) for x in self.point_labels] or _default_labels(
            self.coords.shape[0]
        )
        if len(self.point_labels) != self.coords.shape[0]:
            raise ValueError(
                f"coordinate matrix has {self.coords.shape[0]} points "
                f"but {len(self.point_labels)} labels"
            )

    @property
    def n(self) -> int:
        return self.coords.shape[0]

    @property
    def dim(self) -> int:
        return self.coords.shape[1]


@dataclass
class FrequencyMatrix:
    """Nonnegative counts or frequencies cross-tabulating rows by columns."""

    values: np.ndarray
    row_labels: list[str] = field(default_factory=list)
    col_labels: list[str] = field(default_factory=list)

    def __post_init__(self) -> None:
        self.values = _as_float_matrix(self.values, "frequency matrix")
        self.row_labels = [str(x) for x in self.row_labels] or _default_labels(
            self.values.shape[0], "r"
        )
        self.col_labels = [str(x) for x in self.col_labels] or _default_labels(
            self.values.shape[1], "c"
        )
        if len(self.row_labels) != self.values.shape[0]:
            raise ValueError("frequency matrix row label count mismatch")
        if len(self.col_labels) != self.values.shape[1]:
            raise ValueError("frequency matrix column label count mismatch")
        if np.any(self.values < 0.0):
            raise ValueError("frequency matrix must be nonnegative")
        if self.values.sum() <= 0.0:
            raise ValueError("frequency matrix grand total must be positive")


def euclidean_distances(coords: CoordinateMatrix) -> DissimilarityMatrix:
    """Pairwise Euclidean distances between the rows of a coordinate set."""
    if coords.n < 1:
        raise ValueError("need at least one point")
    if coords.n == 1:
        values = np.zeros((1, 1))
    else:
        values = squareform(pdist(coords.coords, metric="euclidean"))
    return DissimilarityMatrix(values, list(coords.point_labels))
