"""CSV readers and writers for labeled matrices.

Layout: an optional block of '#'-prefixed comment lines, then a header
row (empty leading cell followed by column labels), then one row per
item (label first, values after). UTF-8 throughout, LF line endings,
floats printed with 17 significant digits so they round-trip exactly.
"""

from __future__ import annotations

import csv
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .matrices import (
    CoordinateMatrix,
    DissimilarityMatrix,
    FrequencyMatrix,
    UltrametricMatrix,
)


def format_float(x: float) -> str:
    return format(float(x), ".17g")


def format_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if v is None:
        return ""
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format_float(v)
    return str(v)


def write_rows(
    path: str | Path,
    rows: Iterable[Sequence],
    header_lines: Sequence[str] = (),
) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        for line in header_lines:
            fh.write(f"# {line}\n")
        writer = csv.writer(fh, lineterminator="\n")
        for row in rows:
            writer.writerow([format_value(v) for v in row])


def read_rows(path: str | Path) -> list[list[str]]:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    return [row for row in csv.reader(lines) if row]


def write_labeled_matrix(
    path: str | Path,
    values: np.ndarray,
    row_labels: Sequence[str],
    col_labels: Sequence[str],
    header_lines: Sequence[str] = (),
) -> None:
    values = np.asarray(values)
    rows: list[list] = [[""] + list(col_labels)]
    for label, row in zip(row_labels, values):
        rows.append([label] + [float(v) for v in row])
    write_rows(path, rows, header_lines)


def read_labeled_matrix(path: str | Path) -> tuple[np.ndarray, list[str], list[str]]:
    rows = read_rows(path)
    if not rows:
        raise ValueError(f"{path}: empty matrix file")
    col_labels = rows[0][1:]
    row_labels = [r[0] for r in rows[1:]]
    try:
        values = np.array(
            [[float(v) for v in r[1:]] for r in rows[1:]], dtype=np.float64
        )
    except ValueError as exc:
        raise ValueError(f"{path}: non-numeric matrix entry ({exc})") from None
    if values.size and values.shape[1] != len(col_labels):
        raise ValueError(f"{path}: ragged matrix rows")
    return values, row_labels, col_labels


def read_dissimilarity(path: str | Path) -> DissimilarityMatrix:
    values, row_labels, col_labels = read_labeled_matrix(path)
    if row_labels != col_labels:
        raise ValueError(f"{path}: row and column labels must match")
    return DissimilarityMatrix(values, row_labels)


def read_coordinates(path: str | Path) -> CoordinateMatrix:
    values, row_labels, _ = read_labeled_matrix(path)
    return CoordinateMatrix(values, row_labels)


def read_frequency(path: str | Path) -> FrequencyMatrix:
    values, row_labels, col_labels = read_labeled_matrix(path)
    return FrequencyMatrix(values, row_labels, col_labels)


def write_dissimilarity(
    path: str | Path,
    d: DissimilarityMatrix | UltrametricMatrix,
    header_lines: Sequence[str] = (),
) -> None:
    write_labeled_matrix(path, d.values, d.labels, d.labels, header_lines)


def write_coordinates(
    path: str | Path,
    coords: CoordinateMatrix,
    header_lines: Sequence[str] = (),
) -> None:
    axis_labels = [f"f{i + 1}" for i in range(coords.dim)]
    write_labeled_matrix(
        path, coords.coords, coords.point_labels, axis_labels, header_lines
    )


def write_frequency(
    path: str | Path,
    f: FrequencyMatrix,
    header_lines: Sequence[str] = (),
) -> None:
    write_labeled_matrix(path, f.values, f.row_labels, f.col_labels, header_lines)


def write_key_values(
    path: str | Path,
    items: Mapping[str, object],
    header_lines: Sequence[str] = (),
) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        for line in header_lines:
            fh.write(f"# {line}\n")
        for key, value in items.items():
            fh.write(f"{key}: {format_value(value)}\n")
