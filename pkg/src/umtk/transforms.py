"""Triangle-inequality diagnostics and metric repairs.

check_metric and check_ultrametric scan every unordered triple of items
and report the ones whose worst orientation violates the (strong)
triangle inequality by more than a tolerance. cailliez_additive and
power_shrink turn a non-metric dissimilarity into a metric one, either
by adding the smallest constant that works or by raising the values to
the largest power in (0, 1] that works.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .matrices import DissimilarityMatrix
from .triplets import iter_triplet_chunks

#: Relative factor used to derive the default check tolerance for repairs.
REPAIR_TOLERANCE_FACTOR = 1e-12


@dataclass
class ViolationReport:
    """Triples violating a triangle-type inequality, worst slack each.

    kind is "triangle" or "strong-triangle". Each violation is
    (i, j, k, slack) with i < j < k; the slack is the excess of the worst
    of the three orientations. Triples are listed once, in ascending
    (i, j, k) order.
    """

    kind: str
    violations: list[tuple[int, int, int, float]] = field(default_factory=list)

    def __bool__(self) -> bool:
        return bool(self.violations)


def _sorted_triple_values(
    values: np.ndarray, ii: np.ndarray, jj: np.ndarray, kk: np.ndarray
) -> np.ndarray:
    """(3, m) array of each triple's pair values sorted ascending."""
    stacked = np.stack([values[ii, jj], values[ii, kk], values[jj, kk]])
    stacked.sort(axis=0)
    return stacked


def _scan_violations(
    d: DissimilarityMatrix, tolerance: float, strong: bool
) -> list[tuple[int, int, int, float]]:
    out: list[tuple[int, int, int, float]] = []
    for ii, jj, kk in iter_triplet_chunks(d.n):
        s = _sorted_triple_values(d.values, ii, jj, kk)
        if strong:
            slack = s[2] - s[1]
        else:
            slack = s[2] - s[1] - s[0]
        bad = slack > tolerance
        if np.any(bad):
            out.extend(
                (int(a), int(b), int(c), float(x))
                for a, b, c, x in zip(ii[bad], jj[bad], kk[bad], slack[bad])
            )
    return out


def check_metric(d: DissimilarityMatrix, tolerance: float = 0.0) -> ViolationReport:
    """Report triples where the largest side exceeds the sum of the others.

    A triple (i, j, k) is reported when max - (mid + min) of its three
    pair values exceeds `tolerance`; the slack recorded is that excess,
    which is the worst of the three orientations of the triangle
    inequality.
    """
    if tolerance < 0:
        raise ValueError("tolerance must be nonnegative")
    return ViolationReport("triangle", _scan_violations(d, tolerance, strong=False))


def check_ultrametric(
    d: DissimilarityMatrix, tolerance: float = 0.0
) -> ViolationReport:
    """Report triples where the two largest pair values differ.

    The strong triangle inequality holds on a triple exactly when its two
    largest values are equal, so the recorded slack is max - mid.
    """
    if tolerance < 0:
        raise ValueError("tolerance must be nonnegative")
    return ViolationReport(
        "strong-triangle", _scan_violations(d, tolerance, strong=True)
    )


def _worst_metric_slack(values: np.ndarray, n: int) -> float:
    worst = -np.inf
    for ii, jj, kk in iter_triplet_chunks(n):
        s = _sorted_triple_values(values, ii, jj, kk)
        slack = s[2] - s[1] - s[0]
        m = float(slack.max())
        if m > worst:
            worst = m
    return worst


def cailliez_additive(d: DissimilarityMatrix) -> tuple[DissimilarityMatrix, float]:
    """Add the smallest constant to all off-diagonal entries to get a metric.

    Returns (repaired matrix, constant). The constant is the largest
    triangle-inequality excess over all triples, clamped below at zero,
    nudged upward by at most a few ulp if rounding in the shifted matrix
    would otherwise leave a residual violation. With fewer than three
    items the input is already metric and the constant is zero.
    """
    if d.n < 3:
        return DissimilarityMatrix(d.values.copy(), list(d.labels)), 0.0
    c = max(0.0, _worst_metric_slack(d.values, d.n))
    if c == 0.0:
        return DissimilarityMatrix(d.values.copy(), list(d.labels)), 0.0
    for _ in range(100):
        shifted = d.values + c
        np.fill_diagonal(shifted, 0.0)
        residual = _worst_metric_slack(shifted, d.n)
        if residual <= 0.0:
            break
        c += residual
    else:
        raise RuntimeError("additive repair failed to converge")
    return DissimilarityMatrix(shifted, list(d.labels)), c


def _is_metric(values: np.ndarray, n: int) -> bool:
    worst = _worst_metric_slack(values, n)
    scale = float(values.max())
    return worst <= REPAIR_TOLERANCE_FACTOR * scale


def power_shrink(
    d: DissimilarityMatrix, r_tolerance: float = 1e-6
) -> tuple[DissimilarityMatrix, float]:
    """Raise dissimilarities to the largest power in (0, 1] giving a metric.

    Returns (matrix of d**r, r) where r is located by bisection to within
    r_tolerance and the returned matrix is certified metric. Zero
    off-diagonal entries are rejected since no power separates them.
    """
    if r_tolerance <= 0:
        raise ValueError("r_tolerance must be positive")
    off_diag = ~np.eye(d.n, dtype=bool)
    if np.any(d.values[off_diag] == 0.0):
        raise ValueError(
            "power repair requires positive off-diagonal dissimilarities"
        )
    if d.n < 3 or _is_metric(d.values, d.n):
        return DissimilarityMatrix(d.values.copy(), list(d.labels)), 1.0

    def candidate(r: float) -> np.ndarray:
        out = d.values ** r
        np.fill_diagonal(out, 0.0)
        return out

    lo = 0.5
    while not _is_metric(candidate(lo), d.n):
        lo *= 0.5
        if lo < 1e-18:
            raise RuntimeError("no metric power found")
    hi = 1.0
    while hi - lo > r_tolerance:
        mid = 0.5 * (lo + hi)
        if _is_metric(candidate(mid), d.n):
            lo = mid
        else:
            hi = mid
    return DissimilarityMatrix(candidate(lo), list(d.labels)), lo
