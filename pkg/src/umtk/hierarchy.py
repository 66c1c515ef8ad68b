"""Agglomerative hierarchies and the subdominant ultrametric.

The linkage builder runs the classic stored-matrix agglomeration with
recurrence-based updates. Node ids are fixed: leaves are 0..n-1, each
internal node takes the next id n, n+1, ... in merge order. When several
pairs tie at the minimal dissimilarity the pair whose (smaller node id,
larger node id) tuple is lexicographically least is merged, which makes
the whole construction deterministic.

Three routes to the subdominant (maximal lower) ultrametric are exposed
so they can be cross-checked: single linkage cophenetic levels, the
min-max path closure, and maximal edge weights along minimum spanning
tree paths. They agree exactly because none of them performs arithmetic
on the input values.

Criteria
--------
single, complete, average, mcquitty update plain dissimilarities; ward,
centroid, median update squared dissimilarities and their merge heights
are reported as the square root of the squared-space level so all
criteria share the input's units. single, complete, average, mcquitty
and ward are reducible and can never produce inversions; centroid and
median can.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .matrices import DissimilarityMatrix, UltrametricMatrix

LINKAGE_CRITERIA = ("single", "complete", "average", "mcquitty", "ward",
                    "centroid", "median")

#: Criteria whose merge heights are guaranteed monotone (no inversions).
INVERSION_FREE_CRITERIA = ("single", "complete", "average", "mcquitty", "ward")

_SQUARED_CRITERIA = frozenset({"ward", "centroid", "median"})


class Merge(NamedTuple):
    left: int
    right: int
    height: float
    size: int


@dataclass
class Dendrogram:
    """Binary merge tree over n labeled leaves.

    merges[m] created node id n_leaves + m by joining node ids left and
    right (left < right); height is the merge level and size the number
    of leaves under the new node.
    """

    n_leaves: int
    merges: list[Merge]
    labels: list[str] = field(default_factory=list)

    def __post_init__(self) -> None:
        n = self.n_leaves
        if n < 1:
            raise ValueError("dendrogram needs at least one leaf")
        if len(self.labels) != n:
            raise ValueError("label count must equal n_leaves")
        if len(self.merges) != n - 1:
            raise ValueError("a binary dendrogram over n leaves has n-1 merges")
        self.merges = [Merge(int(m[0]), int(m[1]), float(m[2]), int(m[3]))
                       for m in self.merges]
        used = set()
        sizes = {i: 1 for i in range(n)}
        for step, m in enumerate(self.merges):
            new_id = n + step
            for child in (m.left, m.right):
                if not (0 <= child < new_id):
                    raise ValueError(f"merge {step} references invalid node {child}")
                if child in used:
                    raise ValueError(f"node {child} merged twice")
                used.add(child)
            if m.left >= m.right:
                raise ValueError(f"merge {step} children must satisfy left < right")
            if m.height < 0:
                raise ValueError(f"merge {step} has negative height")
            sizes[new_id] = sizes[m.left] + sizes[m.right]
            if m.size != sizes[new_id]:
                raise ValueError(f"merge {step} size field inconsistent")

    @property
    def n_nodes(self) -> int:
        return 2 * self.n_leaves - 1


def linkage(d: DissimilarityMatrix, criterion: str) -> Dendrogram:
    """Agglomerate a dissimilarity matrix under the given criterion.

    At every step the pair of clusters at minimal current dissimilarity
    is merged (ties broken by lexicographically smallest node id pair)
    and distances to the remaining clusters are updated by the
    criterion's recurrence:

    - single:    min(d_ac, d_bc)
    - complete:  max(d_ac, d_bc)
    - average:   (n_a d_ac + n_b d_bc) / (n_a + n_b)
    - mcquitty:  (d_ac + d_bc) / 2
    - ward:      ((n_a+n_c) d_ac + (n_b+n_c) d_bc - n_c d_ab) / (n_a+n_b+n_c)
    - centroid:  (n_a d_ac + n_b d_bc)/(n_a+n_b) - n_a n_b d_ab/(n_a+n_b)^2
    - median:    d_ac/2 + d_bc/2 - d_ab/4

    where ward, centroid and median operate on squared values.
    """
    if criterion not in LINKAGE_CRITERIA:
        raise ValueError(
            f"unknown linkage criterion {criterion!r}; "
            f"expected one of {', '.join(LINKAGE_CRITERIA)}"
        )
    n = d.n
    if n < 2:
        raise ValueError("need at least two items to cluster")
    squared = criterion in _SQUARED_CRITERIA
    work = d.values ** 2 if squared else d.values.copy()
    np.fill_diagonal(work, np.inf)
    active = np.ones(n, dtype=bool)
    node_id = np.arange(n, dtype=np.int64)
    size = np.ones(n, dtype=np.int64)
    merges: list[Merge] = []
    for step in range(n - 1):
        level = float(work.min())
        ta, tb = np.nonzero(work == level)
        upper = ta < tb
        ta, tb = ta[upper], tb[upper]
        lo_ids = np.minimum(node_id[ta], node_id[tb])
        hi_ids = np.maximum(node_id[ta], node_id[tb])
        pick = np.lexsort((hi_ids, lo_ids))[0]
        a, b = int(ta[pick]), int(tb[pick])
        best_key = (int(lo_ids[pick]), int(hi_ids[pick]))
        na, nb = int(size[a]), int(size[b])
        d_ab = work[a, b]
        row_a = work[a, :]
        row_b = work[b, :]
        if criterion == "single":
            new_row = np.minimum(row_a, row_b)
        elif criterion == "complete":
            new_row = np.maximum(row_a, row_b)
        elif criterion == "average":
            new_row = (na * row_a + nb * row_b) / (na + nb)
        elif criterion == "mcquitty":
            new_row = 0.5 * (row_a + row_b)
        elif criterion == "ward":
            nc = size
            tot = na + nb + nc
            new_row = ((na + nc) * row_a + (nb + nc) * row_b - nc * d_ab) / tot
        elif criterion == "centroid":
            nab = na + nb
            new_row = (na * row_a + nb * row_b) / nab - (na * nb * d_ab) / nab ** 2
        else:  # median
            new_row = 0.5 * row_a + 0.5 * row_b - 0.25 * d_ab
        height = float(np.sqrt(max(level, 0.0))) if squared else level
        merges.append(Merge(best_key[0], best_key[1], height, na + nb))
        new_row = np.where(active, new_row, np.inf)
        new_row[a] = np.inf
        work[a, :] = new_row
        work[:, a] = new_row
        work[b, :] = np.inf
        work[:, b] = np.inf
        active[b] = False
        node_id[a] = n + step
        size[a] = na + nb
    return Dendrogram(n, merges, list(d.labels))


def cophenetic(h: Dendrogram) -> UltrametricMatrix:
    """Matrix of merge heights at which each leaf pair first joins."""
    n = h.n_leaves
    out = np.zeros((n, n))
    members: dict[int, list[int]] = {i: [i] for i in range(n)}
    for step, m in enumerate(h.merges):
        left = members.pop(m.left)
        right = members.pop(m.right)
        out[np.ix_(left, right)] = m.height
        out[np.ix_(right, left)] = m.height
        members[n + step] = left + right
    return UltrametricMatrix(out, list(h.labels))


def detect_inversions(h: Dendrogram) -> list[tuple[int, float]]:
    """Merges sitting strictly below a merge they directly contain.

    Returns (merge index, height drop) pairs, where the drop is the
    largest excess of a child merge's height over this merge's height.
    Empty for any monotone dendrogram.
    """
    n = h.n_leaves
    heights = [m.height for m in h.merges]
    out: list[tuple[int, float]] = []
    for idx, m in enumerate(h.merges):
        drop = 0.0
        for child in (m.left, m.right):
            if child >= n:
                child_h = heights[child - n]
                if child_h > m.height:
                    drop = max(drop, child_h - m.height)
        if drop > 0.0:
            out.append((idx, drop))
    return out


class EdgeList(NamedTuple):
    """Tree edges (i, j, weight) with i < j, plus their total weight."""

    edges: list[tuple[int, int, float]]
    total_weight: float


def mst_kruskal(d: DissimilarityMatrix) -> EdgeList:
    """Minimum spanning tree over the complete weighted graph of d.

    Edges are examined in increasing (weight, i, j) order, which fixes
    the tree deterministically even when weights tie.
    """
    n = d.n
    if n < 2:
        raise ValueError("need at least two items")
    iu, ju = np.triu_indices(n, k=1)
    weights = d.values[iu, ju]
    order = np.lexsort((ju, iu, weights))
    parent = list(range(n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    edges: list[tuple[int, int, float]] = []
    for idx in order:
        i, j, w = int(iu[idx]), int(ju[idx]), float(weights[idx])
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[ri] = rj
            edges.append((i, j, w))
            if len(edges) == n - 1:
                break
    return EdgeList(edges, float(sum(w for _, _, w in edges)))


def minmax_path_closure(d: DissimilarityMatrix) -> UltrametricMatrix:
    """Subdominant ultrametric: minimize over paths the maximal step.

    Floyd-Warshall in the (min, max) semiring. The result is the largest
    ultrametric lying at or below d entrywise; d is unchanged exactly
    when it already is an ultrametric.
    """
    u = d.values.copy()
    n = d.n
    for k in range(n):
        col = u[:, k]
        np.minimum(u, np.maximum(col[:, None], col[None, :]), out=u)
    return UltrametricMatrix(u, list(d.labels))


def cophenetic_correlation(
    d: DissimilarityMatrix, u: UltrametricMatrix | DissimilarityMatrix
) -> float:
    """Pearson correlation between two matrices' upper-triangle values."""
    if d.values.shape != u.values.shape:
        raise ValueError("matrices must have matching dimensions")
    x = d.condensed()
    y = u.condensed()
    xc = x - x.mean()
    yc = y - y.mean()
    sx = float(np.sqrt((xc ** 2).sum()))
    sy = float(np.sqrt((yc ** 2).sum()))
    if sx == 0.0 or sy == 0.0:
        raise ValueError("constant values: correlation undefined")
    return float((xc * yc).sum() / (sx * sy))


def _quote_label(label: str) -> str:
    if any(ch in label for ch in "(),:;'\" \t\n[]"):
        return "'" + label.replace("'", "''") + "'"
    return label


def export_newick(h: Dendrogram) -> str:
    """Serialize a dendrogram as a rooted binary Newick string.

    Branch lengths are parent height minus child height (leaves sit at
    height zero); children are ordered by their smallest contained leaf
    id. If the dendrogram contains inversions, branch lengths would be
    negative, so a topology-only string is emitted and a warning raised.
    """
    n = h.n_leaves
    with_lengths = True
    if detect_inversions(h):
        warnings.warn(
            "dendrogram has inversions; emitting topology-only newick",
            stacklevel=2,
        )
        with_lengths = False
    if n == 1:
        return _quote_label(h.labels[0]) + ";"
    text: dict[int, str] = {}
    height: dict[int, float] = {}
    min_leaf: dict[int, int] = {}
    for i in range(n):
        text[i] = _quote_label(h.labels[i])
        height[i] = 0.0
        min_leaf[i] = i
    for step, m in enumerate(h.merges):
        node = n + step
        children = sorted((m.left, m.right), key=lambda c: min_leaf[c])
        parts = []
        for child in children:
            if with_lengths:
                length = m.height - height[child]
                parts.append(f"{text[child]}:{format(length, '.17g')}")
            else:
                parts.append(text[child])
            text.pop(child)
        text[node] = "(" + ",".join(parts) + ")"
        height[node] = m.height
        min_leaf[node] = min(min_leaf[m.left], min_leaf[m.right])
    return text[2 * n - 2] + ";"
