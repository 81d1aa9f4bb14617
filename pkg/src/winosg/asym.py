"""Graph asymmetry scoring via optimal bipartite matching.

The pairwise asymmetry of two triples rewards aligned subject/object
roles and penalizes crossed ones:

    A(t_a, t_b) = alpha * (sim(s_a, s_b) - sim(s_a, o_b))
                + gamma * (sim(o_a, o_b) - sim(o_a, s_b))

Triple pairs across two scene graphs form a cost matrix that is matched
optimally (Hungarian method); the aggregate score is the mean of the
matched entries, or 0 when either graph contributes no usable triple.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .embed import EmbeddingStore, cos_sim
from .sgparse import SceneGraph, Triple


class Objective(Enum):
    MAXIMIZE = "max"
    MINIMIZE = "min"


@dataclass(frozen=True)
class AsymConfig:
    alpha: float = 1.0
    gamma: float = 1.0
    objective: Objective = Objective.MAXIMIZE

    def __post_init__(self):
        if not (math.isfinite(self.alpha) and math.isfinite(self.gamma)):
            raise ValueError("alpha and gamma must be finite")


@dataclass(frozen=True)
class CostMatrix:
    entries: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.entries, dtype=np.float64)
        if arr.ndim != 2:
            raise ValueError(f"cost matrix must be 2-D, got shape {arr.shape}")
        if arr.size and not np.all(np.isfinite(arr)):
            raise ValueError("cost matrix entries must be finite")
        object.__setattr__(self, "entries", arr)

    @property
    def rows(self) -> int:
        return self.entries.shape[0]

    @property
    def cols(self) -> int:
        return self.entries.shape[1]


def usable_triples(graph: SceneGraph) -> list:
    """Triples that can enter the cost matrix (present object)."""
    return [t for t in graph.triples if t.object is not None]


def pairwise_asymmetry(
    cfg: AsymConfig, store: EmbeddingStore, t_a: Triple, t_b: Triple
) -> float:
    """Evaluate A(t_a, t_b); both triples must have a present object."""
    if t_a.object is None or t_b.object is None:
        raise ValueError("pairwise asymmetry is undefined for absent objects")
    s_a, o_a = t_a.subject.phrase, t_a.object.phrase
    s_b, o_b = t_b.subject.phrase, t_b.object.phrase
    return cfg.alpha * (cos_sim(store, s_a, s_b) - cos_sim(store, s_a, o_b)) + cfg.gamma * (
        cos_sim(store, o_a, o_b) - cos_sim(store, o_a, s_b)
    )


def build_cost_matrix(
    cfg: AsymConfig, store: EmbeddingStore, g_a: SceneGraph, g_b: SceneGraph
) -> CostMatrix:
    rows = usable_triples(g_a)
    cols = usable_triples(g_b)
    entries = np.zeros((len(rows), len(cols)), dtype=np.float64)
    for i, t_a in enumerate(rows):
        for j, t_b in enumerate(cols):
            entries[i, j] = pairwise_asymmetry(cfg, store, t_a, t_b)
    return CostMatrix(entries)


def _min_assignment_pairs(cost: list) -> list:
    """Optimal assignment for a rows <= cols cost table (minimization).

    Shortest-augmenting-path formulation with row/column potentials;
    returns (row, col) pairs, one per row.
    """
    r = len(cost)
    c = len(cost[0])
    INF = math.inf
    u = [0.0] * (r + 1)
    v = [0.0] * (c + 1)
    match = [0] * (c + 1)  # match[j] = 1-based row assigned to column j
    way = [0] * (c + 1)
    for i in range(1, r + 1):
        match[0] = i
        j0 = 0
        minv = [INF] * (c + 1)
        used = [False] * (c + 1)
        while True:
            used[j0] = True
            i0 = match[j0]
            row = cost[i0 - 1]
            delta = INF
            j1 = 0
            for j in range(1, c + 1):
                if used[j]:
                    continue
                cur = row[j - 1] - u[i0] - v[j]
                if cur < minv[j]:
                    minv[j] = cur
                    way[j] = j0
                if minv[j] < delta:
                    delta = minv[j]
                    j1 = j
            for j in range(c + 1):
                if used[j]:
                    u[match[j]] += delta
                    v[j] -= delta
                else:
                    minv[j] -= delta
            j0 = j1
            if match[j0] == 0:
                break
        while j0:
            j1 = way[j0]
            match[j0] = match[j1]
            j0 = j1
    return [(match[j] - 1, j - 1) for j in range(1, c + 1) if match[j]]


def _optimal_pairs(d: np.ndarray) -> list:
    """Minimizing assignment of size min(rows, cols) for any shape."""
    r, c = d.shape
    if r == 0 or c == 0:
        return []
    if r <= c:
        pairs = _min_assignment_pairs(d.tolist())
    else:
        pairs = [(i, j) for j, i in _min_assignment_pairs(d.T.tolist())]
    return sorted(pairs)


def matched_total(entries: np.ndarray, pairs: list) -> float:
    """Sum of matched entries, accumulated in row order."""
    return sum(float(entries[i, j]) for i, j in sorted(pairs))


def solve_assignment(matrix: CostMatrix, objective: Objective = Objective.MAXIMIZE) -> list:
    """Optimal matching of size min(rows, cols) as sorted (row, col) pairs.

    Among equal-total optimal matchings the lexicographically smallest
    pair sequence is returned, found by fixing pairs in lexicographic
    order and re-solving the remainder.
    """
    entries = matrix.entries
    r, c = entries.shape
    k = min(r, c)
    if k == 0:
        return []
    d = entries if objective is Objective.MINIMIZE else -entries

    best_total = matched_total(d, _optimal_pairs(d))
    tol = 1e-9 * max(1.0, abs(best_total))

    rows = list(range(r))
    cols = list(range(c))
    chosen: list = []
    fixed = 0.0
    while len(chosen) < k:
        k_left = k - len(chosen)
        placed = False
        fallback = None
        fallback_cost = math.inf
        for ii, ri in enumerate(rows):
            if len(rows) - ii - 1 < k_left - 1:
                break  # skipping this many rows leaves too few to match
            for cj in cols:
                rest_rows = rows[ii + 1 :]
                rest_cols = [x for x in cols if x != cj]
                if k_left > 1:
                    sub = d[np.ix_(rest_rows, rest_cols)]
                    t_rest = matched_total(sub, _optimal_pairs(sub))
                else:
                    t_rest = 0.0
                cand = fixed + float(d[ri, cj]) + t_rest
                if cand <= best_total + tol:
                    chosen.append((ri, cj))
                    fixed += float(d[ri, cj])
                    rows = rest_rows
                    cols = rest_cols
                    placed = True
                    break
                if cand < fallback_cost:
                    fallback_cost = cand
                    fallback = (ii, ri, cj)
            if placed:
                break
        if not placed:
            # Guard against accumulated round-off: take the best seen.
            ii, ri, cj = fallback
            chosen.append((ri, cj))
            fixed += float(d[ri, cj])
            rows = rows[ii + 1 :]
            cols = [x for x in cols if x != cj]
    return chosen


def delta_sg(
    cfg: AsymConfig, store: EmbeddingStore, g_a: SceneGraph, g_b: SceneGraph
) -> float:
    """Mean matched asymmetry between two graphs; 0.0 when either is empty."""
    matrix = build_cost_matrix(cfg, store, g_a, g_b)
    if matrix.rows == 0 or matrix.cols == 0:
        return 0.0
    pairs = solve_assignment(matrix, cfg.objective)
    return matched_total(matrix.entries, pairs) / len(pairs)
