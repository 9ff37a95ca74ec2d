"""Bottleneck distance between persistence diagrams.

Exact combinatorial computation: binary search over the candidate cost values
(pairwise infinity-norm distances and half-lifespans) with a bipartite
perfect-matching feasibility check at each candidate.  Points may match the
diagonal at cost (death - birth) / 2.  Essential (infinite-death) pairs are
matched to each other in sorted birth order; diagrams with different numbers
of essential pairs are infinitely far apart.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_bipartite_matching

from .diagrams import INF, PersistenceDiagram


def _split(pd: PersistenceDiagram):
    finite = [(b, d) for b, d in pd if math.isfinite(d)]
    essential = sorted(b for b, d in pd if not math.isfinite(d))
    return np.asarray(finite, dtype=np.float64).reshape(-1, 2), essential


def _feasible(dist_inf: np.ndarray, half_a: np.ndarray, half_b: np.ndarray, t: float) -> bool:
    """Perfect matching of size na+nb in the diagonal-augmented graph at cost t."""
    na, nb = dist_inf.shape
    total = na + nb
    rows: list[int] = []
    cols: list[int] = []
    # A_i -- B_j when within t
    ai, bj = np.nonzero(dist_inf <= t)
    rows.extend(ai.tolist())
    cols.extend(bj.tolist())
    # A_i -- its own diagonal projection (right node nb+i)
    for i in np.flatnonzero(half_a <= t):
        rows.append(int(i))
        cols.append(nb + int(i))
    # diagonal copy of B_j (left node na+j) -- B_j
    for j in np.flatnonzero(half_b <= t):
        rows.append(na + int(j))
        cols.append(int(j))
    # diagonal copies match each other freely
    for j in range(nb):
        for i in range(na):
            rows.append(na + j)
            cols.append(nb + i)
    graph = csr_matrix(
        (np.ones(len(rows), dtype=np.int8), (rows, cols)), shape=(total, total)
    )
    match = maximum_bipartite_matching(graph, perm_type="column")
    return int(np.count_nonzero(match >= 0)) == total


def bottleneck(a: PersistenceDiagram, b: PersistenceDiagram) -> float:
    """Bottleneck distance; inf when essential-pair counts differ."""
    fa, ess_a = _split(a)
    fb, ess_b = _split(b)
    if len(ess_a) != len(ess_b):
        return INF
    ess_cost = 0.0
    for ba, bb in zip(ess_a, ess_b):
        ess_cost = max(ess_cost, abs(ba - bb))

    na, nb = fa.shape[0], fb.shape[0]
    if na == 0 and nb == 0:
        return ess_cost
    half_a = (fa[:, 1] - fa[:, 0]) / 2.0 if na else np.empty(0)
    half_b = (fb[:, 1] - fb[:, 0]) / 2.0 if nb else np.empty(0)
    if na == 0:
        return max(ess_cost, float(half_b.max()))
    if nb == 0:
        return max(ess_cost, float(half_a.max()))

    dist_inf = np.maximum(
        np.abs(fa[:, 0, None] - fb[None, :, 0]),
        np.abs(fa[:, 1, None] - fb[None, :, 1]),
    )
    candidates = np.unique(
        np.concatenate([dist_inf.ravel(), half_a, half_b, [0.0]])
    )
    lo, hi = 0, candidates.size - 1
    # the largest candidate is always feasible (everything to the diagonal
    # or any matching within max cost)
    while lo < hi:
        mid = (lo + hi) // 2
        if _feasible(dist_inf, half_a, half_b, float(candidates[mid])):
            hi = mid
        else:
            lo = mid + 1
    return max(ess_cost, float(candidates[lo]))
