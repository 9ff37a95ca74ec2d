"""0-dimensional persistence of the sub-level-set filtration of a sampled signal.

The domain is the 1-D path graph over sample indices (no periodic wrap).
Each finite pair of the dim-0 diagram is a (local minimum, merging local
maximum) value pair; the component containing the global minimum never dies.
"""

from __future__ import annotations

import math

import numpy as np

from .diagrams import INF, PersistenceDiagram


def sublevel_pd0(samples) -> PersistenceDiagram:
    """Full-resolution dim-0 sub-level persistence of a sampled function.

    Sample indices are processed in ascending value order with a union-find
    over index adjacency.  On a merge the component with the larger birth
    dies (elder rule); ties in value are broken by smaller index = elder.
    Consecutive equal samples form a single component born once.
    """
    x = np.asarray(samples, dtype=np.float64)
    if x.ndim != 1 or x.size == 0:
        raise ValueError("series must be a nonempty 1-D sequence")
    if not np.all(np.isfinite(x)):
        raise ValueError("series samples must be finite")
    n = x.size
    order = np.argsort(x, kind="stable")  # ties: smaller index first

    parent = np.full(n, -1, dtype=np.int64)  # -1 = not yet in any component
    # per root: birth value and index of the component's oldest minimum
    birth_val = np.empty(n, dtype=np.float64)
    birth_idx = np.empty(n, dtype=np.int64)
    pairs: list[tuple[float, float]] = []

    def find(i: int) -> int:
        root = i
        while parent[root] != root:
            root = parent[root]
        while parent[i] != root:
            parent[i], i = root, parent[i]
        return root

    for idx in order:
        v = x[idx]
        left = find(idx - 1) if idx > 0 and parent[idx - 1] != -1 else -1
        right = find(idx + 1) if idx < n - 1 and parent[idx + 1] != -1 else -1
        if left == -1 and right == -1:
            parent[idx] = idx
            birth_val[idx] = v
            birth_idx[idx] = idx
        elif left == -1 or right == -1:
            root = left if right == -1 else right
            parent[idx] = root
        else:
            # merge: elder has smaller (birth value, birth index)
            ka = (birth_val[left], birth_idx[left])
            kb = (birth_val[right], birth_idx[right])
            elder, younger = (left, right) if ka <= kb else (right, left)
            pairs.append((birth_val[younger], v))
            parent[younger] = elder
            parent[idx] = elder

    pairs.append((float(x.min()), INF))
    return PersistenceDiagram(0, pairs)


def _runs(mask: np.ndarray) -> list[tuple[int, int]]:
    """Maximal runs of True as half-open (start, stop) index pairs."""
    padded = np.concatenate(([False], mask, [False]))
    edges = np.flatnonzero(np.diff(padded.astype(np.int8)))
    return list(zip(edges[::2], edges[1::2]))


def sublevel_pd0_at(samples, thresholds) -> PersistenceDiagram:
    """Dim-0 persistence of the coarse sub-level filtration at given thresholds.

    Components are tracked across the threshold list only: birth = first
    threshold at which a component exists, death = threshold at which it
    merges into an elder one.  Components alive after the last threshold
    are essential.  With thresholds = sorted unique sample values this
    coincides with :func:`sublevel_pd0`.
    """
    x = np.asarray(samples, dtype=np.float64)
    if x.ndim != 1 or x.size == 0:
        raise ValueError("series must be a nonempty 1-D sequence")
    th = [float(t) for t in thresholds]
    if not th:
        raise ValueError("threshold list must be nonempty")
    if any(b <= a for a, b in zip(th, th[1:])):
        raise ValueError("thresholds must be strictly ascending")

    pairs: list[tuple[float, float]] = []
    # alive components: id -> (birth, tie-break index); prev run -> comp id
    comp_birth: dict[int, tuple[float, int]] = {}
    prev: list[tuple[int, int, int]] = []  # (start, stop, comp_id)
    next_id = 0

    for h in th:
        runs = _runs(x <= h)
        cur: list[tuple[int, int, int]] = []
        for start, stop in runs:
            inside = [cid for (s, e, cid) in prev if s >= start and e <= stop]
            if not inside:
                cid = next_id
                next_id += 1
                comp_birth[cid] = (h, int(start))
            else:
                inside.sort(key=lambda c: comp_birth[c])
                cid = inside[0]
                for young in inside[1:]:
                    pairs.append((comp_birth[young][0], h))
                    del comp_birth[young]
            cur.append((int(start), int(stop), cid))
        prev = cur

    for birth, _ in comp_birth.values():
        pairs.append((birth, INF))
    return PersistenceDiagram(0, pairs)
