"""Vietoris-Rips persistence in dimensions 0 and 1 over Euclidean point clouds.

The filtration parameter is the simplex *diameter* (t = 2 * epsilon), so
births and deaths are in the data's native distance units.  Dim 0 is computed
by union-find over length-sorted edges (elder rule: smaller vertex index is
elder), dim 1 by column reduction of the Z2 triangle boundary matrix over
edges; edges paired in the dim-0 pass can never be reduction pivots, so only
the remaining (cycle-creating) edges are eligible targets and the reduction
stops as soon as all of them are paired.

``explicit_filtration_ph`` is a deliberately unoptimized full boundary-matrix
reduction over an explicit filtration.  It shares no code path with ``vr_pd``
and serves as its verification oracle.
"""

from __future__ import annotations

import math
from itertools import combinations

import numpy as np
from numba import njit
from numba.core import types
from numba.typed import Dict as NumbaDict

from .diagrams import INF, PersistenceDiagram


def pairwise_distances(points: np.ndarray) -> np.ndarray:
    """Dense symmetric Euclidean distance matrix."""
    x = np.asarray(points, dtype=np.float64)
    sq = np.sum(x * x, axis=1)
    d2 = sq[:, None] + sq[None, :] - 2.0 * (x @ x.T)
    np.maximum(d2, 0.0, out=d2)
    d = np.sqrt(d2)
    np.fill_diagonal(d, 0.0)
    return d


@njit(cache=True, nogil=True)
def _heap_push(heap_d, heap_c, size, d, c):  # pragma: no cover - jitted
    """Min-heap push, keyed by (diameter, code); grows storage on demand."""
    if size == heap_d.size:
        new_d = np.empty(2 * size, dtype=np.float64)
        new_c = np.empty(2 * size, dtype=np.int64)
        new_d[:size] = heap_d
        new_c[:size] = heap_c
        heap_d = new_d
        heap_c = new_c
    i = size
    heap_d[i] = d
    heap_c[i] = c
    while i > 0:
        p = (i - 1) >> 1
        if heap_d[p] > heap_d[i] or (heap_d[p] == heap_d[i] and heap_c[p] > heap_c[i]):
            heap_d[p], heap_d[i] = heap_d[i], heap_d[p]
            heap_c[p], heap_c[i] = heap_c[i], heap_c[p]
            i = p
        else:
            break
    return heap_d, heap_c, size + 1


@njit(cache=True, nogil=True)
def _heap_pop(heap_d, heap_c, size):  # pragma: no cover - jitted
    size -= 1
    heap_d[0] = heap_d[size]
    heap_c[0] = heap_c[size]
    i = 0
    while True:
        l = 2 * i + 1
        if l >= size:
            break
        r = l + 1
        s = l
        if r < size and (
            heap_d[r] < heap_d[l] or (heap_d[r] == heap_d[l] and heap_c[r] < heap_c[l])
        ):
            s = r
        if heap_d[s] < heap_d[i] or (heap_d[s] == heap_d[i] and heap_c[s] < heap_c[i]):
            heap_d[s], heap_d[i] = heap_d[i], heap_d[s]
            heap_c[s], heap_c[i] = heap_c[i], heap_c[s]
            i = s
        else:
            break
    return size


@njit(cache=True, nogil=True)
def _push_coboundary(heap_d, heap_c, size, dist, a, b, t_e, n, teff):
    # pragma: no cover - jitted
    """Push all cofacet triangles of edge (a, b) onto the working heap."""
    for c in range(n):
        if c == a or c == b:
            continue
        dac = dist[a, c]
        dbc = dist[b, c]
        if dac <= teff and dbc <= teff:
            dm = t_e
            if dac > dm:
                dm = dac
            if dbc > dm:
                dm = dbc
            i0 = a if a < c else c
            k0 = b if b > c else c
            j0 = a + b + c - i0 - k0
            heap_d, heap_c, size = _heap_push(
                heap_d, heap_c, size, dm, (i0 * n + j0) * n + k0
            )
    return heap_d, heap_c, size


@njit(cache=True, nogil=True)
def _dim1_pairs_cohomology(dist, edges_i, edges_j, edge_len, positive, teff):
    # pragma: no cover - jitted
    """Dim-1 persistence pairs by lazy coboundary reduction.

    Columns are the cycle-creating (non-MST) edges, processed in decreasing
    filtration order.  The working column lives in a min-heap keyed by
    (triangle diameter, lexicographic vertex code) with Z2 cancellation of
    duplicate entries; the pivot is the surviving triangle entering the
    filtration first.  For each claimed pivot only the list of edges whose
    coboundaries sum to the reduced column is stored, so column additions
    replay coboundaries instead of materializing them.
    Returns (births, deaths, essential edge ranks); an edge whose column
    cancels to zero creates a cycle never filled below teff.
    """
    n = dist.shape[0]
    m = edges_i.size
    owner_v = NumbaDict.empty(key_type=types.int64, value_type=types.int64[:])
    births = np.empty(m, dtype=np.float64)
    deaths = np.empty(m, dtype=np.float64)
    n_pairs = 0
    essential = np.empty(m, dtype=np.int64)
    n_ess = 0
    heap_d = np.empty(1024, dtype=np.float64)
    heap_c = np.empty(1024, dtype=np.int64)
    v_buf = np.empty(64, dtype=np.int64)
    for r in range(m - 1, -1, -1):
        if not positive[r]:
            continue
        a = edges_i[r]
        b = edges_j[r]
        t_e = edge_len[r]
        # fast path: the fresh coboundary column has distinct entries, so its
        # pivot is simply the minimal cofacet; claim it without heap work
        min_d = INF
        min_c = np.int64(-1)
        cnt = 0
        for c in range(n):
            if c == a or c == b:
                continue
            dac = dist[a, c]
            dbc = dist[b, c]
            if dac <= teff and dbc <= teff:
                dm = t_e
                if dac > dm:
                    dm = dac
                if dbc > dm:
                    dm = dbc
                i0 = a if a < c else c
                k0 = b if b > c else c
                j0 = a + b + c - i0 - k0
                code = (i0 * n + j0) * n + k0
                if dm < min_d or (dm == min_d and code < min_c):
                    min_d = dm
                    min_c = code
                cnt += 1
        if cnt == 0:
            essential[n_ess] = r
            n_ess += 1
            continue
        if min_c not in owner_v:
            v_new = np.empty(1, dtype=np.int64)
            v_new[0] = r
            owner_v[min_c] = v_new
            births[n_pairs] = t_e
            deaths[n_pairs] = min_d
            n_pairs += 1
            continue
        size = 0
        heap_d, heap_c, size = _push_coboundary(
            heap_d, heap_c, size, dist, a, b, t_e, n, teff
        )
        v_buf[0] = r
        v_len = 1
        while True:
            # pop the minimal surviving entry (Z2: drop duplicate pairs)
            piv_c = np.int64(-1)
            piv_d = 0.0
            while size > 0:
                d0 = heap_d[0]
                c0 = heap_c[0]
                size = _heap_pop(heap_d, heap_c, size)
                count = 1
                while size > 0 and heap_c[0] == c0:
                    size = _heap_pop(heap_d, heap_c, size)
                    count += 1
                if count & 1:
                    piv_c = c0
                    piv_d = d0
                    break
            if piv_c == -1:
                essential[n_ess] = r
                n_ess += 1
                break
            if piv_c in owner_v:
                # add the owner's reduced column: put the pivot back and
                # replay the coboundaries of every edge in its V-column
                heap_d, heap_c, size = _heap_push(heap_d, heap_c, size, piv_d, piv_c)
                vj = owner_v[piv_c]
                for q in range(vj.size):
                    f = vj[q]
                    heap_d, heap_c, size = _push_coboundary(
                        heap_d,
                        heap_c,
                        size,
                        dist,
                        edges_i[f],
                        edges_j[f],
                        edge_len[f],
                        n,
                        teff,
                    )
                    if v_len == v_buf.size:
                        new_v = np.empty(2 * v_len, dtype=np.int64)
                        new_v[:v_len] = v_buf
                        v_buf = new_v
                    v_buf[v_len] = f
                    v_len += 1
            else:
                owner_v[piv_c] = v_buf[:v_len].copy()
                births[n_pairs] = edge_len[r]
                deaths[n_pairs] = piv_d
                n_pairs += 1
                break
    return births[:n_pairs], deaths[:n_pairs], essential[:n_ess]


def _sorted_edges(dist: np.ndarray):
    n = dist.shape[0]
    ii, jj = np.triu_indices(n, 1)
    lengths = dist[ii, jj]
    order = np.lexsort((jj, ii, lengths))  # ties by (min vertex, max vertex)
    return ii[order], jj[order], lengths[order]


def _dim0_pairs(ii, jj, lengths, n, threshold):
    """Union-find over sorted edges; returns (diagram pairs, MST edge flags)."""
    parent = np.arange(n, dtype=np.int64)
    eldest = np.arange(n, dtype=np.int64)  # min vertex index in component

    def find(i):
        root = i
        while parent[root] != root:
            root = parent[root]
        while parent[i] != root:
            parent[i], i = root, parent[i]
        return root

    pairs = []
    is_mst = np.zeros(lengths.size, dtype=bool)
    merges = 0
    for e in range(lengths.size):
        if lengths[e] > threshold:
            break
        ra, rb = find(ii[e]), find(jj[e])
        if ra == rb:
            continue
        if eldest[ra] > eldest[rb]:
            ra, rb = rb, ra
        parent[rb] = ra  # younger component rb dies
        pairs.append((0.0, float(lengths[e])))
        is_mst[e] = True
        merges += 1
        if merges == n - 1:
            break
    roots = {find(i) for i in range(n)}
    for _ in roots:
        pairs.append((0.0, INF))
    return pairs, is_mst


def enclosing_radius(dist: np.ndarray) -> float:
    """min over vertices of the max distance to any other vertex.

    Beyond this scale the complex is a cone (hence contractible), so dim >= 1
    persistence is unaffected by truncating the filtration here.
    """
    if dist.shape[0] == 1:
        return 0.0
    return float(np.min(np.max(dist, axis=1)))


def vr_pd(points, max_dim: int = 1, threshold: float = INF) -> list[PersistenceDiagram]:
    """Vietoris-Rips persistence diagrams for dims 0..max_dim (max_dim <= 1)."""
    x = np.asarray(points, dtype=np.float64)
    if x.ndim == 1:
        x = x[:, None]
    if x.ndim != 2 or x.shape[0] == 0:
        raise ValueError("point cloud must be a nonempty 2-D array")
    if not np.all(np.isfinite(x)):
        raise ValueError("point coordinates must be finite")
    if max_dim not in (0, 1):
        raise ValueError("max_dim must be 0 or 1")
    if not threshold > 0:
        raise ValueError("threshold must be positive")

    n = x.shape[0]
    dist = pairwise_distances(x)
    ii, jj, lengths = _sorted_edges(dist)
    pairs0, is_mst = _dim0_pairs(ii, jj, lengths, n, threshold)
    out = [PersistenceDiagram(0, pairs0)]
    if max_dim == 0:
        return out

    # Truncating at the enclosing radius leaves dim-1 persistence unchanged.
    teff = threshold if math.isfinite(threshold) else enclosing_radius(dist)
    positive = (lengths <= teff) & ~is_mst  # cycle-creating edges

    pairs1: list[tuple[float, float]] = []
    if np.any(positive):
        births, deaths, essential = _dim1_pairs_cohomology(
            dist, ii, jj, lengths, positive, teff
        )
        for b, d in zip(births, deaths):
            if d > b:
                pairs1.append((float(b), float(d)))
        if math.isfinite(threshold):
            # cycles never filled below the threshold are essential
            for r in essential:
                pairs1.append((float(lengths[r]), INF))
    out.append(PersistenceDiagram(1, pairs1))
    return out


# ---------------------------------------------------------------------------
# Explicit-filtration oracle: plain full-matrix reduction, no optimizations.
# ---------------------------------------------------------------------------


def explicit_filtration_ph(steps) -> list[PersistenceDiagram]:
    """Persistence (dims 0 and 1) of an explicit filtration.

    ``steps`` is an iterable of (simplex, value) with simplex a vertex-index
    tuple of size 1, 2 or 3.  Validates the filtration property and performs
    the textbook Z2 boundary-matrix reduction with no shortcuts.
    """
    simplices = []
    for simplex, value in steps:
        s = tuple(sorted(int(v) for v in simplex))
        if len(set(s)) != len(s) or not 1 <= len(s) <= 3:
            raise ValueError(f"bad simplex {simplex!r}")
        simplices.append((s, float(value)))

    value_of = {}
    for s, v in simplices:
        if s in value_of:
            raise ValueError(f"simplex {s} appears twice in the filtration")
        value_of[s] = v
    for s, v in simplices:
        for face in combinations(s, len(s) - 1):
            if not face:
                continue
            if face not in value_of or value_of[face] > v:
                raise ValueError(
                    f"filtration property violated: face {face} of {s} "
                    f"missing or entering after value {v}"
                )

    # global filtration order: value, then dimension, then lexicographic
    ordered = sorted(simplices, key=lambda sv: (sv[1], len(sv[0]), sv[0]))
    index_of = {s: i for i, (s, _) in enumerate(ordered)}

    low_to_col: dict[int, set[int]] = {}
    killed_by: dict[int, int] = {}  # creator index -> killer index
    negative: set[int] = set()  # simplices whose column kept a pivot
    for j, (s, _) in enumerate(ordered):
        col = {index_of[f] for f in combinations(s, len(s) - 1) if f}
        while col:
            low = max(col)
            if low in low_to_col:
                col ^= low_to_col[low]
            else:
                low_to_col[low] = col
                killed_by[low] = j
                negative.add(j)
                break

    diagrams: dict[int, list[tuple[float, float]]] = {0: [], 1: []}
    for i, (s, v) in enumerate(ordered):
        if i in negative:
            continue  # kills an older class, creates nothing
        q = len(s) - 1
        death = ordered[killed_by[i]][1] if i in killed_by else INF
        if q in diagrams:
            diagrams[q].append((v, death))
    return [PersistenceDiagram(0, diagrams[0]), PersistenceDiagram(1, diagrams[1])]


def vr_filtration_steps(points, threshold: float = INF):
    """Fully enumerated VR filtration (simplices up to triangles) of a cloud.

    Intended for feeding ``explicit_filtration_ph`` on small clouds.
    """
    x = np.asarray(points, dtype=np.float64)
    if x.ndim == 1:
        x = x[:, None]
    dist = pairwise_distances(x)
    n = x.shape[0]
    steps = [((i,), 0.0) for i in range(n)]
    for i, j in combinations(range(n), 2):
        if dist[i, j] <= threshold:
            steps.append(((i, j), float(dist[i, j])))
    for i, j, k in combinations(range(n), 3):
        d = max(dist[i, j], dist[i, k], dist[j, k])
        if d <= threshold:
            steps.append(((i, j, k), float(d)))
    return steps
