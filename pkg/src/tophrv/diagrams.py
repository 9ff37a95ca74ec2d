"""Persistence diagrams as immutable multisets of (birth, death) pairs.

A diagram holds the pairs of a single homology dimension.  Pairs with
``death == birth`` carry no topological information and are discarded at
construction time, so every stored pair satisfies ``death > birth``.
Essential classes (classes that never die) are stored with ``death = inf``.
"""

from __future__ import annotations

import csv
import math
from typing import Iterable, Iterator

INF = math.inf


class PersistenceDiagram:
    """Multiset of (birth, death) pairs in a fixed homology dimension.

    Duplicate pairs are kept with multiplicity.  Iteration order is
    deterministic: sorted by (birth, death) ascending, which also makes
    serialized diagrams byte-comparable across runs.
    """

    __slots__ = ("_dim", "_pairs")

    def __init__(self, dim: int, pairs: Iterable[tuple[float, float]] = ()):
        if dim < 0:
            raise ValueError(f"homology dimension must be >= 0, got {dim}")
        kept = []
        for birth, death in pairs:
            birth = float(birth)
            death = float(death)
            if not math.isfinite(birth):
                raise ValueError(f"birth must be finite, got {birth}")
            if death < birth:
                raise ValueError(f"death {death} < birth {birth}")
            if death == birth:
                continue  # zero-persistence pair: drop
            kept.append((birth, death))
        kept.sort()
        self._dim = int(dim)
        self._pairs = tuple(kept)

    @property
    def dim(self) -> int:
        return self._dim

    @property
    def pairs(self) -> tuple[tuple[float, float], ...]:
        return self._pairs

    def __len__(self) -> int:
        return len(self._pairs)

    def __iter__(self) -> Iterator[tuple[float, float]]:
        return iter(self._pairs)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PersistenceDiagram):
            return NotImplemented
        return self._dim == other._dim and self._pairs == other._pairs

    def __hash__(self) -> int:
        return hash((self._dim, self._pairs))

    def __repr__(self) -> str:
        return f"PersistenceDiagram(dim={self._dim}, pairs={list(self._pairs)})"


def lifespans(pd: PersistenceDiagram) -> list[float]:
    """Lifespans d - b of all finite pairs; essential pairs are omitted."""
    return [d - b for b, d in pd if math.isfinite(d)]


def midpoints(pd: PersistenceDiagram) -> list[float]:
    """Midpoints (d + b) / 2 of all finite pairs; essential pairs are omitted."""
    return [(d + b) / 2.0 for b, d in pd if math.isfinite(d)]


def remove_essential(pd: PersistenceDiagram) -> PersistenceDiagram:
    """Copy of the diagram with all infinite-death pairs removed."""
    return PersistenceDiagram(pd.dim, ((b, d) for b, d in pd if math.isfinite(d)))


def _fmt(x: float) -> str:
    if x == INF:
        return "inf"
    return repr(x)


def write_diagrams(path, diagrams: Iterable[PersistenceDiagram]) -> None:
    """Write diagrams to CSV with header ``dim,birth,death``.

    Rows are sorted by (dim, birth, death); infinite deaths serialize as
    the literal string ``inf``.
    """
    rows = []
    for pd in diagrams:
        for b, d in pd:
            rows.append((pd.dim, b, d))
    rows.sort()
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["dim", "birth", "death"])
        for dim, b, d in rows:
            w.writerow([dim, _fmt(b), _fmt(d)])


def read_diagrams(path) -> dict[int, PersistenceDiagram]:
    """Read a diagram CSV; returns one diagram per dimension present."""
    by_dim: dict[int, list[tuple[float, float]]] = {}
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["dim", "birth", "death"]:
            raise ValueError(f"{path}: expected header dim,birth,death, got {header}")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                dim = int(row[0])
                birth = float(row[1])
                death = INF if row[2].strip() == "inf" else float(row[2])
            except (IndexError, ValueError) as exc:
                raise ValueError(f"{path}:{lineno}: bad diagram row {row!r}") from exc
            by_dim.setdefault(dim, []).append((birth, death))
    return {dim: PersistenceDiagram(dim, pairs) for dim, pairs in by_dim.items()}
