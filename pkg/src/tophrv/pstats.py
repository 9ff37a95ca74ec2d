"""16-dimensional persistence-statistics vectorization of a diagram.

Slots 1-8 are summary statistics of the midpoint multiset M, slots 9-16 the
same statistics of the lifespan multiset L: mean, standard deviation,
skewness, kurtosis, 25th/50th/75th percentile, persistent entropy.

Conventions (fixed so vectors are reproducible): sample standard deviation
(n-1 denominator, 0 when n < 2); population central moments for skewness
(0 when n < 3 or the multiset is constant) and non-excess kurtosis (0 when
constant); percentiles by linear interpolation at rank (n-1)*q; entropy with
natural log over normalized absolute values.  Degenerate statistics are 0,
never NaN.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .diagrams import PersistenceDiagram, lifespans, midpoints

PS_DIM = 16


@dataclass(frozen=True)
class PSVector:
    """Persistence-statistics vector; ``empty`` flags an empty diagram."""

    values: np.ndarray = field()
    empty: bool = False

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values, dtype=np.float64))
        if self.values.shape != (PS_DIM,):
            raise ValueError(f"expected {PS_DIM} values, got {self.values.shape}")


def persistent_entropy(values) -> float:
    """Shannon entropy of the normalized absolute values; empty or all-zero -> 0."""
    w = np.abs(np.asarray(values, dtype=np.float64))
    total = w.sum()
    if w.size == 0 or total == 0.0:
        return 0.0
    p = w / total
    p = p[p > 0.0]
    return float(-np.sum(p * np.log(p)))


def _summary_block(values: np.ndarray) -> np.ndarray:
    n = values.size
    out = np.zeros(8)
    if n == 0:
        return out
    mean = float(np.mean(values))
    out[0] = mean
    constant = np.min(values) == np.max(values)  # rounding in the mean would
    # otherwise turn the central moments of a constant multiset into noise
    out[1] = float(np.std(values, ddof=1)) if n > 1 and not constant else 0.0
    centered = values - mean
    m2 = 0.0 if constant else float(np.mean(centered**2))
    if m2 > 0.0:
        if n >= 3:
            out[2] = float(np.mean(centered**3)) / m2**1.5
        out[3] = float(np.mean(centered**4)) / m2**2
    out[4:7] = np.percentile(values, [25.0, 50.0, 75.0])
    out[7] = persistent_entropy(values)
    return out


def persistence_statistics(pd: PersistenceDiagram) -> PSVector:
    """Map a diagram to its 16 persistence statistics.

    Essential pairs are excluded via the midpoint/lifespan definitions; an
    empty (or all-essential) diagram yields the zero vector with the empty
    flag set.
    """
    m = np.asarray(midpoints(pd), dtype=np.float64)
    l = np.asarray(lifespans(pd), dtype=np.float64)
    if m.size == 0:
        return PSVector(np.zeros(PS_DIM), empty=True)
    return PSVector(np.concatenate([_summary_block(m), _summary_block(l)]))
