"""Delay (lag) embedding of a scalar time series into a Euclidean point cloud."""

from __future__ import annotations

import numpy as np


def lag_map(series, p: int, tau: int) -> np.ndarray:
    """Embed a series into R^p with lag ``tau``.

    Point k (for time t = (p-1)*tau + k) has coordinates
    (H(t), H(t-tau), ..., H(t-(p-1)*tau)): current value first, oldest last.
    Returns an (n - (p-1)*tau, p) array, rows in increasing t order.
    """
    x = np.asarray(series, dtype=np.float64)
    if x.ndim != 1:
        raise ValueError("series must be 1-D")
    if p < 1 or tau < 1:
        raise ValueError(f"need p >= 1 and tau >= 1, got p={p}, tau={tau}")
    n = x.size
    min_len = (p - 1) * tau + 1
    if n < min_len:
        raise ValueError(
            f"series of length {n} too short for (p={p}, tau={tau}); "
            f"minimum length is {min_len}"
        )
    m = n - (p - 1) * tau
    out = np.empty((m, p), dtype=np.float64)
    for q in range(p):
        start = (p - 1) * tau - q * tau
        out[:, q] = x[start : start + m]
    return out
