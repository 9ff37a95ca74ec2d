"""R-peak train to epoch-wise topological feature vectors.

Stages: RR intervals from peak times, artifact cleaning with a 5-beat median
filter, instantaneous heart rate (60/RR, beats per minute) resampled to a
uniform grid by monotone shape-preserving cubic interpolation, 90-second
median-subtracted epoch windows, and the 48 persistence statistics per window
(sub-level dim-0 diagram, VR dim-0 and dim-1 diagrams of the lag map).
"""

from __future__ import annotations

import csv
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import PchipInterpolator

from .diagrams import INF
from .pstats import PS_DIM, persistence_statistics
from .rips import vr_pd
from .sublevel import sublevel_pd0
from .takens import lag_map

log = logging.getLogger(__name__)

N_FEATURES = 3 * PS_DIM  # sub-level PD0, VR PD0, VR PD1

# artifact bounds relative to the local 5-beat median RR
RR_LOW = 0.6
RR_HIGH = 1.8


@dataclass
class IhrSeries:
    """Uniformly sampled instantaneous heart rate, in bpm."""

    samples: np.ndarray
    fs: float
    start: float  # time (s) of the first sample

    def index_of(self, t: float) -> int:
        return int(round(t * self.fs)) - int(round(self.start * self.fs))


@dataclass
class EpochWindow:
    recording_id: str
    epoch_index: int
    samples: np.ndarray  # median-subtracted, window_epochs * epoch_sec * fs long
    label: int


@dataclass
class FeatureRow:
    recording_id: str
    epoch_index: int
    label: int
    features: np.ndarray  # N_FEATURES reals, always finite


def rr_from_peaks(peaks) -> tuple[np.ndarray, np.ndarray]:
    """RR intervals r_i - r_{i-1}, stamped at r_i.  Needs >= 2 peaks."""
    t = np.asarray(peaks, dtype=np.float64)
    if t.ndim != 1 or t.size < 2:
        raise ValueError("need at least 2 R peaks")
    if np.any(np.diff(t) <= 0):
        raise ValueError("peak times must be strictly increasing")
    return t[1:], np.diff(t)


def clean_rr(rr, low: float = RR_LOW, high: float = RR_HIGH) -> np.ndarray:
    """5-beat median filter: replace intervals too far from the local median.

    Single left-to-right pass over edge-truncated 5-element windows of the
    original values; rr_i outside [low*m, high*m] is replaced by the window
    median m.
    """
    x = np.asarray(rr, dtype=np.float64)
    out = x.copy()
    n = x.size
    for i in range(n):
        window = x[max(0, i - 2) : i + 3]
        m = float(np.median(window))
        if x[i] < low * m or x[i] > high * m:
            out[i] = m
    return out


def ihr_resample(peaks, fs: float = 4.0, low: float = RR_LOW, high: float = RR_HIGH) -> IhrSeries:
    """IHR knots 60/RR at peak times, interpolated onto the uniform fs grid.

    Uses monotone piecewise-cubic Hermite interpolation (Fritsch-Carlson
    slope limiting), which cannot overshoot between knots.  The grid is
    clipped to the knot span; no extrapolation.
    """
    times, rr = rr_from_peaks(peaks)
    rr = clean_rr(rr, low, high)
    values = 60.0 / rr
    interp = PchipInterpolator(times, values)
    k0 = int(math.ceil(times[0] * fs - 1e-9))
    k1 = int(math.floor(times[-1] * fs + 1e-9))
    if k1 < k0:
        raise ValueError("knot span shorter than one grid step")
    grid = np.arange(k0, k1 + 1, dtype=np.float64) / fs
    return IhrSeries(samples=interp(grid), fs=fs, start=k0 / fs)


def build_epochs(
    ihr: IhrSeries,
    labels,
    peaks,
    recording_id: str = "",
    epoch_sec: float = 30.0,
    window_epochs: int = 3,
) -> list[EpochWindow]:
    """Median-subtracted trailing windows for each labeled epoch.

    Epoch j covers [epoch_sec*j, epoch_sec*(j+1)); its window is the
    window_epochs*epoch_sec seconds ending at the epoch end.  Dropped (with a
    log line): the first window_epochs-1 epochs, unscored epochs (label < 0),
    epochs with fewer than 5 R peaks, and windows extending outside the IHR
    support.
    """
    peaks = np.asarray(peaks, dtype=np.float64)
    wlen = int(round(window_epochs * epoch_sec * ihr.fs))
    windows = []
    for j, label in enumerate(labels):
        label = int(label)
        if label < 0:
            continue
        if j < window_epochs - 1:
            log.debug("%s epoch %d dropped: insufficient history", recording_id, j)
            continue
        n_peaks = int(
            np.searchsorted(peaks, epoch_sec * (j + 1), side="left")
            - np.searchsorted(peaks, epoch_sec * j, side="left")
        )
        if n_peaks < 5:
            log.debug("%s epoch %d dropped: only %d R peaks", recording_id, j, n_peaks)
            continue
        end = ihr.index_of(epoch_sec * (j + 1))
        start = end - wlen + 1
        if start < 0 or end >= ihr.samples.size:
            log.debug("%s epoch %d dropped: outside IHR support", recording_id, j)
            continue
        seg = ihr.samples[start : end + 1]
        windows.append(
            EpochWindow(
                recording_id=recording_id,
                epoch_index=j,
                samples=seg - np.median(seg),
                label=label,
            )
        )
    return windows


def extract_features(window: EpochWindow, embed_dim: int = 120, lag: int = 1) -> FeatureRow:
    """48 persistence statistics of one epoch window.

    Concatenates the statistics of the sub-level dim-0 diagram of the window
    with those of the VR dim-0 and dim-1 diagrams of its lag-map point cloud
    (both VR diagrams come from one reduction pass).  Empty diagrams yield
    zero blocks, so the output is always finite.
    """
    pd_sub = sublevel_pd0(window.samples)
    cloud = lag_map(window.samples, embed_dim, lag)
    pd_vr0, pd_vr1 = vr_pd(cloud, max_dim=1, threshold=INF)
    features = np.concatenate(
        [
            persistence_statistics(pd_sub).values,
            persistence_statistics(pd_vr0).values,
            persistence_statistics(pd_vr1).values,
        ]
    )
    return FeatureRow(window.recording_id, window.epoch_index, window.label, features)


def extract_recording(
    peaks,
    labels,
    recording_id: str = "",
    fs: float = 4.0,
    epoch_sec: float = 30.0,
    window_epochs: int = 3,
    embed_dim: int = 120,
    lag: int = 1,
    rr_low: float = RR_LOW,
    rr_high: float = RR_HIGH,
    jobs: int = 1,
) -> list[FeatureRow]:
    """Full per-recording pipeline: peaks + labels -> feature rows in epoch order.

    Per-epoch work may fan out over ``jobs`` threads; rows are emitted in
    epoch order and are independent of the thread count.
    """
    ihr = ihr_resample(peaks, fs=fs, low=rr_low, high=rr_high)
    windows = build_epochs(
        ihr, labels, peaks, recording_id, epoch_sec=epoch_sec, window_epochs=window_epochs
    )
    if jobs > 1 and len(windows) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(lambda w: extract_features(w, embed_dim, lag), windows))
    return [extract_features(w, embed_dim, lag) for w in windows]


def normalize_per_recording(rows: list[FeatureRow]) -> list[FeatureRow]:
    """z-score each feature column within one recording (sample std).

    Columns with zero standard deviation are left at 0.
    """
    if not rows:
        return []
    ids = {r.recording_id for r in rows}
    if len(ids) != 1:
        raise ValueError(f"rows span multiple recordings: {sorted(ids)}")
    x = np.stack([r.features for r in rows])
    mean = x.mean(axis=0)
    std = x.std(axis=0, ddof=1) if x.shape[0] > 1 else np.zeros(x.shape[1])
    centered = x - mean
    with np.errstate(invalid="ignore", divide="ignore"):
        z = np.where(std > 0, centered / std, 0.0)
    return [
        FeatureRow(r.recording_id, r.epoch_index, r.label, z[i])
        for i, r in enumerate(rows)
    ]


# ---------------------------------------------------------------------------
# File formats
# ---------------------------------------------------------------------------

FEATURE_HEADER = (
    ["recording_id", "epoch", "label"]
    + [f"ps_sub_{i}" for i in range(1, PS_DIM + 1)]
    + [f"ps_vr0_{i}" for i in range(1, PS_DIM + 1)]
    + [f"ps_vr1_{i}" for i in range(1, PS_DIM + 1)]
)


def read_peaks(path) -> np.ndarray:
    """Peaks file: one R-peak time in seconds per line, strictly ascending."""
    times = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                t = float(line)
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: bad peak time {line!r}") from exc
            if not math.isfinite(t) or t <= 0:
                raise ValueError(f"{path}:{lineno}: peak time must be positive, got {t}")
            if times and t <= times[-1]:
                raise ValueError(f"{path}:{lineno}: peak times must be strictly ascending")
            times.append(t)
    return np.asarray(times, dtype=np.float64)


def read_labels(path) -> list[int]:
    """Labels file: one integer per line (0 wake, 1 REM, 2 NREM, -1 unscored)."""
    labels = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                lab = int(line)
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: bad label {line!r}") from exc
            if lab not in (-1, 0, 1, 2):
                raise ValueError(f"{path}:{lineno}: label must be -1/0/1/2, got {lab}")
            labels.append(lab)
    return labels


def write_features(path, rows: list[FeatureRow]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(FEATURE_HEADER)
        for r in rows:
            w.writerow(
                [r.recording_id, r.epoch_index, r.label]
                + [repr(float(v)) for v in r.features]
            )


def read_features(path) -> list[FeatureRow]:
    rows = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != FEATURE_HEADER:
            raise ValueError(f"{path}: unexpected feature CSV header")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                rows.append(
                    FeatureRow(
                        recording_id=row[0],
                        epoch_index=int(row[1]),
                        label=int(row[2]),
                        features=np.array([float(v) for v in row[3:]], dtype=np.float64),
                    )
                )
            except (IndexError, ValueError) as exc:
                raise ValueError(f"{path}:{lineno}: bad feature row") from exc
            if rows[-1].features.size != N_FEATURES:
                raise ValueError(
                    f"{path}:{lineno}: expected {N_FEATURES} features, "
                    f"got {rows[-1].features.size}"
                )
    return rows
