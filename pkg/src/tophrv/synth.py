"""Synthetic R-peak recordings with wake / REM / NREM epoch labels.

Desk-scale stand-in for clinical polysomnography data: a semi-Markov state
generator emits 30-second epoch labels, and beats are laid down with
state-dependent mean RR, slow modulation and jitter.  Wake has short mean RR
with strong low-frequency modulation and high jitter; NREM has long mean RR,
strong respiratory-band modulation and low jitter; REM sits in between.
Everything is driven by one seeded PCG64 generator, so output is fully
determined by the seed.
"""

from __future__ import annotations

import numpy as np

WAKE, REM, NREM = 0, 1, 2

# per-state beat model: mean RR (s), (modulation freq Hz, amplitude s), jitter sd (s)
_STATE_PARAMS = {
    WAKE: (0.85, (0.04, 0.10), 0.050),
    REM: (0.92, (0.10, 0.05), 0.025),
    NREM: (1.00, (0.25, 0.03), 0.008),
}

# typical successor states and dwell ranges (epochs)
_TRANSITIONS = {
    WAKE: [REM, NREM],
    REM: [NREM, WAKE],
    NREM: [REM, WAKE],
}
_DWELL = {WAKE: (3, 8), REM: (4, 10), NREM: (8, 20)}


def synth_labels(rng: np.random.Generator, n_epochs: int) -> list[int]:
    """Epoch label sequence from a semi-Markov wake/REM/NREM cycle."""
    labels: list[int] = []
    state = WAKE
    while len(labels) < n_epochs:
        lo, hi = _DWELL[state]
        dwell = int(rng.integers(lo, hi + 1))
        labels.extend([state] * dwell)
        nxt = _TRANSITIONS[state]
        state = nxt[0] if rng.random() < 0.7 else nxt[1]
    return labels[:n_epochs]


def synth_peaks(rng: np.random.Generator, labels, epoch_sec: float = 30.0) -> np.ndarray:
    """Beat times for a label sequence, continuous across epoch boundaries."""
    duration = epoch_sec * len(labels)
    phase = float(rng.uniform(0, 2 * np.pi))
    times = [float(rng.uniform(0.2, 0.6))]
    while times[-1] < duration:
        t = times[-1]
        epoch = min(int(t // epoch_sec), len(labels) - 1)
        mean_rr, (freq, amp), jitter = _STATE_PARAMS[labels[epoch]]
        rr = mean_rr + amp * np.sin(2 * np.pi * freq * t + phase) + rng.normal(0.0, jitter)
        times.append(t + max(rr, 0.35))
    return np.asarray(times[:-1] if times[-1] >= duration else times, dtype=np.float64)


def synth_recording(seed: int, minutes: float, epoch_sec: float = 30.0):
    """One recording: (peak times, epoch labels), fully determined by seed."""
    rng = np.random.Generator(np.random.PCG64(seed))
    n_epochs = int(round(minutes * 60.0 / epoch_sec))
    labels = synth_labels(rng, n_epochs)
    peaks = synth_peaks(rng, labels, epoch_sec)
    return peaks, labels
