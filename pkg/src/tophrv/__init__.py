"""Persistent homology toolkit for 1-D time series, with an HRV sleep-staging
pipeline on top.

Core objects: :class:`PersistenceDiagram`, sub-level and Vietoris-Rips
filtrations, persistence statistics, bottleneck distance.  Applied layer:
R-peak feature extraction (:mod:`tophrv.pipeline`), deterministic SVM
training and metrics (:mod:`tophrv.learn`), a CLI (``tophrv``), and an HTTP
service (:mod:`tophrv.service`).
"""

from .diagrams import (
    INF,
    PersistenceDiagram,
    lifespans,
    midpoints,
    read_diagrams,
    remove_essential,
    write_diagrams,
)
from .distance import bottleneck
from .pstats import PS_DIM, PSVector, persistence_statistics, persistent_entropy
from .rips import enclosing_radius, explicit_filtration_ph, vr_filtration_steps, vr_pd
from .sublevel import sublevel_pd0, sublevel_pd0_at
from .takens import lag_map

__version__ = "0.1.0"

__all__ = [
    "INF",
    "PersistenceDiagram",
    "PSVector",
    "PS_DIM",
    "bottleneck",
    "enclosing_radius",
    "explicit_filtration_ph",
    "lag_map",
    "lifespans",
    "midpoints",
    "persistence_statistics",
    "persistent_entropy",
    "read_diagrams",
    "remove_essential",
    "sublevel_pd0",
    "sublevel_pd0_at",
    "vr_filtration_steps",
    "vr_pd",
    "write_diagrams",
]
