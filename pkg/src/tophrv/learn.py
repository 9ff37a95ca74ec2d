"""Deterministic linear SVM training, one-vs-one multiclass, and the metric suite.

Training uses dual coordinate descent on the L1-hinge objective with a fixed
visiting order derived from the sorted row contents, so the fitted model is
bit-identical across runs and invariant to the input row order.  Class
imbalance is handled by seeded down-sampling to the minority class size.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np
from scipy.stats import mannwhitneyu, rankdata

from .pipeline import FeatureRow


@dataclass
class LinearModel:
    weights: np.ndarray
    bias: float
    class_pair: tuple[int, int]  # (negative label, positive label)


@dataclass
class OvoEnsemble:
    models: list[LinearModel]
    classes: list[int]


def downsample_balance(rows: list[FeatureRow], seed: int, classes=None) -> list[FeatureRow]:
    """Keep the minority class; sample the same count from every other class.

    Sampling is uniform without replacement from a PCG64 generator seeded
    directly with ``seed``; output preserves the input row order, so the
    result is fully determined by (rows, seed).
    """
    by_class: dict[int, list[int]] = {}
    for i, r in enumerate(rows):
        by_class.setdefault(r.label, []).append(i)
    if classes is not None:
        missing = [c for c in classes if c not in by_class]
        if missing:
            raise ValueError(f"no rows for class(es) {missing}")
    if len(by_class) < 2:
        raise ValueError("need at least 2 classes to balance")
    n_min = min(len(v) for v in by_class.values())
    rng = np.random.Generator(np.random.PCG64(seed))
    keep: list[int] = []
    for label in sorted(by_class):
        idx = by_class[label]
        if len(idx) == n_min:
            keep.extend(idx)
        else:
            chosen = rng.choice(len(idx), size=n_min, replace=False)
            keep.extend(idx[i] for i in sorted(chosen))
    keep.sort()
    return [rows[i] for i in keep]


def train_linear_svm(X, y, C: float = 1.0, tol: float = 1e-6, max_sweeps: int = 1000) -> LinearModel:
    """L1-hinge linear SVM by deterministic dual coordinate descent.

    Minimizes (1/2)||w||^2 + C * sum hinge(y_i (w.x_i + b)); the bias is
    folded in as a constant augmented feature.  Rows are visited in the order
    of their sorted contents (not input order), each sweep in full, until the
    maximum projected-gradient violation drops below ``tol`` or ``max_sweeps``
    sweeps are done.  Identical inputs give bit-identical models.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] != y.size:
        raise ValueError("X must be 2-D with one label per row")
    labels = np.unique(y)
    if not np.array_equal(labels, [-1.0, 1.0]):
        raise ValueError(f"labels must be -1/+1 with both present, got {labels}")

    aug = np.hstack([X, np.ones((X.shape[0], 1))])
    # canonical visiting order: lexicographic on (label, features)
    order = np.lexsort(tuple(aug[:, k] for k in range(aug.shape[1] - 1, -1, -1)) + (y,))
    aug = aug[order]
    yy = y[order]
    n, d = aug.shape
    qii = np.einsum("ij,ij->i", aug, aug)
    alpha = np.zeros(n)
    w = np.zeros(d)
    for _ in range(max_sweeps):
        worst = 0.0
        for i in range(n):
            g = yy[i] * float(aug[i] @ w) - 1.0
            a = alpha[i]
            if a <= 0.0:
                pg = min(g, 0.0)
            elif a >= C:
                pg = max(g, 0.0)
            else:
                pg = g
            if pg != 0.0:
                worst = max(worst, abs(pg))
                if qii[i] > 0.0:
                    a_new = min(max(a - g / qii[i], 0.0), C)
                else:
                    a_new = 0.0 if g > 0 else C
                if a_new != a:
                    w += (a_new - a) * yy[i] * aug[i]
                    alpha[i] = a_new
        if worst < tol:
            break
    return LinearModel(weights=w[:-1].copy(), bias=float(w[-1]), class_pair=(-1, 1))


def decision_score(model: LinearModel, x) -> float:
    x = np.asarray(x, dtype=np.float64)
    if x.shape != model.weights.shape:
        raise ValueError(
            f"feature dimension {x.shape} does not match model {model.weights.shape}"
        )
    return float(model.weights @ x + model.bias)


def predict(model: LinearModel, x) -> int:
    """Positive class for a strictly positive score; ties go to the negative class."""
    return model.class_pair[1] if decision_score(model, x) > 0 else model.class_pair[0]


def train_ecoc_ovo(rows_X, rows_y, classes=None, C: float = 1.0) -> OvoEnsemble:
    """One binary SVM per unordered class pair, majority vote at prediction."""
    X = np.asarray(rows_X, dtype=np.float64)
    y = np.asarray(rows_y, dtype=np.int64)
    present = sorted(int(c) for c in np.unique(y))
    if classes is None:
        classes = present
    else:
        classes = sorted(int(c) for c in classes)
        missing = [c for c in classes if c not in present]
        if missing:
            raise ValueError(f"class(es) {missing} have no training rows")
    if len(classes) < 2:
        raise ValueError("need at least 2 classes")
    models = []
    for neg, pos in combinations(classes, 2):
        mask = (y == neg) | (y == pos)
        y_bin = np.where(y[mask] == pos, 1.0, -1.0)
        m = train_linear_svm(X[mask], y_bin, C=C)
        models.append(LinearModel(m.weights, m.bias, class_pair=(neg, pos)))
    return OvoEnsemble(models=models, classes=classes)


def predict_ovo(ensemble: OvoEnsemble, x) -> int:
    """Majority vote; ties broken by larger total |score| margin, then by
    smaller class index."""
    votes: dict[int, int] = {c: 0 for c in ensemble.classes}
    margin: dict[int, float] = {c: 0.0 for c in ensemble.classes}
    for m in ensemble.models:
        s = decision_score(m, x)
        winner = m.class_pair[1] if s > 0 else m.class_pair[0]
        votes[winner] += 1
        margin[winner] += abs(s)
    best = max(votes.values())
    tied = [c for c in ensemble.classes if votes[c] == best]
    if len(tied) == 1:
        return tied[0]
    best_margin = max(margin[c] for c in tied)
    tied = [c for c in tied if margin[c] == best_margin]
    return min(tied)


def ovo_decision_scores(ensemble: OvoEnsemble, x) -> list[float]:
    return [decision_score(m, x) for m in ensemble.models]


# ---------------------------------------------------------------------------
# Metrics
# ---------------------------------------------------------------------------


def confusion(y_true, y_pred, m: int) -> np.ndarray:
    """m x m counts; entry (k, l) = true class k predicted as l."""
    M = np.zeros((m, m), dtype=np.int64)
    for t, p in zip(y_true, y_pred):
        if not (0 <= t < m and 0 <= p < m):
            raise ValueError(f"labels must be in 0..{m - 1}, got ({t}, {p})")
        M[int(t), int(p)] += 1
    return M


def metrics(M) -> dict:
    """Sensitivity, positive predictivity and F1 per class, accuracy and kappa.

    Ratios with a zero denominator are reported as NaN, never silently 0.
    """
    M = np.asarray(M, dtype=np.float64)
    total = M.sum()
    if total <= 0:
        raise ValueError("confusion matrix is empty")
    row = M.sum(axis=1)
    col = M.sum(axis=0)
    diag = np.diag(M)
    with np.errstate(invalid="ignore", divide="ignore"):
        se = np.where(row > 0, diag / row, np.nan)
        pp = np.where(col > 0, diag / col, np.nan)
        f1 = np.where(se + pp > 0, 2 * pp * se / (pp + se), np.nan)
    acc = float(diag.sum() / total)
    ea = float((row * col).sum() / total**2)
    kappa = (acc - ea) / (1.0 - ea) if ea < 1.0 else math.nan
    return {
        "se": se,
        "ppv": pp,
        "f1": f1,
        "acc": acc,
        "ea": ea,
        "kappa": kappa,
    }


def auc(scores, y) -> float:
    """ROC AUC in Mann-Whitney form: P(random positive outranks random
    negative), ties counted 1/2."""
    s = np.asarray(scores, dtype=np.float64)
    y = np.asarray(y)
    pos = s[y == 1]
    neg = s[y == 0]
    if pos.size == 0 or neg.size == 0:
        raise ValueError("AUC needs both classes present")
    ranks = rankdata(np.concatenate([pos, neg]))
    u = ranks[: pos.size].sum() - pos.size * (pos.size + 1) / 2.0
    return float(u / (pos.size * neg.size))


def rank_sum_test(a, b) -> float:
    """Two-sided Mann-Whitney U p-value, tie-corrected normal approximation
    with continuity correction."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.size < 8 or b.size < 8:
        raise ValueError("normal approximation needs >= 8 samples per group")
    res = mannwhitneyu(a, b, alternative="two-sided", method="asymptotic")
    return float(res.pvalue)


# ---------------------------------------------------------------------------
# Model file
# ---------------------------------------------------------------------------

MODEL_VERSION = 1


def save_model(path, ensemble: OvoEnsemble, task: str, normalize: bool) -> None:
    doc = {
        "version": MODEL_VERSION,
        "task": task,
        "classes": ensemble.classes,
        "normalize": normalize,
        "models": [
            {
                "class_pair": list(m.class_pair),
                "weights": [repr(float(v)) for v in m.weights],
                "bias": repr(m.bias),
            }
            for m in ensemble.models
        ],
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")


def load_model(path) -> tuple[OvoEnsemble, str, bool]:
    with open(path) as fh:
        doc = json.load(fh)
    if doc.get("version") != MODEL_VERSION:
        raise ValueError(f"{path}: unsupported model version {doc.get('version')!r}")
    models = [
        LinearModel(
            weights=np.array([float(v) for v in m["weights"]], dtype=np.float64),
            bias=float(m["bias"]),
            class_pair=(int(m["class_pair"][0]), int(m["class_pair"][1])),
        )
        for m in doc["models"]
    ]
    ensemble = OvoEnsemble(models=models, classes=[int(c) for c in doc["classes"]])
    return ensemble, str(doc["task"]), bool(doc["normalize"])
