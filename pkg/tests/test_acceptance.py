"""End-to-end acceptance suite.

Each test covers one numbered criterion and prints a single PASS line with
the measured quantity; tolerances and budgets are asserted, not just logged.
Run with ``pytest -v tests/test_acceptance.py`` (add ``-s`` to see the lines).
"""

import itertools
import math
import time

import numpy as np
import pytest
from scipy.sparse.csgraph import minimum_spanning_tree
from scipy.spatial.distance import pdist, squareform

from tophrv.cli import main, task_labels, _normalized_by_recording
from tophrv.diagrams import INF, PersistenceDiagram
from tophrv.distance import bottleneck
from tophrv.learn import downsample_balance, predict_ovo, train_ecoc_ovo
from tophrv.pipeline import EpochWindow, FeatureRow, extract_features, read_features
from tophrv.rips import explicit_filtration_ph, vr_filtration_steps, vr_pd
from tophrv.sublevel import sublevel_pd0, sublevel_pd0_at


def _best_time(fn, repeats=5):
    best = INF
    result = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        result = fn()
        best = min(best, time.perf_counter() - t0)
    return result, best


def test_criterion_01_five_step_filtration_golden():
    steps = [
        ((0,), 1.0), ((1,), 1.0), ((0, 1), 1.0),
        ((2,), 3.0), ((0, 2), 3.0), ((1, 2), 3.0),
        ((3,), 4.0), ((0, 3), 4.0),
        ((0, 1, 2), 5.0),
    ]
    (d0, d1), elapsed = _best_time(lambda: explicit_filtration_ph(steps))
    assert (1.0, INF) in d0.pairs
    assert list(d1) == [(3.0, 5.0)]
    assert elapsed < 1e-3
    print(f"\ncriterion 1 PASS: dim0 contains (1,inf), dim1 == {{(3,5)}}, {elapsed * 1e6:.0f} us")


def test_criterion_02_coarse_sublevel_golden():
    t = np.arange(10_000) / 9_999.0
    f = 1 + t + 7 * (t - 0.5) ** 2 + np.cos(8 * np.pi * t) / 2
    pd, elapsed = _best_time(lambda: sublevel_pd0_at(f, [1.5, 2.5, 3.0]))
    assert pd == PersistenceDiagram(0, [(1.5, INF), (1.5, 2.5), (2.5, 3.0)])
    assert elapsed < 10e-3
    print(f"\ncriterion 2 PASS: coarse pairs exact, {elapsed * 1e3:.2f} ms")


def test_criterion_03_oracle_equivalence_200_clouds():
    rng = np.random.default_rng(2024)
    t0 = time.perf_counter()
    for trial in range(200):
        n = int(rng.integers(3, 9))
        dim = 2 if trial % 2 == 0 else 3
        pts = rng.uniform(-1, 1, size=(n, dim))
        fast = vr_pd(pts, max_dim=1)
        oracle = explicit_filtration_ph(vr_filtration_steps(pts))
        assert fast[0] == oracle[0], f"dim0 mismatch at trial {trial}"
        assert fast[1] == oracle[1], f"dim1 mismatch at trial {trial}"
    elapsed = time.perf_counter() - t0
    assert elapsed < 10.0
    print(f"\ncriterion 3 PASS: 200/200 clouds exact, {elapsed:.2f} s")


def test_criterion_04_mst_cross_check_100_clouds():
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(100):
        pts = rng.standard_normal((50, int(rng.integers(2, 4))))
        (d0,) = vr_pd(pts, max_dim=0)
        deaths = np.sort([d for _, d in d0 if d != INF])
        mst = minimum_spanning_tree(squareform(pdist(pts))).toarray()
        mst_lengths = np.sort(mst[mst > 0])
        assert deaths.size == mst_lengths.size == 49
        worst = max(worst, float(np.abs(deaths - mst_lengths).max()))
    assert worst <= 1e-12
    print(f"\ncriterion 4 PASS: 100/100 clouds, max deviation {worst:.2e}")


def test_criterion_05_sublevel_stability_100_trials():
    rng = np.random.default_rng(55)
    worst_slack = -INF
    for trial in range(100):
        f = rng.standard_normal(360) * float(rng.uniform(0.5, 3.0))
        pd_f = sublevel_pd0(f)
        for eps in (0.01, 0.1, 1.0):
            bump = rng.uniform(-1, 1, size=360)
            bump *= eps / np.abs(bump).max()  # infinity norm exactly eps
            d = bottleneck(pd_f, sublevel_pd0(f + bump))
            assert d <= eps + 1e-9, f"trial {trial}, eps {eps}: {d}"
            worst_slack = max(worst_slack, d - eps)
    print(f"\ncriterion 5 PASS: 300 perturbations, worst d - eps = {worst_slack:.2e}")


def test_criterion_06_square_h1():
    pts = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
    _, d1 = vr_pd(pts, max_dim=1)
    assert len(d1) == 1
    ((b, d),) = d1
    assert abs(b - 1.0) <= 1e-12
    assert abs(d - math.sqrt(2.0)) <= 1e-12
    print(f"\ncriterion 6 PASS: dim1 == {{({b}, {d})}}")


def test_criterion_07_metric_arithmetic():
    from tophrv.learn import metrics

    out = metrics([[50, 10], [10, 30]])
    assert abs(out["acc"] - 0.8) <= 1e-12
    assert abs(out["ea"] - 0.52) <= 1e-12
    assert abs(out["kappa"] - 7 / 12) <= 1e-12
    print(f"\ncriterion 7 PASS: Acc {out['acc']}, EA {out['ea']}, Kappa {out['kappa']:.12f}")


def test_criterion_08_entropy_log_n():
    from tophrv.pstats import persistent_entropy

    worst = 0.0
    for n in (1, 2, 10, 1000):
        err = abs(persistent_entropy([0.42] * n) - math.log(n))
        assert err <= 1e-12
        worst = max(worst, err)
    print(f"\ncriterion 8 PASS: n in {{1,2,10,1000}}, max |E - ln n| = {worst:.2e}")


def test_criterion_09_window_feature_budget():
    rng = np.random.default_rng(12)
    samples = np.cumsum(rng.standard_normal(360)) * 0.5
    samples -= np.median(samples)
    window = EpochWindow("bench", 3, samples, 0)
    row, elapsed = _best_time(lambda: extract_features(window), repeats=3)
    assert row.features.size == 48 and np.all(np.isfinite(row.features))
    assert elapsed < 1.0
    print(f"\ncriterion 9 PASS: 360-sample window in {elapsed * 1e3:.0f} ms")


@pytest.fixture(scope="module")
def pipeline_artifacts(tmp_path_factory):
    """Shared synth -> extract -> train -> eval run: 20 recordings of 6
    minutes, first 10 for training, last 10 held out."""
    root = tmp_path_factory.mktemp("e2e")
    data = root / "data"
    t0 = time.perf_counter()
    assert main(["synth", "--recordings", "20", "--minutes", "6",
                 "--seed", "1", "--out-dir", str(data)]) == 0

    def extract(ids, out):
        argv = ["extract", "--out", str(out)]
        for i in ids:
            argv += ["--peaks", str(data / f"rec{i:03d}.peaks.txt"),
                     "--labels", str(data / f"rec{i:03d}.labels.txt")]
        assert main(argv) == 0

    train_csv = root / "train.csv"
    test_csv = root / "test.csv"
    extract(range(1, 11), train_csv)
    extract(range(11, 21), test_csv)

    model = root / "model.json"
    assert main(["train", "--features", str(train_csv), "--task", "sleep-wake",
                 "--seed", "1", "--out", str(model)]) == 0
    report = root / "report.csv"
    assert main(["eval", "--model", str(model), "--features", str(test_csv),
                 "--out", str(report)]) == 0
    elapsed = time.perf_counter() - t0
    return {"root": root, "train_csv": train_csv, "test_csv": test_csv,
            "model": model, "report": report, "elapsed": elapsed}


def test_criterion_10_end_to_end_accuracy_and_seed_stability(pipeline_artifacts):
    train_rows = _normalized_by_recording(read_features(pipeline_artifacts["train_csv"]))
    test_rows = _normalized_by_recording(read_features(pipeline_artifacts["test_csv"]))
    kt, yt, _ = task_labels(train_rows, "sleep-wake")
    ke, ye, _ = task_labels(test_rows, "sleep-wake")
    relabeled = [FeatureRow(r.recording_id, r.epoch_index, y, r.features)
                 for r, y in zip(kt, yt)]

    t0 = time.perf_counter()
    accs = []
    for seed in range(1, 21):
        balanced = downsample_balance(relabeled, seed, classes=(0, 1))
        X = np.stack([r.features for r in balanced])
        ens = train_ecoc_ovo(X, [r.label for r in balanced], classes=(0, 1))
        pred = [predict_ovo(ens, r.features) for r in ke]
        accs.append(float(np.mean([p == t for p, t in zip(pred, ye)])))
    total = pipeline_artifacts["elapsed"] + (time.perf_counter() - t0)

    std = float(np.std(accs, ddof=1))
    assert accs[0] >= 0.90, f"seed-1 accuracy {accs[0]:.4f}"
    assert std < 0.02, f"accuracy std over seeds 1-20: {std:.4f}"
    assert total < 120.0, f"end-to-end runtime {total:.1f} s"
    print(f"\ncriterion 10 PASS: seed-1 acc {accs[0]:.4f}, "
          f"seeds 1-20 std {std:.4f}, runtime {total:.1f} s")


def test_criterion_11_byte_identical_runs(tmp_path):
    def run(tag, jobs):
        d = tmp_path / tag
        data = d / "data"
        assert main(["synth", "--recordings", "2", "--minutes", "5",
                     "--seed", "1", "--out-dir", str(data)]) == 0
        feats = d / "features.csv"
        argv = ["extract", "--jobs", str(jobs), "--out", str(feats)]
        for i in (1, 2):
            argv += ["--peaks", str(data / f"rec00{i}.peaks.txt"),
                     "--labels", str(data / f"rec00{i}.labels.txt")]
        assert main(argv) == 0
        model = d / "model.json"
        assert main(["train", "--features", str(feats), "--task", "sleep-wake",
                     "--seed", "1", "--out", str(model)]) == 0
        report = d / "report.csv"
        assert main(["eval", "--model", str(model), "--features", str(feats),
                     "--out", str(report)]) == 0
        return feats.read_bytes(), model.read_bytes(), report.read_bytes()

    first = run("a", jobs=1)
    second = run("b", jobs=1)
    threaded = run("c", jobs=4)
    assert first == second, "repeat run at 1 thread differs"
    assert first == threaded, "run at 4 threads differs"
    print("\ncriterion 11 PASS: features/model/report byte-identical at 1 and 4 threads")


def test_criterion_12_bottleneck_metric_axioms_by_enumeration():
    def enumerate_bottleneck(a, b):
        pa, pb = list(a), list(b)
        best = INF
        nb = len(pb)
        half = lambda p: (p[1] - p[0]) / 2.0
        for k in range(0, min(len(pa), nb) + 1):
            for sa in itertools.combinations(range(len(pa)), k):
                for sb in itertools.permutations(range(nb), k):
                    cost = 0.0
                    for i, j in zip(sa, sb):
                        cost = max(cost, abs(pa[i][0] - pb[j][0]),
                                   abs(pa[i][1] - pb[j][1]))
                    for i in range(len(pa)):
                        if i not in sa:
                            cost = max(cost, half(pa[i]))
                    for j in range(nb):
                        if j not in sb:
                            cost = max(cost, half(pb[j]))
                    best = min(best, cost)
        return best

    rng = np.random.default_rng(121)

    def random_diagram():
        n = int(rng.integers(0, 6))
        pairs = []
        for _ in range(n):
            b = float(rng.uniform(-3, 3))
            pairs.append((b, b + float(rng.uniform(0.05, 4))))
        return PersistenceDiagram(0, pairs)

    worst = 0.0
    for _ in range(50):
        x, y, z = random_diagram(), random_diagram(), random_diagram()
        dxy = bottleneck(x, y)
        assert dxy == bottleneck(y, x)  # symmetry, exact
        assert bottleneck(x, x) == 0.0  # identity
        worst = max(worst, abs(dxy - enumerate_bottleneck(x, y)))
        assert dxy + bottleneck(y, z) >= bottleneck(x, z) - 1e-12  # triangle
    assert worst <= 1e-12
    print(f"\ncriterion 12 PASS: 50 pairs, max |d - enumeration| = {worst:.2e}")
