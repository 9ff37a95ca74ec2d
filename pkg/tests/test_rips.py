import math

import numpy as np
import pytest
from scipy.sparse.csgraph import minimum_spanning_tree
from scipy.spatial.distance import pdist, squareform

from tophrv.diagrams import INF, PersistenceDiagram
from tophrv.distance import bottleneck
from tophrv.rips import (
    enclosing_radius,
    explicit_filtration_ph,
    pairwise_distances,
    vr_filtration_steps,
    vr_pd,
)

FIG2_STEPS = [
    ((0,), 1.0),
    ((1,), 1.0),
    ((0, 1), 1.0),
    ((2,), 3.0),
    ((0, 2), 3.0),
    ((1, 2), 3.0),
    ((3,), 4.0),
    ((0, 3), 4.0),
    ((0, 1, 2), 5.0),
]


class TestVrPd:
    def test_equilateral_triangle(self):
        s = 2.0
        pts = s * np.array([[0, 0], [1, 0], [0.5, math.sqrt(3) / 2]])
        d0, d1 = vr_pd(pts, max_dim=1)
        assert len(d0) == 3
        assert [b for b, _ in d0] == [0.0, 0.0, 0.0]
        assert d0.pairs[0][1] == pytest.approx(s, abs=1e-12)
        assert d0.pairs[1][1] == pytest.approx(s, abs=1e-12)
        assert d0.pairs[2][1] == INF
        assert list(d1) == []

    def test_square(self):
        pts = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
        d0, d1 = vr_pd(pts, max_dim=1)
        assert list(d0) == [(0.0, 1.0)] * 3 + [(0.0, INF)]
        assert len(d1) == 1
        (b, d), = d1
        assert b == 1.0 and abs(d - math.sqrt(2.0)) < 1e-15

    def test_single_point(self):
        d0, d1 = vr_pd(np.zeros((1, 3)), max_dim=1)
        assert list(d0) == [(0.0, INF)]
        assert list(d1) == []

    def test_max_dim_zero(self):
        (d0,) = vr_pd(np.array([[0.0], [1.0]]), max_dim=0)
        assert list(d0) == [(0.0, 1.0), (0.0, INF)]

    def test_finite_threshold_truncates_h1_death(self):
        # square loop is born at 1 but the diagonals (sqrt 2) are cut off
        pts = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
        _, d1 = vr_pd(pts, max_dim=1, threshold=1.2)
        assert list(d1) == [(1.0, INF)]

    def test_duplicate_points(self):
        pts = np.array([[0.0, 0.0], [0.0, 0.0], [3.0, 0.0]])
        d0, d1 = vr_pd(pts, max_dim=1)
        assert list(d0) == [(0.0, 3.0), (0.0, INF)]  # zero-length merge dropped
        assert list(d1) == []

    def test_errors(self):
        with pytest.raises(ValueError):
            vr_pd(np.zeros((0, 2)), max_dim=1)
        with pytest.raises(ValueError):
            vr_pd(np.zeros((3, 2)), max_dim=2)
        with pytest.raises(ValueError):
            vr_pd(np.zeros((3, 2)), max_dim=1, threshold=0.0)

    def test_deterministic(self):
        rng = np.random.default_rng(5)
        pts = rng.standard_normal((40, 2))
        a = vr_pd(pts, max_dim=1)
        b = vr_pd(pts, max_dim=1)
        assert a[0] == b[0] and a[1] == b[1]

    def test_oracle_equivalence_random_clouds(self):
        rng = np.random.default_rng(42)
        for trial in range(40):
            n = int(rng.integers(3, 9))
            dim = 2 if trial % 2 == 0 else 3
            pts = rng.uniform(-1, 1, size=(n, dim))
            fast = vr_pd(pts, max_dim=1)
            oracle = explicit_filtration_ph(vr_filtration_steps(pts))
            assert fast[0] == oracle[0], f"dim0 mismatch, trial {trial}"
            assert fast[1] == oracle[1], f"dim1 mismatch, trial {trial}"

    def test_oracle_equivalence_finite_threshold(self):
        rng = np.random.default_rng(7)
        for trial in range(20):
            n = int(rng.integers(3, 8))
            pts = rng.uniform(-1, 1, size=(n, 2))
            t = float(rng.uniform(0.3, 1.5))
            fast = vr_pd(pts, max_dim=1, threshold=t)
            oracle = explicit_filtration_ph(vr_filtration_steps(pts, threshold=t))
            # under a finite threshold unfilled loops are essential in both
            assert fast[0] == oracle[0]
            assert fast[1] == oracle[1]

    def test_oracle_equivalence_with_ties(self):
        # integer grids force many equal edge lengths
        pts = np.array([[x, y] for x in range(3) for y in range(2)], dtype=float)
        fast = vr_pd(pts, max_dim=1)
        oracle = explicit_filtration_ph(vr_filtration_steps(pts))
        assert fast[0] == oracle[0] and fast[1] == oracle[1]

    def test_mst_deaths(self):
        rng = np.random.default_rng(3)
        pts = rng.standard_normal((50, 2))
        d0, _ = vr_pd(pts, max_dim=1)
        deaths = sorted(d for _, d in d0 if d != INF)
        dist = squareform(pdist(pts))
        mst = minimum_spanning_tree(dist).toarray()
        mst_lengths = sorted(mst[mst > 0].tolist())
        assert np.allclose(deaths, mst_lengths, rtol=0, atol=1e-12)

    def test_isometry_invariance(self):
        rng = np.random.default_rng(11)
        pts = rng.standard_normal((30, 2))
        theta = 0.7
        rot = np.array([[math.cos(theta), -math.sin(theta)],
                        [math.sin(theta), math.cos(theta)]])
        moved = pts @ rot.T + np.array([3.0, -2.0])
        for a, b in zip(vr_pd(pts, max_dim=1), vr_pd(moved, max_dim=1)):
            assert len(a) == len(b)
            for (b1, d1), (b2, d2) in zip(a, b):
                assert abs(b1 - b2) < 1e-9
                assert (d1 == d2 == INF) or abs(d1 - d2) < 1e-9

    def test_gromov_hausdorff_stability_smoke(self):
        rng = np.random.default_rng(19)
        pts = rng.standard_normal((25, 2))
        delta = 0.01
        shift = rng.uniform(-1, 1, size=pts.shape)
        shift *= delta / np.linalg.norm(shift, axis=1).max()  # Euclidean <= delta
        moved = pts + shift
        for a, b in zip(vr_pd(pts, max_dim=1), vr_pd(moved, max_dim=1)):
            assert bottleneck(a, b) <= 2 * delta + 1e-9


class TestExplicitFiltrationPh:
    def test_five_step_filtration(self):
        d0, d1 = explicit_filtration_ph(FIG2_STEPS)
        assert (1.0, INF) in d0.pairs
        assert list(d1) == [(3.0, 5.0)]

    def test_single_vertex(self):
        d0, d1 = explicit_filtration_ph([((0,), 1.0)])
        assert list(d0) == [(1.0, INF)]
        assert list(d1) == []

    def test_double_loop_filled_later(self):
        # two triangle boundaries at 5, both filled at 6
        steps = [((v,), 5.0) for v in range(5)]
        steps += [((a, b), 5.0) for a, b in
                  [(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (2, 4)]]
        steps += [((0, 1, 2), 6.0), ((2, 3, 4), 6.0)]
        _, d1 = explicit_filtration_ph(steps)
        assert list(d1) == [(5.0, 6.0), (5.0, 6.0)]

    def test_filtration_property_violation_names_simplex(self):
        steps = [((0,), 1.0), ((1,), 2.0), ((0, 1), 1.5)]
        with pytest.raises(ValueError, match=r"\(0, 1\)"):
            explicit_filtration_ph(steps)

    def test_missing_face_rejected(self):
        with pytest.raises(ValueError):
            explicit_filtration_ph([((0,), 1.0), ((0, 1), 2.0)])


class TestFiltrationEnumeration:
    def test_counts_for_full_enumeration(self):
        pts = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]])
        steps = vr_filtration_steps(pts)
        sizes = sorted(len(s) for s, _ in steps)
        assert sizes.count(1) == 4 and sizes.count(2) == 6 and sizes.count(3) == 4

    def test_simplex_value_is_diameter(self):
        rng = np.random.default_rng(2)
        pts = rng.standard_normal((6, 3))
        dist = pairwise_distances(pts)
        for simplex, value in vr_filtration_steps(pts):
            expect = max(
                (dist[a, b] for a in simplex for b in simplex if a < b), default=0.0
            )
            assert value == expect

    def test_threshold_prunes(self):
        pts = np.array([[0.0], [1.0], [10.0]])
        steps = vr_filtration_steps(pts, threshold=2.0)
        assert all(value <= 2.0 for _, value in steps)
        assert sum(len(s) == 1 for s, _ in steps) == 3  # vertices always enter


def test_enclosing_radius():
    pts = np.array([[0.0], [1.0], [3.0]])
    dist = pairwise_distances(pts)
    # min over i of max over j: point 1 sees max distance 2
    assert enclosing_radius(dist) == 2.0
