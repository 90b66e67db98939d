import math

import numpy as np
import pytest

from bandeau.dissimilarity import INFINITY, CostOracle, MatchConfig, dissimilarity, matches
from bandeau.errors import GeometryError
from bandeau.geometry import FunctionCurve, Point2, Polyline

from test_geometry import fc, pl, rigid, trapezoid_abs_area


class TestMatchGate:
    def test_equal_chords_alpha_zero(self):
        assert matches(pl((0, 0), (10, 0)), pl((5, 5), (15, 5)), MatchConfig(0.0))

    def test_ratio_outside_band(self):
        assert not matches(pl((0, 0), (10, 0)), pl((0, 0), (12, 0)), MatchConfig(0.1))

    def test_boundary_inclusive(self):
        assert matches(pl((0, 0), (10, 0)), pl((0, 0), (12, 0)), MatchConfig(0.2))

    def test_zero_chord_rejected(self):
        with pytest.raises(GeometryError):
            matches(pl((0, 0), (1, 1), (0, 0)), pl((0, 0), (1, 0)), MatchConfig())

    def test_alpha_bounds_validated(self):
        with pytest.raises(ValueError):
            MatchConfig(1.5)


class TestDissimilarity:
    def test_self_distance_zero(self):
        f = pl((0, 0), (3, 4), (7, 1), (10, 0))
        assert dissimilarity(f, f, MatchConfig(1.0)) == pytest.approx(0.0, abs=1e-9)

    def test_gate_failure_is_infinite(self):
        f = pl((0, 0), (10, 0))
        g = pl((0, 0), (30, 0))
        assert dissimilarity(f, g, MatchConfig(0.3)) == INFINITY

    def test_triangle_against_flat(self):
        f = pl((0, 0), (5, 5), (10, 0))
        g = pl((0, 0), (10, 0))
        assert dissimilarity(f, g, MatchConfig(1.0)) == pytest.approx(25.0, rel=1e-9)

    def test_rigid_motion_invariance(self):
        rng = np.random.default_rng(21)
        f = pl((0, 0), (2, 3), (5, 1), (9, 4), (12, 0))
        g = pl((0, 1), (4, 4), (8, 2), (12, 2))
        base = dissimilarity(f, g, MatchConfig(1.0))
        for _ in range(12):
            fm = rigid(f, rng.uniform(0, 2 * math.pi), *rng.uniform(-30, 30, 2))
            gm = rigid(g, rng.uniform(0, 2 * math.pi), *rng.uniform(-30, 30, 2))
            assert dissimilarity(fm, gm, MatchConfig(1.0)) == pytest.approx(base, rel=1e-9)

    def test_zero_for_similar_polylines(self):
        f = pl((0, 0), (1, 2), (3, 1), (4, 0))
        scaled = rigid(Polyline(tuple(Point2(2.5 * p.x, 2.5 * p.y) for p in f.points)), 0.7, 4, -2)
        assert dissimilarity(scaled, f, MatchConfig(1.0)) == pytest.approx(0.0, abs=1e-9)

    def test_directional_asymmetry_possible(self):
        # Chord ratio 2.5 fails at alpha=1; the reverse ratio 0.4 passes.
        f = pl((0, 0), (5, 3), (10, 0))
        g = pl((0, 0), (12, 2), (25, 0))
        cfg = MatchConfig(1.0)
        assert dissimilarity(f, g, cfg) == INFINITY
        assert dissimilarity(g, f, cfg) < INFINITY


def tiny_curves():
    f = fc((0, 0), (2, 1), (5, -1), (8, 0.5), (10, 0))
    g = fc((0, 0), (3, 2), (6, 1), (10, 0))
    return f, g


class TestCostOracle:
    def test_congruent_subcurves_cost_zero(self):
        f = fc((0, 0), (1, 1), (2, 0), (3, 1), (4, 0))
        oracle = CostOracle(f, f, MatchConfig(1.0))
        assert oracle.query(1, 3, 1, 3) == pytest.approx(0.0, abs=1e-12)

    def test_gate_failure_skips_geometry(self):
        f = fc((0, 0), (1, 0), (2, 0), (40, 0))
        g = fc((0, 0), (1, 0), (2, 0), (3, 0))
        oracle = CostOracle(f, g, MatchConfig(0.0))
        assert oracle.query(0, 3, 0, 1) == INFINITY
        assert oracle.evaluations == 0
        assert oracle.gate_skips == 1

    def test_memo_returns_identical_bits(self):
        f, g = tiny_curves()
        oracle = CostOracle(f, g, MatchConfig(1.0))
        first = oracle.query(0, 3, 1, 3)
        evals = oracle.evaluations
        again = oracle.query(0, 3, 1, 3)
        assert again == first and oracle.evaluations == evals

    def test_span_order_normalized(self):
        f, g = tiny_curves()
        oracle = CostOracle(f, g, MatchConfig(1.0))
        assert oracle.query(0, 2, 3, 1) == oracle.query(0, 2, 1, 3)

    def test_rejects_bad_indices(self):
        f, g = tiny_curves()
        oracle = CostOracle(f, g, MatchConfig(1.0))
        with pytest.raises(IndexError):
            oracle.query(2, 2, 0, 1)
        with pytest.raises(IndexError):
            oracle.query(0, 1, 2, 2)
        with pytest.raises(IndexError):
            oracle.query(0, 99, 0, 1)

    def test_query_matches_definitional_path(self):
        # The oracle's canonical-frame value must agree with the literal
        # rotate/align/partition recipe on random sub-curves.
        rng = np.random.default_rng(3)
        f = fc(*zip(np.arange(9, dtype=float), rng.uniform(-2, 2, 9)))
        g = fc(*zip(np.arange(8, dtype=float), rng.uniform(-2, 2, 8)))
        oracle = CostOracle(f, g, MatchConfig(1.0))
        for _ in range(25):
            i = int(rng.integers(0, 7)); j = int(rng.integers(i + 1, 9))
            l = int(rng.integers(0, 6)); r = int(rng.integers(l + 1, 8))
            got = oracle.query(i, j, l, r)
            want = dissimilarity(
                Polyline(f.points[i:j + 1]), Polyline(g.points[l:r + 1]), MatchConfig(1.0))
            if want == INFINITY:
                assert got == INFINITY
            else:
                assert got == pytest.approx(want, rel=1e-9, abs=1e-12)

    def test_query_matches_trapezoid_oracle_when_aligned_grids_monotone(self):
        f, g = tiny_curves()
        oracle = CostOracle(f, g, MatchConfig(1.0))
        from bandeau.geometry import align_endpoints, rotate_to_horizontal
        for (i, j, l, r) in [(0, 4, 0, 3), (1, 3, 0, 2), (0, 2, 1, 3)]:
            got = oracle.query(i, j, l, r)
            if got == INFINITY:
                continue
            g_t = rotate_to_horizontal(Polyline(g.points[l:r + 1]))
            f_t = align_endpoints(Polyline(f.points[i:j + 1]), g_t.first, g_t.last)
            fa, ga = f_t.array, g_t.array
            if np.all(np.diff(fa[:, 0]) > 0) and np.all(np.diff(ga[:, 0]) > 0):
                assert got == pytest.approx(trapezoid_abs_area(fa, ga), rel=1e-9, abs=1e-12)

    def test_batch_paths_agree_with_scalar(self):
        f, g = tiny_curves()
        o1 = CostOracle(f, g, MatchConfig(1.0))
        o2 = CostOracle(f, g, MatchConfig(1.0))
        ii = np.array([0, 1, 2])
        ll = np.array([0, 1, 0])
        batch = o2.cost_batch(ii, 2, ll, 2)
        for t in range(3):
            want = o1.query(int(ii[t]), int(ii[t]) + 2, int(ll[t]), int(ll[t]) + 2)
            if want == INFINITY:
                assert batch[t] == INFINITY
            else:
                assert batch[t] == pytest.approx(want, rel=1e-12)

    def test_bound_never_exceeds_cost(self):
        rng = np.random.default_rng(17)
        f = fc(*zip(np.arange(12, dtype=float), rng.uniform(-3, 3, 12)))
        g = fc(*zip(np.arange(11, dtype=float), rng.uniform(-3, 3, 11)))
        oracle = CostOracle(f, g, MatchConfig(1.0))
        for wf in (1, 2, 4, 6):
            for wq in (1, 3, 5):
                ii = np.arange(0, 12 - wf)
                for l in range(0, 11 - wq):
                    ll = np.full(ii.shape, l)
                    bound = oracle.bound_batch(ii, wf, ll, wq)
                    cost = oracle.cost_batch(ii, wf, ll, wq)
                    slack = 1e-9 * np.maximum(1.0, np.abs(cost))
                    both = np.isfinite(cost)
                    assert np.all(bound[both] <= cost[both] + slack[both])
