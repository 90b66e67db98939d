import math

import numpy as np
import pytest

from bandeau.dissimilarity import INFINITY, MatchConfig
from bandeau.errors import InvalidInstanceError, SizeGuardError
from bandeau.geometry import FunctionCurve
from bandeau.rearrangement import (
    ReducedInstance,
    ThreePartitionInstance,
    brute_force_rearrangement,
    congruence_cost,
    random_strict_instance,
    reduce_3partition,
    solve_3partition,
    zero_cost_decision,
)
from bandeau.rng import SplitMix64
from bandeau.solver import RefitInstance, brute_force

from test_geometry import fc

FIG10 = ThreePartitionInstance((1, 2, 2, 4, 2, 3), 2, strict=False)


class TestInstanceValidation:
    def test_b_is_derived(self):
        assert FIG10.B == 7

    def test_non_integral_total_rejected(self):
        with pytest.raises(InvalidInstanceError):
            ThreePartitionInstance((1, 1, 1, 1, 1, 2), 2, strict=False)

    def test_strict_bounds_enforced(self):
        with pytest.raises(InvalidInstanceError):
            ThreePartitionInstance((1, 2, 2, 4, 2, 3), 2, strict=True)
        ThreePartitionInstance((4, 4, 4, 4, 4, 4), 2, strict=True)

    def test_wrong_count_rejected(self):
        with pytest.raises(InvalidInstanceError):
            ThreePartitionInstance((1, 2, 3), 2, strict=False)


class TestReduce:
    def test_reference_instance_layout(self):
        ri = reduce_3partition(FIG10)
        assert ri.prefix_sums == (0, 1, 3, 5, 9, 11, 14)
        assert (15, 14) in ri.p_points
        assert (16, 0) in ri.p_points
        assert (8, 14) in ri.q_points
        q_flat = sorted(x for x, y in ri.q_points if y == 0)
        assert q_flat == list(range(0, 8)) + list(range(9, 17))
        assert ri.k == 7
        assert ri.k == len(ri.p_points) - 2

    def test_single_group_degenerate(self):
        tp = ThreePartitionInstance((2, 2, 3), 1, strict=False)
        ri = reduce_3partition(tp)
        assert all(y == 0 for _, y in ri.p_points)
        assert all(y == 0 for _, y in ri.q_points)
        assert [x for x, _ in ri.q_points] == list(range(0, 8))
        assert ri.k == len(ri.p_points) - 2 == 3 * 1 - 1

    def test_strict_uniform_instance(self):
        tp = ThreePartitionInstance((4, 4, 4, 4, 4, 4), 2)
        ri = reduce_3partition(tp)
        assert (13, 24) in ri.q_points               # single separator peak
        flat = sorted(x for x, y in ri.q_points if y == 0)
        assert flat == list(range(0, 13)) + list(range(14, 27))
        assert ri.B == 12

    def test_all_coordinates_integral(self):
        ri = reduce_3partition(FIG10)
        for x, y in ri.p_points + ri.q_points:
            assert isinstance(x, int) and isinstance(y, int)


class TestCongruenceCost:
    def test_translated_flat_segment(self):
        assert congruence_cost([(0, 0), (1, 0)], [(5, 0), (6, 0)]) == 0

    def test_length_mismatch(self):
        assert congruence_cost([(0, 0), (2, 0)], [(0, 0), (3, 0)]) == 1

    def test_peak_onto_peak(self):
        b = 7
        p_tent = [(14, 0), (15, 2 * b), (16, 0)]
        q_tent = [(7, 0), (8, 2 * b), (9, 0)]
        assert congruence_cost(p_tent, q_tent) == 0

    def test_discretization_invariance(self):
        assert congruence_cost([(0, 0), (3, 0)], [(4, 0), (5, 0), (6, 0), (7, 0)]) == 0

    def test_rotation_without_reflection(self):
        bent = [(0, 0), (1, 1), (2, 0)]
        # Quarter turn ccw about the origin: (x, y) -> (-y, x).
        rotated = [(0, 0), (-1, 1), (0, 2)]
        assert congruence_cost(bent, rotated) == 0
        mirrored = [(0, 0), (1, -1), (2, 0)]
        assert congruence_cost(bent, mirrored) == 1
        y_mirrored = [(0, 0), (-1, 1), (-2, 0)]
        assert congruence_cost(bent, y_mirrored) == 1

    def test_shape_mismatch(self):
        assert congruence_cost([(0, 0), (1, 2), (2, 0)], [(0, 0), (1, 1), (2, 0)]) == 1


class TestSolve3Partition:
    def test_reference_yes(self):
        assert solve_3partition(FIG10) is True

    def test_parity_blocked_no(self):
        tp = ThreePartitionInstance((4, 4, 4, 4, 4, 6), 2, strict=False)
        assert tp.B == 13
        assert solve_3partition(tp) is False

    def test_uniform_yes(self):
        assert solve_3partition(ThreePartitionInstance((4, 4, 4, 4, 4, 4), 2)) is True

    def test_size_guard(self):
        sizes = tuple([3] * 18)
        with pytest.raises(SizeGuardError):
            solve_3partition(ThreePartitionInstance(sizes, 6, strict=False))


class TestZeroCostDecision:
    def test_yes_instance(self):
        assert zero_cost_decision(reduce_3partition(FIG10)) is True

    def test_no_instance(self):
        tp = ThreePartitionInstance((4, 4, 4, 4, 4, 6), 2, strict=False)
        assert zero_cost_decision(reduce_3partition(tp)) is False

    def test_single_bucket(self):
        tp = ThreePartitionInstance((2, 2, 3), 1, strict=False)
        assert zero_cost_decision(reduce_3partition(tp)) is True

    def test_iff_property_on_generated_suite(self):
        rng = SplitMix64(99)
        agree = 0
        seen_yes = seen_no = 0
        for m in (2, 3):
            for b in (8, 9, 12, 15, 18, 20):
                for _ in range(3):
                    try:
                        tp = random_strict_instance(rng, m, b)
                    except InvalidInstanceError:
                        continue
                    want = solve_3partition(tp)
                    got = zero_cost_decision(reduce_3partition(tp))
                    assert got == want
                    agree += 1
                    seen_yes += int(want)
                    seen_no += int(not want)
        assert agree >= 20 and seen_yes > 0 and seen_no > 0


class TestBruteForceRearrangement:
    def test_identity_zero(self):
        f = fc(*[(i, math.sin(i)) for i in range(5)])
        inst = RefitInstance(f, f, 0, match=MatchConfig(1.0))
        assert brute_force_rearrangement(inst) == pytest.approx(0.0, abs=1e-12)

    def test_size_guard(self):
        f = fc(*[(i, 0.2 * i) for i in range(9)])
        with pytest.raises(SizeGuardError):
            brute_force_rearrangement(RefitInstance(f, f, 0))

    def test_never_worse_than_ordered_variant(self):
        rng = np.random.default_rng(77)
        for _ in range(25):
            n = int(rng.integers(4, 8))
            m = int(rng.integers(4, 8))
            fx = np.sort(rng.uniform(0, 8, n)); fx[0], fx[-1] = 0, 8
            gx = np.sort(rng.uniform(0, 8, m)); gx[0], gx[-1] = 0, 8
            if len(np.unique(fx)) != n or len(np.unique(gx)) != m:
                continue
            f = FunctionCurve.from_xy(fx, rng.uniform(-2, 2, n))
            g = FunctionCurve.from_xy(gx, rng.uniform(-2, 2, m))
            k = int(rng.integers(0, min(2, n - 2) + 1))
            inst = RefitInstance(f, g, k, float(rng.choice([0.0, 0.4])), MatchConfig(1.0))
            free = brute_force_rearrangement(inst)
            ordered = brute_force(inst)
            if ordered.feasible:
                assert free <= ordered.objective + 1e-9 * max(1.0, abs(ordered.objective))

    def test_reordering_strictly_helps_somewhere(self):
        # Deformed curve carries a bump then a dip; the ideal curve wants the
        # dip first.  Reordering maps each piece to its twin at zero cost.
        f = fc((0, 0), (1, 2), (2, 0), (3, -2), (4, 0))
        g = fc((0, 0), (1, -2), (2, 0), (3, 2), (4, 0))
        inst = RefitInstance(f, g, 1, delta=0.0, match=MatchConfig(1.0))
        free = brute_force_rearrangement(inst)
        ordered = brute_force(inst)
        assert free == pytest.approx(0.0, abs=1e-9)
        assert ordered.feasible and ordered.objective > 1e-6
        assert free < ordered.objective
