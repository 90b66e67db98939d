import math

import numpy as np
import pytest

from bandeau.errors import GeometryError, InvalidInstanceError
from bandeau.geometry import Point2, eval_curve
from bandeau.synth import (
    REPRODUCTION_COUNTS,
    SynthSpec,
    build_synthetic_curve,
    fit_piece,
    gen_bucket_spec,
    gen_extreme,
    gen_metopic,
    gen_sagittal,
    ideal_for,
    pieces_for,
    spec_value,
)

REFERENCE_L = ((-49.3, 48.7), (-12.5, 7.0), (0.0, 0.0), (12.5, 7.0), (49.3, 48.7))
REFERENCE_D = (2.0, 1.0, 1.0, 2.0)


class TestFitPiece:
    def test_linear_piece(self):
        # Oracle: solve the 2x2 system by hand for d=1.
        piece = fit_piece(Point2(0, 0), Point2(12.5, 7), 1.0)
        assert piece.a == pytest.approx(7 / 12.5, rel=1e-12)
        assert piece.a == pytest.approx(0.56, rel=1e-12)
        assert piece.b == pytest.approx(0.0, abs=1e-12)

    def test_quadratic_piece(self):
        # a = (48.7-7) / (49.3^2 - 12.5^2) = 41.7 / 2274.24, b follows.
        piece = fit_piece(Point2(12.5, 7), Point2(49.3, 48.7), 2.0)
        assert piece.a == pytest.approx(41.7 / 2274.24, rel=1e-12)
        assert piece.b == pytest.approx(7 - (41.7 / 2274.24) * 156.25, rel=1e-9)
        assert piece.a == pytest.approx(0.018336, rel=1e-4)
        assert piece.b == pytest.approx(4.1350, rel=1e-4)

    def test_unit_piece_any_degree(self):
        for d in (1.0, 2.0, 3.0, 0.5):
            piece = fit_piece(Point2(0, 0), Point2(1, 1), d)
            assert piece.a == pytest.approx(1.0) and piece.b == pytest.approx(0.0, abs=1e-12)

    def test_interpolation_exact_at_endpoints(self):
        piece = fit_piece(Point2(-49.3, 48.7), Point2(-12.5, 7), 2.0)
        assert piece.value(-49.3) == pytest.approx(48.7, rel=1e-12)
        assert piece.value(-12.5) == pytest.approx(7.0, rel=1e-12)

    def test_degenerate_denominator(self):
        with pytest.raises(GeometryError):
            fit_piece(Point2(-2, 0), Point2(2, 1), 2.0)

    def test_fractional_degree_on_negative_x(self):
        with pytest.raises(GeometryError):
            fit_piece(Point2(-4, 0), Point2(-1, 1), 0.5)


class TestSynthSpec:
    def test_requires_anchor_points(self):
        with pytest.raises(InvalidInstanceError):
            SynthSpec(((-10, 5), (10, 5)), (1.0,))

    def test_requires_matching_degree_count(self):
        with pytest.raises(InvalidInstanceError):
            SynthSpec(REFERENCE_L, (1.0, 2.0))

    def test_requires_increasing_x(self):
        bad = ((-49.3, 48.7), (0.0, 0.0), (-12.5, 7.0), (12.5, 7.0), (49.3, 48.7))
        with pytest.raises(InvalidInstanceError):
            SynthSpec(bad, REFERENCE_D)


class TestBuildCurve:
    def test_reference_curve_hits_split_points(self):
        spec = SynthSpec(REFERENCE_L, REFERENCE_D)
        for x, y in REFERENCE_L:
            assert float(spec_value(spec, x)) == pytest.approx(y, abs=1e-9)

    def test_all_linear_matches_interpolation(self):
        spec = SynthSpec(((-5, 5), (0, 0), (5, 5)), (1.0, 1.0), n_samples=11)
        curve = build_synthetic_curve(spec)
        for p in curve.points:
            assert p.y == pytest.approx(abs(p.x), abs=1e-12)

    def test_default_sampling_density(self):
        curve = build_synthetic_curve(SynthSpec(REFERENCE_L, REFERENCE_D))
        assert len(curve) == 200
        assert curve.first.x == -49.3 and curve.last.x == 49.3

    def test_mirror_symmetry_of_samples(self):
        curve = build_synthetic_curve(SynthSpec(REFERENCE_L, REFERENCE_D))
        a = curve.array
        assert np.allclose(a[::-1, 1], a[:, 1], atol=1e-9)
        assert np.allclose(a[::-1, 0], -a[:, 0], atol=1e-9)


class TestIdealFor:
    def test_parabola_through_anchors(self):
        deformed = build_synthetic_curve(SynthSpec(REFERENCE_L, REFERENCE_D))
        ideal = ideal_for(deformed)
        coef = 48.7 / 49.3 ** 2
        xs = ideal.array[:, 0]
        assert 0.0 in xs
        assert eval_curve(ideal, 0.0) == 0.0
        assert ideal.first.x == -49.3 and ideal.last.y == 48.7
        mid = ideal.array[ideal.array[:, 0] != 0.0]
        assert np.allclose(mid[1:-1, 1], coef * mid[1:-1, 0] ** 2, rtol=1e-9)

    def test_scale_symmetry(self):
        spec = SynthSpec(((-25.0, 25.0), (0.0, 0.0), (25.0, 25.0)), (1.0, 1.0))
        ideal = ideal_for(build_synthetic_curve(spec))
        x = ideal.array[50, 0]
        assert eval_curve(ideal, x) == pytest.approx(x * x / 25.0, rel=1e-9)

    def test_rejects_asymmetric_endpoints(self):
        from test_geometry import fc
        with pytest.raises(GeometryError):
            ideal_for(fc((-5, 5), (0, 0), (9, 5)))


class TestGenerators:
    def test_deterministic_per_seed(self):
        for gen in (gen_metopic, gen_sagittal, gen_extreme):
            assert gen(12345) == gen(12345)
            assert gen(1) != gen(2)

    def test_metopic_ranges_and_shape(self):
        coef = 48.7 / 49.3 ** 2
        for seed in range(300):
            spec = gen_metopic(seed)
            (x, y) = spec.L[3]
            assert 12.5 <= x <= 25.0 and 2.0 <= y <= 20.0
            assert y > coef * x * x          # split point above the ideal
            assert spec.D[0] in (2.0, 3.0) and spec.D[1] in (1.0, 2.0)
            assert spec.D == (spec.D[0], spec.D[1], spec.D[1], spec.D[0])

    def test_sagittal_ranges_and_shape(self):
        coef = 48.7 / 49.3 ** 2
        for seed in range(300):
            spec = gen_sagittal(seed)
            (x, y) = spec.L[3]
            assert 27.0 <= x < 49.3 and 0.5 <= y <= 2.0
            assert y < coef * x * x          # split point below the ideal
            assert spec.D[0] in (2.0, 4.0) and spec.D[1] in (1.0, 2.0)

    def test_extreme_structure(self):
        for seed in range(100):
            spec = gen_extreme(seed)
            assert len(spec.L) == 13 and len(spec.D) == 12
            assert spec.L[0] == (-50.0, 50.0) and spec.L[-1] == (50.0, 50.0)
            pos = spec.L[7:12]
            assert all(1.0 <= x <= 49.0 and 1.0 <= y <= 49.0 for x, y in pos)
            assert all(a[0] < b[0] for a, b in zip(pos, pos[1:]))
            assert all(d in (1.0, 2.0, 3.0, 4.0) for d in spec.D)
            assert spec.D[:6] == tuple(reversed(spec.D[6:]))

    def test_generated_curves_build_and_mirror(self):
        for bucket in ("metopic", "sagittal", "extreme"):
            spec = gen_bucket_spec(bucket, 5)
            curve = build_synthetic_curve(spec)
            a = curve.array
            assert np.allclose(a[::-1, 1], a[:, 1], atol=1e-9)
            for x, y in spec.L:
                assert float(spec_value(spec, x)) == pytest.approx(y, abs=1e-9)

    def test_reproduction_counts(self):
        assert REPRODUCTION_COUNTS == {"metopic": 24, "sagittal": 24, "extreme": 20}

    def test_unknown_bucket(self):
        with pytest.raises(InvalidInstanceError):
            gen_bucket_spec("coronal", 1)
