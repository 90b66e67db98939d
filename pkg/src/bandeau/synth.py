"""Synthetic craniosynostosis-style case generation.

A deformed curve is specified by split points L (mirror-symmetric about the
origin, with (0,0) and the ideal endpoints included) and one power-law degree
per gap: on [l_i.x, l_{i+1}.x] the curve is ``a x^d + b`` with (a, b) solved
so both split points are interpolated.  The ideal stand-in is the unique
parabola through the endpoints and the origin, discretized with the origin
kept as a grid point so the anchor-containment rule holds exactly.

Three seeded buckets mirror common presentations: ``metopic`` (split point
above the ideal, steeper toward the origin), ``sagittal`` (flat and below the
ideal until a late bend up), and ``extreme`` (stress cases from five random
split points and degrees up to 4).  Draws come from the portable SplitMix64
generator, so a bucket is a pure function of its seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import GeometryError, InvalidInstanceError
from .geometry import FunctionCurve, Point2
from .rng import SplitMix64

REPRODUCTION_COUNTS = {"metopic": 24, "sagittal": 24, "extreme": 20}

_METOPIC_END = (49.3, 48.7)
_EXTREME_END = (50.0, 50.0)


@dataclass(frozen=True)
class SynthSpec:
    """Split points, per-gap degrees, and sampling density for one case."""

    L: tuple[tuple[float, float], ...]
    D: tuple[float, ...]
    bucket: str | None = None
    seed: int | None = None
    n_samples: int = 200

    def __post_init__(self):
        pts = tuple((float(x), float(y)) for x, y in self.L)
        object.__setattr__(self, "L", pts)
        object.__setattr__(self, "D", tuple(float(d) for d in self.D))
        if len(self.D) != len(pts) - 1:
            raise InvalidInstanceError(f"need {len(pts) - 1} degrees for {len(pts)} split points, got {len(self.D)}")
        for (x0, _), (x1, _) in zip(pts, pts[1:]):
            if not x0 < x1:
                raise InvalidInstanceError("split points must strictly increase in x")
        x_end, y_end = pts[-1]
        required = [(-x_end, y_end), (0.0, 0.0), (x_end, y_end)]
        for rx, ry in required:
            if not any(abs(px - rx) <= 1e-9 and abs(py - ry) <= 1e-9 for px, py in pts):
                raise InvalidInstanceError(f"split points must contain ({rx}, {ry})")
        if self.n_samples < 2:
            raise InvalidInstanceError("need at least 2 samples")


@dataclass(frozen=True)
class PowerPiece:
    """One power-law arc a*x^d + b over [x_lo, x_hi]."""

    a: float
    b: float
    d: float
    x_lo: float
    x_hi: float

    def value(self, x):
        return self.a * _pow(x, self.d) + self.b


def _pow(x, d: float):
    xs = np.asarray(x, dtype=float)
    if float(d).is_integer():
        return np.power(xs, int(d))
    if np.any(xs < 0.0):
        raise GeometryError(f"fractional degree {d} undefined on negative x")
    return np.power(xs, d)


def fit_piece(p0: Point2, p1: Point2, d: float) -> PowerPiece:
    """Solve a*x^d + b through both points; error when the system degenerates."""
    if not p0.x < p1.x:
        raise GeometryError("piece endpoints must be ordered in x")
    t0 = float(_pow(p0.x, d))
    t1 = float(_pow(p1.x, d))
    denom = t1 - t0
    if denom == 0.0 or not math.isfinite(denom):
        raise GeometryError(f"degenerate piece: x^{d} equal at {p0.x} and {p1.x}")
    a = (p1.y - p0.y) / denom
    b = p0.y - a * t0
    return PowerPiece(a, b, d, p0.x, p1.x)


def pieces_for(spec: SynthSpec) -> list[PowerPiece]:
    return [
        fit_piece(Point2(*p0), Point2(*p1), d)
        for p0, p1, d in zip(spec.L, spec.L[1:], spec.D)
    ]


def spec_value(spec: SynthSpec, x) -> np.ndarray:
    """Evaluate the continuous (pre-discretization) synthetic curve."""
    pieces = pieces_for(spec)
    xs = np.asarray(x, dtype=float)
    edges = np.array([p[0] for p in spec.L])
    idx = np.clip(np.searchsorted(edges, xs, side="right") - 1, 0, len(pieces) - 1)
    out = np.empty_like(xs)
    for i, piece in enumerate(pieces):
        sel = idx == i
        if np.any(sel):
            out[sel] = piece.value(xs[sel])
    return out


def build_synthetic_curve(spec: SynthSpec) -> FunctionCurve:
    """Sample the piecewise power curve at n_samples uniform x positions."""
    xs = np.linspace(spec.L[0][0], spec.L[-1][0], spec.n_samples)
    ys = spec_value(spec, xs)
    ys[0] = spec.L[0][1]
    ys[-1] = spec.L[-1][1]
    return FunctionCurve.from_xy(xs, ys)


def ideal_for(deformed: FunctionCurve, n_samples: int = 200) -> FunctionCurve:
    """Parabolic stand-in for the ideal curve, anchored to the deformed
    endpoints and the origin.

    The grid is uniform except that x=0 is inserted when absent (even sample
    counts), so the anchor points are always grid points.
    """
    x0, y0 = deformed.last.x, deformed.last.y
    if x0 <= 0.0:
        raise GeometryError("deformed curve must end at positive x")
    if abs(deformed.first.x + x0) > 1e-6 * max(1.0, x0) or abs(deformed.first.y - y0) > 1e-6 * max(1.0, abs(y0)):
        raise GeometryError("deformed endpoints must be mirror images (-x0, y0), (x0, y0)")
    coef = y0 / (x0 * x0)
    xs = np.linspace(-x0, x0, n_samples)
    if not np.any(xs == 0.0):
        xs = np.sort(np.append(xs, 0.0))
    ys = coef * xs * xs
    ys[0] = y0
    ys[-1] = y0
    ys[xs == 0.0] = 0.0
    return FunctionCurve.from_xy(xs, ys)


def _mirror_spec(split_pts, degrees, end, bucket, seed, n_samples) -> SynthSpec:
    """L from positive-side split points mirrored about the origin."""
    xe, ye = end
    pos = list(split_pts)
    left = [(-x, y) for x, y in reversed(pos)]
    L = [(-xe, ye)] + left + [(0.0, 0.0)] + pos + [(xe, ye)]
    D = tuple(reversed(degrees)) + tuple(degrees)
    return SynthSpec(tuple(L), D, bucket=bucket, seed=seed, n_samples=n_samples)


def gen_metopic(seed: int, n_samples: int = 200) -> SynthSpec:
    """Split point in [12.5, 25] x [2, 20] above the ideal stand-in; inner
    degree in {1, 2}, outer in {2, 3}."""
    rng = SplitMix64(seed)
    xe, ye = _METOPIC_END
    coef = ye / (xe * xe)
    while True:
        x = rng.uniform(12.5, 25.0)
        y = rng.uniform(2.0, 20.0)
        if y > coef * x * x:
            break
    d1 = float(rng.choice((1, 2)))
    d2 = float(rng.choice((2, 3)))
    return _mirror_spec([(x, y)], (d1, d2), _METOPIC_END, "metopic", seed, n_samples)


def gen_sagittal(seed: int, n_samples: int = 200) -> SynthSpec:
    """Split point from [27, 55] x [0.5, 2], redrawn until it stays inside the
    curve's x-range; flat-then-bend shape below the ideal stand-in."""
    rng = SplitMix64(seed)
    xe, ye = _METOPIC_END
    coef = ye / (xe * xe)
    while True:
        x = rng.uniform(27.0, 55.0)
        y = rng.uniform(0.5, 2.0)
        if x < xe and y < coef * x * x:
            break
    d1 = float(rng.choice((1, 2)))
    d2 = float(rng.choice((2, 4)))
    return _mirror_spec([(x, y)], (d1, d2), _METOPIC_END, "sagittal", seed, n_samples)


def gen_extreme(seed: int, n_samples: int = 200) -> SynthSpec:
    """Five random split points in [1, 49]^2 and six degrees from {1..4}."""
    rng = SplitMix64(seed)
    while True:
        pts = sorted((rng.uniform(1.0, 49.0), rng.uniform(1.0, 49.0)) for _ in range(5))
        if all(b[0] - a[0] > 1e-9 for a, b in zip(pts, pts[1:])):
            break
    # Degrees ordered origin-outward; the mirrored side reverses them, giving
    # the overall pattern {d6..d1, d1..d6}.
    degrees = tuple(float(rng.choice((1, 2, 3, 4))) for _ in range(6))
    return _mirror_spec(pts, degrees, _EXTREME_END, "extreme", seed, n_samples)


_GENERATORS = {"metopic": gen_metopic, "sagittal": gen_sagittal, "extreme": gen_extreme}


def gen_bucket_spec(bucket: str, seed: int, n_samples: int = 200) -> SynthSpec:
    gen = _GENERATORS.get(bucket)
    if gen is None:
        raise InvalidInstanceError(f"unknown bucket {bucket!r}; choose from {sorted(_GENERATORS)}")
    return gen(seed, n_samples)


def make_case(bucket: str, seed: int, n_samples: int = 200) -> tuple[FunctionCurve, FunctionCurve]:
    """(deformed, ideal) pair for one bucket draw."""
    spec = gen_bucket_spec(bucket, seed, n_samples)
    deformed = build_synthetic_curve(spec)
    return deformed, ideal_for(deformed, n_samples)
