"""Primitive 2D geometry for piecewise-linear curves.

Everything here is a pure function of immutable values: curve construction,
similarity alignment, the intersection-based partition of the region enclosed
between two polylines, and Shoelace areas.  Coordinates are millimetres in
double precision; geometric predicates use the absolute tolerance
``EPS_GEOM``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import ContractViolation, DomainError, GeometryError

# Absolute tolerance (mm) for coincidence/intersection predicates.
EPS_GEOM = 1e-9


@dataclass(frozen=True)
class Point2:
    """A point in the plane, coordinates in millimetres."""

    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise GeometryError(f"non-finite coordinates ({self.x}, {self.y})")

    def as_tuple(self) -> tuple[float, float]:
        return (self.x, self.y)


def _to_points(points: Iterable) -> tuple[Point2, ...]:
    out = []
    for p in points:
        out.append(p if isinstance(p, Point2) else Point2(float(p[0]), float(p[1])))
    return tuple(out)


@dataclass(frozen=True)
class Polyline:
    """Ordered 2D point sequence (length >= 2, no repeated consecutive point)."""

    points: tuple[Point2, ...]

    def __post_init__(self):
        object.__setattr__(self, "points", _to_points(self.points))
        if len(self.points) < 2:
            raise GeometryError("polyline needs at least 2 points")
        for a, b in zip(self.points, self.points[1:]):
            if a.x == b.x and a.y == b.y:
                raise GeometryError(f"repeated consecutive point ({a.x}, {a.y})")

    @classmethod
    def from_xy(cls, xs: Sequence[float], ys: Sequence[float]) -> "Polyline":
        return cls(tuple(Point2(float(x), float(y)) for x, y in zip(xs, ys)))

    @property
    def first(self) -> Point2:
        return self.points[0]

    @property
    def last(self) -> Point2:
        return self.points[-1]

    def __len__(self) -> int:
        return len(self.points)

    @cached_property
    def array(self) -> np.ndarray:
        a = np.array([(p.x, p.y) for p in self.points], dtype=float)
        a.setflags(write=False)
        return a


@dataclass(frozen=True)
class FunctionCurve(Polyline):
    """Polyline that is the graph of a function: x strictly increasing."""

    def __post_init__(self):
        super().__post_init__()
        for i, (a, b) in enumerate(zip(self.points, self.points[1:])):
            if not a.x < b.x:
                raise GeometryError(f"x must be strictly increasing, violated at index {i}")

    @property
    def x_min(self) -> float:
        return self.points[0].x

    @property
    def x_max(self) -> float:
        return self.points[-1].x


@dataclass(frozen=True)
class SimplePolygon:
    """Closed loop of vertices assumed free of non-adjacent edge crossings."""

    vertices: tuple[Point2, ...]

    def __post_init__(self):
        object.__setattr__(self, "vertices", _to_points(self.vertices))
        if len(self.vertices) < 3:
            raise GeometryError("polygon needs at least 3 vertices")

    def is_simple(self, tol: float = EPS_GEOM) -> bool:
        """Exhaustive non-adjacent edge crossing check (test helper, O(n^2))."""
        n = len(self.vertices)
        edges = [(self.vertices[i], self.vertices[(i + 1) % n]) for i in range(n)]
        for i in range(n):
            for j in range(i + 1, n):
                if j == i or (j + 1) % n == i or (i + 1) % n == j:
                    continue
                hits = _segment_intersections(
                    edges[i][0].as_tuple(), edges[i][1].as_tuple(),
                    edges[j][0].as_tuple(), edges[j][1].as_tuple(), tol)
                if hits:
                    return False
        return True


def eval_curve(curve: FunctionCurve, x: float) -> float:
    """Piecewise-linear interpolation of the curve at ``x``.

    Raises DomainError outside [x_min, x_max].
    """
    if not (curve.x_min <= x <= curve.x_max):
        raise DomainError(f"x={x} outside curve domain [{curve.x_min}, {curve.x_max}]")
    a = curve.array
    return float(np.interp(x, a[:, 0], a[:, 1]))


def chord_length(p: Polyline) -> float:
    """Euclidean distance between the first and last points."""
    return math.hypot(p.last.x - p.first.x, p.last.y - p.first.y)


def rotate_to_horizontal(g: Polyline) -> Polyline:
    """Rigidly rotate ``g`` about its left endpoint until the chord is horizontal.

    The right endpoint lands at (L.x + chord_length, L.y).
    """
    c = chord_length(g)
    if c <= 0.0:
        raise GeometryError("cannot rotate a polyline with zero chord")
    ox, oy = g.first.x, g.first.y
    dx, dy = g.last.x - ox, g.last.y - oy
    cos_t, sin_t = dx / c, dy / c
    a = g.array
    rx = a[:, 0] - ox
    ry = a[:, 1] - oy
    xs = ox + rx * cos_t + ry * sin_t
    ys = oy - rx * sin_t + ry * cos_t
    return Polyline.from_xy(xs, ys)


def align_endpoints(f: Polyline, target_l: Point2, target_r: Point2) -> Polyline:
    """Map ``f`` by the unique orientation-preserving similarity sending its
    endpoints onto (target_l, target_r).

    Uniform scale + rotation + translation; never a reflection.
    """
    cf = chord_length(f)
    if cf <= 0.0:
        raise GeometryError("cannot align a polyline with zero chord")
    tx, ty = target_r.x - target_l.x, target_r.y - target_l.y
    ct = math.hypot(tx, ty)
    if ct <= 0.0:
        raise GeometryError("alignment targets coincide")
    fx, fy = f.last.x - f.first.x, f.last.y - f.first.y
    # Complex ratio (tx + i ty) / (fx + i fy) encodes rotation and scale.
    denom = fx * fx + fy * fy
    re = (tx * fx + ty * fy) / denom
    im = (ty * fx - tx * fy) / denom
    a = f.array
    rx = a[:, 0] - f.first.x
    ry = a[:, 1] - f.first.y
    xs = target_l.x + rx * re - ry * im
    ys = target_l.y + rx * im + ry * re
    return Polyline.from_xy(xs, ys)


def shoelace_area(p: SimplePolygon) -> float:
    """Absolute enclosed area of a simple polygon (orientation independent)."""
    v = np.array([pt.as_tuple() for pt in p.vertices])
    return abs(_signed_area(v))


def _signed_area(v: np.ndarray) -> float:
    x, y = v[:, 0], v[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))


# ---------------------------------------------------------------------------
# Arrangement of the closed walk formed by two polylines sharing endpoints.
# ---------------------------------------------------------------------------

def _segment_intersections(p0, p1, q0, q1, tol: float):
    """Intersection points of two closed segments, as a list of (x, y).

    Proper crossings and endpoint touches give one point; collinear overlap
    gives the two endpoints of the shared interval.
    """
    p0 = np.asarray(p0, float)
    p1 = np.asarray(p1, float)
    q0 = np.asarray(q0, float)
    q1 = np.asarray(q1, float)
    d1 = p1 - p0
    d2 = q1 - q0
    denom = d1[0] * d2[1] - d1[1] * d2[0]
    r = q0 - p0
    len1 = math.hypot(*d1)
    len2 = math.hypot(*d2)
    if len1 == 0.0 or len2 == 0.0:
        return []
    cross_r1 = r[0] * d1[1] - r[1] * d1[0]
    if abs(denom) <= tol * len1 * len2:
        # Parallel.  Collinear iff q0 sits on the carrier line of p.
        if abs(cross_r1) > tol * len1:
            return []
        t0 = float(np.dot(r, d1)) / (len1 * len1)
        t1 = t0 + float(np.dot(d2, d1)) / (len1 * len1)
        lo, hi = min(t0, t1), max(t0, t1)
        lo = max(lo, 0.0)
        hi = min(hi, 1.0)
        if hi < lo - tol / len1:
            return []
        pts = [tuple(p0 + lo * d1)]
        if hi - lo > tol / len1:
            pts.append(tuple(p0 + hi * d1))
        return pts
    t = (r[0] * d2[1] - r[1] * d2[0]) / denom
    u = cross_r1 / denom
    slack_t = tol / len1
    slack_u = tol / len2
    if -slack_t <= t <= 1.0 + slack_t and -slack_u <= u <= 1.0 + slack_u:
        t = min(max(t, 0.0), 1.0)
        return [tuple(p0 + t * d1)]
    return []


class _VertexRegistry:
    """Snaps nearby points (within tol) to a single vertex id via a grid hash."""

    def __init__(self, tol: float):
        self.tol = tol
        self.cell = tol * 4.0
        self.points: list[tuple[float, float]] = []
        self._grid: dict[tuple[int, int], list[int]] = {}

    def add(self, x: float, y: float) -> int:
        cx, cy = int(math.floor(x / self.cell)), int(math.floor(y / self.cell))
        for gx in (cx - 1, cx, cx + 1):
            for gy in (cy - 1, cy, cy + 1):
                for idx in self._grid.get((gx, gy), ()):
                    px, py = self.points[idx]
                    if abs(px - x) <= self.tol and abs(py - y) <= self.tol:
                        return idx
        idx = len(self.points)
        self.points.append((x, y))
        self._grid.setdefault((cx, cy), []).append(idx)
        return idx


def _build_arrangement(walk_points: list[tuple[float, float]], tol: float):
    """Planar subdivision induced by the closed directed walk.

    Returns (vertex coordinates, undirected edges as (u, v) with u < v,
    net walk traversal count per edge oriented u->v).
    """
    reg = _VertexRegistry(tol)
    walk_ids = [reg.add(x, y) for x, y in walk_points]
    # Directed walk segments, dropping degenerate stalls after snapping.
    segs = []
    for a, b in zip(walk_ids, walk_ids[1:]):
        if a != b:
            segs.append((a, b))
    n_seg = len(segs)
    # Split points per segment: endpoints of other segments on it, pairwise
    # intersections, collinear overlap ends.  Brute force O(n^2) pairs.
    cuts: list[list[int]] = [[] for _ in range(n_seg)]
    pts = reg.points
    for i in range(n_seg):
        a0, a1 = segs[i]
        for j in range(i + 1, n_seg):
            b0, b1 = segs[j]
            # Touches at shared snapped endpoints fall out below: the hit
            # snaps onto the existing vertex and is never added as a cut.
            hits = _segment_intersections(pts[a0], pts[a1], pts[b0], pts[b1], tol)
            for (hx, hy) in hits:
                vid = reg.add(hx, hy)
                if vid not in (a0, a1):
                    cuts[i].append(vid)
                if vid not in (b0, b1):
                    cuts[j].append(vid)
    pts = reg.points  # may have grown
    edge_net: dict[tuple[int, int], int] = {}
    for i, (a, b) in enumerate(segs):
        ax, ay = pts[a]
        bx, by = pts[b]
        dx, dy = bx - ax, by - ay
        L2 = dx * dx + dy * dy
        order = sorted(
            set(cuts[i]),
            key=lambda vid: ((pts[vid][0] - ax) * dx + (pts[vid][1] - ay) * dy) / L2,
        )
        chain = [a] + [v for v in order if v != a and v != b] + [b]
        for u, v in zip(chain, chain[1:]):
            if u == v:
                continue
            key, sign = ((u, v), 1) if u < v else ((v, u), -1)
            edge_net[key] = edge_net.get(key, 0) + sign
    return pts, edge_net


def _walk_faces(pts, edges):
    """Face cycles of the subdivision, interiors kept to the left.

    ``edges``: list of undirected (u, v).  Returns list of faces, each a list
    of directed half-edges (u, v), plus the signed area of each face cycle.
    """
    out: dict[int, list[int]] = {}
    for u, v in edges:
        out.setdefault(u, []).append(v)
        out.setdefault(v, []).append(u)
    angle_order: dict[int, list[int]] = {}
    for u, nbrs in out.items():
        ux, uy = pts[u]
        nbrs = sorted(set(nbrs), key=lambda v: math.atan2(pts[v][1] - uy, pts[v][0] - ux))
        angle_order[u] = nbrs
    next_around = {}
    for u, nbrs in angle_order.items():
        k = len(nbrs)
        for i, v in enumerate(nbrs):
            # Successor of half-edge (v->u): rotate clockwise at u from v.
            next_around[(u, v)] = nbrs[(i - 1) % k]
    visited = set()
    faces = []
    areas = []
    for u, v in list(next_around):
        if (u, v) in visited:
            continue
        cycle = []
        a, b = u, v
        while (a, b) not in visited:
            visited.add((a, b))
            cycle.append((a, b))
            a, b = b, next_around[(b, a)]
        coords = np.array([pts[x] for x, _ in cycle])
        faces.append(cycle)
        areas.append(_signed_area(coords))
    return faces, areas


def partition_between(f_tilde: Polyline, g_tilde: Polyline) -> list[SimplePolygon]:
    """Partition of the region enclosed between two polylines sharing endpoints.

    The union of the two polylines bounds a closed (possibly self-crossing)
    walk; the walk's arrangement is split into faces and every bounded face
    with nonzero winding is returned once per winding unit.  Identical or
    collinear-overlapping stretches cancel and contribute nothing.
    """
    tol = EPS_GEOM
    if (abs(f_tilde.first.x - g_tilde.first.x) > tol or abs(f_tilde.first.y - g_tilde.first.y) > tol
            or abs(f_tilde.last.x - g_tilde.last.x) > tol or abs(f_tilde.last.y - g_tilde.last.y) > tol):
        raise ContractViolation("polylines must share both endpoints")
    walk = [p.as_tuple() for p in f_tilde.points]
    walk += [p.as_tuple() for p in reversed(g_tilde.points)]
    walk.append(f_tilde.first.as_tuple())
    pts, edge_net = _build_arrangement(walk, tol)
    edges = [e for e in edge_net]
    if not edges:
        return []
    faces, areas = _walk_faces(pts, edges)
    # Outer (unbounded) face is the unique cycle with negative signed area.
    outer = min(range(len(faces)), key=lambda i: areas[i])
    # Face lookup: which face has directed half-edge (u, v) on its boundary.
    face_of = {}
    for fi, cycle in enumerate(faces):
        for he in cycle:
            face_of[he] = fi
    # Winding difference across an edge equals its net walk traversal count:
    # crossing edge (u->v) from its right side to its left adds net(u, v).
    winding = [None] * len(faces)
    winding[outer] = 0
    stack = [outer]
    while stack:
        fi = stack.pop()
        for (u, v) in faces[fi]:
            # Face fi has (u, v) on its boundary with interior to the left.
            nb = face_of.get((v, u))
            if nb is None or winding[nb] is not None:
                continue
            net = edge_net.get((u, v) if u < v else (v, u), 0)
            if u > v:
                net = -net
            # fi is left of (u,v); neighbor is right: w_right = w_left - net.
            winding[nb] = winding[fi] - net
            stack.append(nb)
    polys = []
    for fi, cycle in enumerate(faces):
        if fi == outer or not winding[fi]:
            continue
        verts = [Point2(*pts[u]) for u, _ in cycle]
        if len(verts) < 3 or abs(areas[fi]) <= tol * tol:
            continue
        for _ in range(abs(winding[fi])):
            polys.append(SimplePolygon(tuple(verts)))
    return polys


def area_between(f_tilde: Polyline, g_tilde: Polyline) -> float:
    """Total area enclosed between two polylines sharing both endpoints."""
    return float(sum(shoelace_area(p) for p in partition_between(f_tilde, g_tilde)))
