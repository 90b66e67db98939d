"""Vectorized numerics behind the cost oracle and the exact solver.

Sub-curves are reduced to a canonical frame: first point at the origin, chord
along +x, chord length 1.  The area between a deformed piece and an ideal
span then equals ``chord(span)^2`` times the area between the two canonical
shapes, so a single unit-frame kernel serves every quadruple.

Two area evaluators are provided:

* ``batch_area_monotone`` -- both shapes are graphs of functions over [0, 1]
  (strictly increasing canonical x).  Exact integral of the absolute
  difference over the merged grid, vectorized across many pairs at once.
* ``slab_area_pair`` -- general fallback for shapes that fold back in x.
  Decomposes the closed walk into vertical slabs bounded by vertex and
  crossing abscissae; inside a slab the active segments are crossing-free
  lines, so winding numbers sort by height and the |winding|-weighted area
  is exact.

``bucket_areas`` feeds a cheap lower bound: the signed area of a shape inside
each of ``N_BUCKETS`` vertical strips of [0, 1].  For any two shapes the sum
of per-strip |differences| never exceeds the true area between them.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

try:
    from numba import njit

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a hard dependency in practice
    _HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(fn):
            return fn

        return wrap

N_BUCKETS = 16


class CanonicalShapes(NamedTuple):
    """Canonical (unit-chord) forms of all windows of one width.

    xs, ys     -- (cnt, width+1) canonical coordinates
    chord      -- (cnt,) original chord lengths
    monotone   -- (cnt,) True where canonical x strictly increases
    buckets    -- (cnt, N_BUCKETS) signed area per vertical strip of [0, 1]
    ang_lo/hi  -- (cnt,) extreme segment directions (radians, chord frame);
                  a pair of shapes whose combined direction range fits an
                  open half-circle can be rotated into a common graph frame
    """

    xs: np.ndarray
    ys: np.ndarray
    chord: np.ndarray
    monotone: np.ndarray
    buckets: np.ndarray
    ang_lo: np.ndarray
    ang_hi: np.ndarray


def canonical_windows(pts: np.ndarray, width: int) -> CanonicalShapes:
    """Canonical forms of every contiguous window of ``width`` edges."""
    n = pts.shape[0]
    cnt = n - width
    if cnt <= 0:
        raise ValueError(f"window width {width} too large for {n} points")
    win = np.lib.stride_tricks.sliding_window_view(pts, width + 1, axis=0)
    win = win.transpose(0, 2, 1)  # (cnt, width+1, 2)
    rel = win - win[:, :1, :]
    cvx = rel[:, -1, 0]
    cvy = rel[:, -1, 1]
    chord = np.hypot(cvx, cvy)
    safe = np.where(chord > 0.0, chord, 1.0)
    c = cvx / safe
    s = cvy / safe
    xs = (rel[:, :, 0] * c[:, None] + rel[:, :, 1] * s[:, None]) / safe[:, None]
    ys = (-rel[:, :, 0] * s[:, None] + rel[:, :, 1] * c[:, None]) / safe[:, None]
    dx = np.diff(xs, axis=1)
    dy = np.diff(ys, axis=1)
    monotone = np.all(dx > 0.0, axis=1)
    ang = np.arctan2(dy, dx)
    buckets = bucket_areas(xs, ys)
    return CanonicalShapes(xs, ys, chord, monotone, buckets, ang.min(axis=1), ang.max(axis=1))


def canonical_one(pts: np.ndarray) -> CanonicalShapes:
    """Canonical form of a single sub-curve given as an (m, 2) array."""
    return canonical_windows(pts, pts.shape[0] - 1)


def _strip_integrals(us: np.ndarray, vs: np.ndarray, edges: np.ndarray) -> np.ndarray:
    """Signed integral of v du restricted to strips of u between ``edges``.

    Per segment and strip: clip the segment's u-interval to the strip and
    integrate the (linear) v over it with the traversal sign; the midpoint
    rule is exact for lines.  Strip sums are exact for folded shapes too.
    """
    u0, u1 = us[..., :-1], us[..., 1:]
    v0, v1 = vs[..., :-1], vs[..., 1:]
    du = u1 - u0
    sign = np.sign(du)
    ul = np.minimum(u0, u1)
    ur = np.maximum(u0, u1)
    lo = np.maximum(ul[..., None], edges[:-1])
    hi = np.minimum(ur[..., None], edges[1:])
    width = np.clip(hi - lo, 0.0, None)
    with np.errstate(divide="ignore", invalid="ignore"):
        slope = np.where(du != 0.0, (v1 - v0) / np.where(du == 0.0, 1.0, du), 0.0)
    mid = 0.5 * (lo + hi)
    vmid = v0[..., None] + (mid - u0[..., None]) * slope[..., None]
    contrib = sign[..., None] * vmid * width
    return contrib.sum(axis=-2)


# Horizontal strips for the transposed bound; outer strips open-ended.
_Y_EDGES = np.concatenate([[-np.inf], np.linspace(-0.75, 0.75, N_BUCKETS - 1), [np.inf]])


def bucket_areas(xs: np.ndarray, ys: np.ndarray, n_buckets: int = N_BUCKETS) -> np.ndarray:
    """Per-shape strip integrals feeding the area lower bound.

    Columns 0..n_buckets-1: signed integral of y dx inside vertical strips
    of [0, 1].  Columns n_buckets..: signed integral of x dy inside
    horizontal strips.  For any two shapes sharing endpoints, each family's
    summed |difference| is a lower bound on the enclosed area (the winding
    integral over a strip equals the difference of the strip integrals), so
    the bound may take the larger of the two.
    """
    edges = np.linspace(0.0, 1.0, n_buckets + 1)
    vert = _strip_integrals(xs, ys, edges)
    horiz = _strip_integrals(ys, xs, _Y_EDGES)
    return np.concatenate([vert, horiz], axis=-1)


def _interp_on_merge(grid, order, first_count, xs, ys, is_first):
    """Evaluate one curve of a merged pair at every merged-grid position.

    ``order`` is the argsort of the concatenated abscissae; counting how many
    of the curve's own points precede each merged position gives its segment
    index directly, so no searchsorted is needed.  Gathers go through flat
    indices, which is markedly cheaper than take_along_axis.
    """
    b, m = xs.shape
    own = order < first_count if is_first else order >= first_count
    rank = np.cumsum(own, axis=1)
    idx = np.clip(rank - 1, 0, m - 2)
    idx += (np.arange(b) * m)[:, None]
    flat_x = xs.ravel()
    flat_y = ys.ravel()
    x0 = flat_x[idx]
    x1 = flat_x[idx + 1]
    y0 = flat_y[idx]
    y1 = flat_y[idx + 1]
    return y0 + (grid - x0) * (y1 - y0) / (x1 - x0)


@njit(cache=True)
def _area_pairs_merge(ax, ay, bx, by):  # pragma: no cover - exercised via wrapper
    n_pairs, m1 = ax.shape
    m2 = bx.shape[1]
    out = np.empty(n_pairs)
    for t in range(n_pairs):
        sa = 0
        sb = 0
        ia = 1
        ib = 1
        x_prev = ax[t, 0]
        d_prev = ay[t, 0] - by[t, 0]
        acc = 0.0
        while ia < m1 or ib < m2:
            if ib >= m2 or (ia < m1 and ax[t, ia] <= bx[t, ib]):
                x = ax[t, ia]
                ia += 1
            else:
                x = bx[t, ib]
                ib += 1
            while sa < m1 - 2 and ax[t, sa + 1] < x:
                sa += 1
            while sb < m2 - 2 and bx[t, sb + 1] < x:
                sb += 1
            ya = ay[t, sa] + (x - ax[t, sa]) * (ay[t, sa + 1] - ay[t, sa]) / (ax[t, sa + 1] - ax[t, sa])
            yb = by[t, sb] + (x - bx[t, sb]) * (by[t, sb + 1] - by[t, sb]) / (bx[t, sb + 1] - bx[t, sb])
            d = ya - yb
            h = x - x_prev
            if h > 0.0:
                if d_prev * d >= 0.0:
                    acc += 0.5 * (abs(d_prev) + abs(d)) * h
                else:
                    acc += 0.5 * (d_prev * d_prev + d * d) / (abs(d_prev) + abs(d)) * h
            x_prev = x
            d_prev = d
        out[t] = acc
    return out


def _batch_area_monotone_np(ax, ay, bx, by):
    """Pure-numpy merged-grid integration; reference path and numba fallback."""
    m1 = ax.shape[1]
    cat = np.concatenate([ax, bx], axis=1)
    order = np.argsort(cat, axis=1)
    grid = np.take_along_axis(cat, order, axis=1)
    fa = _interp_on_merge(grid, order, m1, ax, ay, True)
    fb = _interp_on_merge(grid, order, m1, bx, by, False)
    d = fa - fb
    d0 = d[:, :-1]
    d1 = d[:, 1:]
    h = np.diff(grid, axis=1)
    same = d0 * d1 >= 0.0
    straight = 0.5 * (np.abs(d0) + np.abs(d1)) * h
    denom = np.abs(d0) + np.abs(d1)
    denom = np.where(denom == 0.0, 1.0, denom)
    crossed = 0.5 * (d0 * d0 + d1 * d1) / denom * h
    return np.where(same, straight, crossed).sum(axis=1)


def batch_area_monotone(ax: np.ndarray, ay: np.ndarray, bx: np.ndarray, by: np.ndarray) -> np.ndarray:
    """Exact unit-frame area between pairs of x-monotone canonical shapes.

    All rows share endpoints and span a common x-interval.  Returns (B,)
    areas: the integral of |difference|, crossing points handled exactly.
    """
    if _HAVE_NUMBA:
        return _area_pairs_merge(
            np.ascontiguousarray(ax), np.ascontiguousarray(ay),
            np.ascontiguousarray(bx), np.ascontiguousarray(by))
    return _batch_area_monotone_np(ax, ay, bx, by)


@njit(cache=True)
def _slab_area_walk(px, py):  # pragma: no cover - exercised via wrapper
    """|winding|-weighted area of one closed walk via vertical slabs."""
    n_seg = px.shape[0] - 1
    # Event abscissae: endpoints plus proper pairwise crossings.
    events = np.empty(2 * n_seg + n_seg * (n_seg - 1) // 2 + 4)
    ne = 0
    for i in range(n_seg):
        events[ne] = px[i]
        events[ne + 1] = px[i + 1]
        ne += 2
    eps = 1e-12
    for i in range(n_seg):
        d1x = px[i + 1] - px[i]
        d1y = py[i + 1] - py[i]
        for j in range(i + 1, n_seg):
            d2x = px[j + 1] - px[j]
            d2y = py[j + 1] - py[j]
            denom = d1x * d2y - d1y * d2x
            if abs(denom) <= eps:
                continue
            rx = px[j] - px[i]
            ry = py[j] - py[i]
            t = (rx * d2y - ry * d2x) / denom
            u = (rx * d1y - ry * d1x) / denom
            if eps < t < 1.0 - eps and eps < u < 1.0 - eps:
                events[ne] = px[i] + t * d1x
                ne += 1
    ev = np.sort(events[:ne])
    acc = 0.0
    ym = np.empty(n_seg)
    sg = np.empty(n_seg)
    for s in range(ev.shape[0] - 1):
        xa = ev[s]
        xb = ev[s + 1]
        wd = xb - xa
        if wd <= 1e-15:
            continue
        xm = 0.5 * (xa + xb)
        cnt = 0
        for i in range(n_seg):
            x0 = px[i]
            x1 = px[i + 1]
            if x0 == x1:
                continue
            lo, hi = (x0, x1) if x0 < x1 else (x1, x0)
            if lo <= xa + 1e-15 and hi >= xb - 1e-15:
                ym[cnt] = py[i] + (xm - x0) * (py[i + 1] - py[i]) / (x1 - x0)
                sg[cnt] = 1.0 if x1 > x0 else -1.0
                cnt += 1
        if cnt < 2:
            continue
        order = np.argsort(ym[:cnt])
        w = 0.0
        for t in range(cnt - 1):
            w += sg[order[t]]
            if w != 0.0:
                acc += abs(w) * (ym[order[t + 1]] - ym[order[t]]) * wd
    return acc


def slab_area_pair(a_pts: np.ndarray, b_pts: np.ndarray) -> float:
    """|winding|-weighted area enclosed by walking curve A forward and B back.

    Works for arbitrary canonical shapes (self-crossings included); agrees
    with the polygon-partition path and with the monotone integral where
    those apply.
    """
    walk = np.concatenate([a_pts, b_pts[::-1]], axis=0)
    keep = np.concatenate([[True], np.any(walk[1:] != walk[:-1], axis=1)])
    walk = walk[keep]
    if walk.shape[0] < 3:
        return 0.0
    return float(_slab_area_walk(np.ascontiguousarray(walk[:, 0]), np.ascontiguousarray(walk[:, 1])))


@njit(cache=True)
def _bound_pairs_nb(pbkt, pch, ii, sbkt, sch, ll, alpha, n_vert):  # pragma: no cover
    B = ii.shape[0]
    nb2 = pbkt.shape[1]
    out = np.empty(B)
    for t in range(B):
        cf = pch[ii[t]]
        cq = sch[ll[t]]
        if cq < (1.0 - alpha) * cf or cq > (1.0 + alpha) * cf:
            out[t] = np.inf
            continue
        sv = 0.0
        for b in range(n_vert):
            sv += abs(pbkt[ii[t], b] - sbkt[ll[t], b])
        sh = 0.0
        for b in range(n_vert, nb2):
            sh += abs(pbkt[ii[t], b] - sbkt[ll[t], b])
        g = sv if sv > sh else sh
        out[t] = cq * cq * g
    return out


def bound_pairs(pbkt, pch, ii, sbkt, sch, ll, alpha) -> np.ndarray:
    """Gate-aware lower bounds on the scaled area for shape pairs.

    Takes the stronger of the vertical-strip and horizontal-strip families;
    infinite where the chord gate rejects the pair.
    """
    if _HAVE_NUMBA:
        return _bound_pairs_nb(pbkt, pch, ii, sbkt, sch, ll, alpha, N_BUCKETS)
    cf = pch[ii]
    cq = sch[ll]
    ok = ((1.0 - alpha) * cf <= cq) & (cq <= (1.0 + alpha) * cf)
    diff = np.abs(pbkt[ii] - sbkt[ll])
    gap = np.maximum(diff[:, :N_BUCKETS].sum(axis=1), diff[:, N_BUCKETS:].sum(axis=1))
    return np.where(ok, cq * cq * gap, np.inf)


@njit(cache=True)
def _screen_block_nb(si, sl, sv, wf, wqs, cf, ptot, chord_q, tot_q, final_ok,
                     nxt, alpha, ubt, deep, r_max, out_s, out_w, out_est):  # pragma: no cover
    """Candidate transitions for one piece width, all screens fused.

    Emits (source index, width index, screened lower bound) triples for
    pairs passing the chord gate, the whole-shape bound against the budget,
    the one-piece-closure band, and the incumbent at the target cell.
    """
    cnt = 0
    n_src = si.shape[0]
    n_w = wqs.shape[0]
    for s in range(n_src):
        l = sl[s]
        base = sv[s]
        lo = (1.0 - alpha) * cf[s]
        hi = (1.0 + alpha) * cf[s]
        tj = si[s] + wf
        for w in range(n_w):
            r = l + wqs[w]
            if r > r_max:
                break
            cq = chord_q[l, r]
            if cq < lo or cq > hi:
                continue
            gap = ptot[s] - tot_q[l, r]
            if gap < 0.0:
                gap = -gap
            est = base + cq * cq * gap
            if est > ubt:
                continue
            if est > deep and not final_ok[tj, r]:
                continue
            if est > nxt[tj, r]:
                continue
            out_s[cnt] = s
            out_w[cnt] = w
            out_est[cnt] = est
            cnt += 1
    return cnt


def _rotate_rows(xs, ys, cos_t, sin_t):
    rx = xs * cos_t[:, None] - ys * sin_t[:, None]
    ry = xs * sin_t[:, None] + ys * cos_t[:, None]
    return rx, ry


def unit_area_pairs(a: CanonicalShapes, ia: np.ndarray, b: CanonicalShapes, ib: np.ndarray) -> np.ndarray:
    """Unit-frame areas between shape pairs (a[ia[t]], b[ib[t]]).

    Three routes, cheapest first: already graphs in the chord frame; graphs
    after a common per-pair rotation (possible whenever the combined segment
    direction range stays inside an open half-circle); otherwise the exact
    slab walk, pair by pair.
    """
    out = np.empty(ia.shape[0], dtype=float)
    both = a.monotone[ia] & b.monotone[ib]
    if np.any(both):
        sa, sb = ia[both], ib[both]
        out[both] = batch_area_monotone(a.xs[sa], a.ys[sa], b.xs[sb], b.ys[sb])
    rest = ~both
    if not np.any(rest):
        return out
    lo = np.minimum(a.ang_lo[ia], b.ang_lo[ib])
    hi = np.maximum(a.ang_hi[ia], b.ang_hi[ib])
    spin = rest & (hi - lo < np.pi - 1e-9)
    if np.any(spin):
        sa, sb = ia[spin], ib[spin]
        phi = -0.5 * (lo[spin] + hi[spin])
        c, s = np.cos(phi), np.sin(phi)
        pax, pay = _rotate_rows(a.xs[sa], a.ys[sa], c, s)
        pbx, pby = _rotate_rows(b.xs[sb], b.ys[sb], c, s)
        out[spin] = batch_area_monotone(pax, pay, pbx, pby)
    for t in np.nonzero(rest & ~spin)[0]:
        out[t] = slab_area_pair(
            np.column_stack([a.xs[ia[t]], a.ys[ia[t]]]),
            np.column_stack([b.xs[ib[t]], b.ys[ib[t]]]),
        )
    return out
