"""Match gate, curve dissimilarity, and the memoized cost oracle.

The dissimilarity between a deformed piece f and an ideal span g:

* gate: the endpoint chord ratio ||Lg-Rg|| / ||Lf-Rf|| must lie within
  [1-alpha, 1+alpha], else the value is infinite;
* otherwise g is rotated about its left endpoint until horizontal, f is
  mapped onto the resulting chord by an orientation-preserving similarity,
  and the value is the area enclosed between the two curves.

``dissimilarity`` follows that recipe literally through the geometry module.
``CostOracle`` computes the same value in a canonical unit-chord frame
(area scales with chord^2), memoizes by index quadruple, and never touches
geometry when the gate fails.  The measure is directional: f is always the
scaled curve, g the rotated one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import GeometryError
from .geometry import (
    FunctionCurve,
    Polyline,
    align_endpoints,
    area_between,
    chord_length,
    rotate_to_horizontal,
)

INFINITY = math.inf


@dataclass(frozen=True)
class MatchConfig:
    """Chord-ratio tolerance for the match gate; alpha=1 disables the lower cut."""

    alpha: float = 0.3

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must be in [0, 1], got {self.alpha}")


def matches(f: Polyline, g: Polyline, cfg: MatchConfig) -> bool:
    """True iff the endpoint chord ratio of (g over f) lies in [1-a, 1+a]."""
    cf = chord_length(f)
    if cf <= 0.0:
        raise GeometryError("match gate undefined for zero-chord curve")
    ratio = chord_length(g) / cf
    return 1.0 - cfg.alpha <= ratio <= 1.0 + cfg.alpha


def dissimilarity(f: Polyline, g: Polyline, cfg: MatchConfig | None = None) -> float:
    """Area-based dissimilarity d(f, g); INFINITY when the gate rejects."""
    cfg = cfg or MatchConfig()
    if not matches(f, g, cfg):
        return INFINITY
    g_t = rotate_to_horizontal(g)
    f_t = align_endpoints(f, g_t.first, g_t.last)
    return area_between(f_t, g_t)


class CostOracle:
    """Lazy memoized evaluator of piece-onto-span costs with gate pruning.

    ``query(i, j, l, r)`` returns the dissimilarity between the deformed
    sub-curve P[i..j] and the ideal sub-curve Q[min(l,r)..max(l,r)].  Chord
    lengths for every sub-curve are precomputed, so a failing gate costs O(1)
    and counts in ``gate_skips`` instead of ``evaluations``.

    Thread-safety: all mutable state is write-once-per-key (memo entries and
    lazily built per-width canonical tables); racing writers store identical
    values, so concurrent queries are benign.
    """

    def __init__(self, deformed: FunctionCurve, ideal: FunctionCurve, config: MatchConfig | None = None):
        self.deformed = deformed
        self.ideal = ideal
        self.config = config or MatchConfig()
        self._p = np.asarray(deformed.array, dtype=float)
        self._q = np.asarray(ideal.array, dtype=float)
        px, py = self._p[:, 0], self._p[:, 1]
        qx, qy = self._q[:, 0], self._q[:, 1]
        self.chord_p = np.hypot(px[None, :] - px[:, None], py[None, :] - py[:, None])
        self.chord_q = np.hypot(qx[None, :] - qx[:, None], qy[None, :] - qy[:, None])
        self.tot_p = self._tot_table(self._p, self.chord_p)
        self.tot_q = self._tot_table(self._q, self.chord_q)
        self._piece_cache: dict[int, tuple] = {}
        self._span_cache: dict[int, tuple] = {}
        self._memo: dict[tuple[int, int, int, int], float] = {}
        self._batch_memo: dict[tuple[int, int], list] = {}
        self.evaluations = 0
        self.gate_skips = 0

    @staticmethod
    def _tot_table(pts: np.ndarray, chord: np.ndarray) -> np.ndarray:
        """Unit-frame net signed area of every sub-curve, O(1) per pair.

        tot[a, b] is the signed area between sub-curve [a..b] and its chord,
        divided by chord^2 -- a similarity invariant, so it equals the total
        signed area of the canonical shape.  |tot_f - tot_g| lower-bounds the
        unit area between any two canonical shapes.
        """
        x, y = pts[:, 0], pts[:, 1]
        cr = x[:-1] * y[1:] - y[:-1] * x[1:]
        pref = np.concatenate([[0.0], np.cumsum(cr)])
        # loop[a, b]: shoelace of P[a..b] closed by the chord edge (P_b, P_a).
        loop = 0.5 * (pref[None, :] - pref[:, None] + np.outer(y, x) - np.outer(x, y))
        c2 = chord * chord
        with np.errstate(divide="ignore", invalid="ignore"):
            tot = np.where(c2 > 0.0, -loop / np.where(c2 == 0.0, 1.0, c2), 0.0)
        return tot

    @property
    def n_p(self) -> int:
        return self._p.shape[0]

    @property
    def n_q(self) -> int:
        return self._q.shape[0]

    def piece_data(self, width: int) -> kernels.CanonicalShapes:
        data = self._piece_cache.get(width)
        if data is None:
            data = kernels.canonical_windows(self._p, width)
            self._piece_cache[width] = data
        return data

    def span_data(self, width: int) -> kernels.CanonicalShapes:
        data = self._span_cache.get(width)
        if data is None:
            data = kernels.canonical_windows(self._q, width)
            self._span_cache[width] = data
        return data

    def gate_ok(self, cf: float, cq: float) -> bool:
        a = self.config.alpha
        return (1.0 - a) * cf <= cq <= (1.0 + a) * cf

    def query(self, i: int, j: int, l: int, r: int) -> float:
        if not (0 <= i < j < self.n_p):
            raise IndexError(f"piece indices out of range: ({i}, {j}) with |P|={self.n_p}")
        lo, hi = (l, r) if l < r else (r, l)
        if l == r or not (0 <= lo and hi < self.n_q):
            raise IndexError(f"span indices out of range: ({l}, {r}) with |Q|={self.n_q}")
        key = (i, j, lo, hi)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        cq = self.chord_q[lo, hi]
        if not self.gate_ok(self.chord_p[i, j], cq):
            self.gate_skips += 1
            self._memo[key] = INFINITY
            return INFINITY
        pieces = self.piece_data(j - i)
        spans = self.span_data(hi - lo)
        unit = kernels.unit_area_pairs(
            pieces, np.array([i]), spans, np.array([lo]))[0]
        self.evaluations += 1
        value = cq * cq * float(unit)
        self._memo[key] = value
        return value

    def cost_batch(self, i_arr: np.ndarray, wf: int, l_arr: np.ndarray, wq: int) -> np.ndarray:
        """Costs for pieces (i, i+wf) onto spans (l, l+wq); inf where gated.

        Values computed once per quadruple: repeat requests across solver
        layers are served from per-width-pair cache blocks.
        """
        pieces = self.piece_data(wf)
        spans = self.span_data(wq)
        cf = pieces.chord[i_arr]
        cq = spans.chord[l_arr]
        a = self.config.alpha
        ok = ((1.0 - a) * cf <= cq) & (cq <= (1.0 + a) * cf)
        out = np.full(i_arr.shape[0], INFINITY)
        self.gate_skips += int((~ok).sum())
        if not np.any(ok):
            return out
        sel = np.nonzero(ok)[0]
        keys = i_arr[sel].astype(np.int64) * self.n_q + l_arr[sel]
        blocks = self._batch_memo.setdefault((wf, wq), [])
        vals = np.full(sel.shape[0], np.nan)
        for bkeys, bvals in blocks:
            pos = np.searchsorted(bkeys, keys)
            pos = np.minimum(pos, bkeys.size - 1)
            hit = bkeys[pos] == keys
            vals[hit] = bvals[pos[hit]]
        miss = np.isnan(vals)
        if np.any(miss):
            ii = i_arr[sel[miss]]
            ll = l_arr[sel[miss]]
            unit = kernels.unit_area_pairs(pieces, ii, spans, ll)
            fresh = spans.chord[ll] ** 2 * unit
            vals[miss] = fresh
            self.evaluations += int(miss.sum())
            mk = keys[miss]
            order = np.argsort(mk)
            blocks.append((mk[order], fresh[order]))
            if len(blocks) > 4:
                allk = np.concatenate([b[0] for b in blocks])
                allv = np.concatenate([b[1] for b in blocks])
                order = np.argsort(allk)
                blocks[:] = [(allk[order], allv[order])]
        out[sel] = vals
        return out

    def bound_batch(self, i_arr: np.ndarray, wf: int, l_arr: np.ndarray, wq: int) -> np.ndarray:
        """Lower bounds on cost_batch values (inf where the gate fails)."""
        pieces = self.piece_data(wf)
        spans = self.span_data(wq)
        return kernels.bound_pairs(
            pieces.buckets, pieces.chord, i_arr,
            spans.buckets, spans.chord, l_arr, self.config.alpha)
