"""Exact solver for cut placement without rearrangement.

A plan makes exactly k cuts at interior points of the deformed discretization
P, splitting it into k+1 pieces, and clamps piece i onto ideal positions
(l_i, r_i) with l_i < r_i and r_{i-1} = l_i.  The objective is the summed
piece dissimilarity plus ``delta`` per ideal interval left outside
[l_0, r_k].  ``delta=inf`` is accepted and forces full coverage.

``solve_exact_k`` runs a forward dynamic program over prefix states
(pieces placed, last cut index, last clamp index); the head penalty
``delta*l_0`` is folded into the root layer and the tail penalty is added
when the final piece closes the plan, so one pass covers every endpoint
choice.  Transitions are evaluated in vectorized width-batched blocks and
pruned against running upper bounds from heuristic plans, which keeps the
200-point instances tractable; pruning never drops a transition that could
still beat the best known plan, so the optimum is exact.

``solve_constrained`` is the direct recursive form of the same recurrence on
a fixed window (value plus backpointers) and ``brute_force`` is a tiny-scale
exhaustive oracle; both exist to cross-check the fast path.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import NamedTuple

import numpy as np

from . import kernels
from .dissimilarity import INFINITY, CostOracle, MatchConfig
from .errors import InfeasibleParamsError, InvalidInstanceError, SizeGuardError
from .geometry import FunctionCurve, Point2, Polyline, align_endpoints


class Mode(Enum):
    NO_REARRANGEMENT = "no_rearrangement"
    REARRANGEMENT = "rearrangement"


@dataclass(frozen=True)
class RefitInstance:
    deformed: FunctionCurve
    ideal: FunctionCurve
    k: int
    delta: float = 0.0
    match: MatchConfig = field(default_factory=MatchConfig)
    mode: Mode = Mode.NO_REARRANGEMENT

    def __post_init__(self):
        n = len(self.deformed)
        if self.k < 0 or self.k > n - 2:
            raise InvalidInstanceError(f"k={self.k} outside [0, |P|-2] = [0, {n - 2}]")
        if math.isnan(self.delta) or self.delta < 0.0:
            raise InvalidInstanceError(f"delta must be >= 0, got {self.delta}")


@dataclass(frozen=True)
class RefitPlan:
    """Cuts, per-piece clamp spans and costs, and the canonical objective."""

    cuts: tuple[int, ...]
    clamps: tuple[tuple[int, int], ...]
    piece_costs: tuple[float, ...]
    uncovered: int
    objective: float
    feasible: bool = True

    @classmethod
    def infeasible(cls) -> "RefitPlan":
        return cls((), (), (), 0, INFINITY, False)

    def validate_against(self, inst: RefitInstance, oracle: CostOracle | None = None) -> None:
        """Recompute everything from (cuts, clamps) and assert self-consistency."""
        if not self.feasible:
            return
        n, m = len(inst.deformed), len(inst.ideal)
        bounds = (0,) + self.cuts + (n - 1,)
        assert all(0 < c < n - 1 for c in self.cuts), "cuts must be interior"
        assert all(a < b for a, b in zip(bounds, bounds[1:])), "cuts must increase"
        assert len(self.clamps) == inst.k + 1
        for (l, r) in self.clamps:
            assert l < r, "clamp spans must be forward and non-degenerate"
        for (pl, pr), (l, _) in zip(self.clamps, self.clamps[1:]):
            assert pr == l, "consecutive pieces must share a clamp point"
        oracle = oracle or CostOracle(inst.deformed, inst.ideal, inst.match)
        costs = [oracle.query(a, b, l, r) for (a, b), (l, r) in zip(zip(bounds, bounds[1:]), self.clamps)]
        uncov = count_uncovered(inst.ideal, self.clamps[0][0], self.clamps[-1][1])
        assert uncov == self.uncovered
        expect = _objective(costs, inst.delta, uncov)
        assert expect == self.objective or math.isclose(expect, self.objective, rel_tol=1e-9), \
            f"objective mismatch: stored {self.objective}, recomputed {expect}"


class DPState(NamedTuple):
    """Memo key of the windowed recurrence: suffix start, clamp start, fixed
    right clamp end, cuts still to place."""

    p_idx: int
    q_idx: int
    e_idx: int
    cuts_left: int


def count_uncovered(ideal: FunctionCurve, l0: int, rk: int) -> int:
    """Ideal intervals strictly before l0 plus strictly after rk."""
    m = len(ideal)
    if not (0 <= l0 <= rk <= m - 1):
        raise InvalidInstanceError(f"bad coverage indices ({l0}, {rk}) for |Q|={m}")
    return l0 + (m - 1 - rk)


def _objective(piece_costs, delta: float, uncovered: int) -> float:
    penalty = 0.0 if uncovered == 0 else delta * uncovered
    return float(sum(piece_costs) + penalty)


def _cap(bound: float) -> float:
    """Pruning threshold with relative headroom.

    Lower bounds and upper bounds travel different float paths, so exact
    ties can land an ulp apart; the slack only admits extra candidates and
    never costs exactness.
    """
    if not math.isfinite(bound):
        return bound
    return bound + 1e-9 * max(1.0, abs(bound))


@dataclass
class ConstrainedSolution:
    value: float
    cuts: tuple[int, ...]
    clamps: tuple[tuple[int, int], ...]


def solve_constrained(oracle: CostOracle, a: int, b: int, d: int, e: int, k_prime: int) -> ConstrainedSolution:
    """Optimal full-coverage placement of exactly ``k_prime`` cuts mapping
    P[a..b] onto Q[d..e], by the windowed recurrence with memoized states.

    Value is INFINITY when every assignment fails the match gate.  Ties break
    toward the lexicographically smallest (cut, clamp) transition.
    """
    if b - a < k_prime + 1 or e - d < k_prime + 1:
        raise InfeasibleParamsError(
            f"window P[{a}..{b}] x Q[{d}..{e}] cannot host {k_prime} cuts")
    if k_prime < 0:
        raise InfeasibleParamsError("negative cut count")
    memo: dict[DPState, tuple[float, tuple[int, int] | None]] = {}

    def rec(p: int, q: int, left: int) -> float:
        if left == 0:
            return oracle.query(p, b, q, e)
        key = DPState(p, q, e, left)
        got = memo.get(key)
        if got is not None:
            return got[0]
        best, arg = INFINITY, None
        for pp in range(p + 1, b - left + 1):
            for qq in range(q + 1, e - left + 1):
                head = oracle.query(p, pp, q, qq)
                if head == INFINITY:
                    continue
                tot = head + rec(pp, qq, left - 1)
                if tot < best:
                    best, arg = tot, (pp, qq)
        memo[key] = (best, arg)
        return best

    value = rec(a, d, k_prime)
    cuts, clamps = [], []
    if value < INFINITY:
        p, q, left = a, d, k_prime
        while left > 0:
            _, arg = memo[DPState(p, q, e, left)]
            pp, qq = arg
            cuts.append(pp)
            clamps.append((q, qq))
            p, q, left = pp, qq, left - 1
        clamps.append((q, e))
    return ConstrainedSolution(value, tuple(cuts), tuple(clamps))


# ---------------------------------------------------------------------------
# Vectorized prefix DP engine.
# ---------------------------------------------------------------------------

class _Engine:
    """Shared-layer forward DP over (pieces placed, cut index, clamp index).

    layers[m][i, l] is the best value of m placed pieces where piece m ends
    with a cut at P index i clamped at Q index l, head penalty included.
    layers[0] is the virtual root: only row 0, value = head penalty at l.
    Backpointers pack the predecessor (i*M + l) for plan reconstruction.
    """

    def __init__(self, inst: RefitInstance, k_max: int, prune: bool = True):
        if inst.mode is not Mode.NO_REARRANGEMENT:
            raise InvalidInstanceError("exact solver handles the no-rearrangement variant only")
        n = len(inst.deformed)
        if k_max < 0 or k_max > n - 2:
            raise InvalidInstanceError(f"k_max={k_max} outside [0, |P|-2]")
        self.inst = inst
        self.k_max = k_max
        self.prune = prune
        self.oracle = CostOracle(inst.deformed, inst.ideal, inst.match)
        self.n = n
        self.m = len(inst.ideal)
        self.alpha = inst.match.alpha
        # Chord range per span width, for screening width combinations.
        cq = self.oracle.chord_q
        self.cq_min_w = np.array([np.diagonal(cq, offset=w).min() for w in range(1, self.m)])
        self.cq_max_w = np.array([np.diagonal(cq, offset=w).max() for w in range(1, self.m)])
        self.layers: list[np.ndarray] = []
        self.backptr: list[np.ndarray] = []
        self.answers: dict[int, float] = {}
        self.finals: dict[int, tuple[int, int, int]] = {}
        self.plans: dict[int, RefitPlan] = {}
        self.ub: dict[int, float] = {}
        # Arc-length prefixes feed the full-coverage reachability prune.
        p_arr, q_arr = inst.deformed.array, inst.ideal.array
        self.arc_p = np.concatenate([[0.0], np.cumsum(np.hypot(*np.diff(p_arr, axis=0).T))])
        self.arc_q = np.concatenate([[0.0], np.cumsum(np.hypot(*np.diff(q_arr, axis=0).T))])
        self.q_x = q_arr[:, 0]
        # final_ok[i, l]: the single closing piece (i, n-1) -> (l, m-1) passes
        # the gate.  States too expensive for every deeper cut count can only
        # close in one piece, so they must sit inside this band.
        cp_last = self.oracle.chord_p[:, self.n - 1]
        cq_last = self.oracle.chord_q[:, self.m - 1]
        self.final_ok = ((1.0 - self.alpha) * cp_last[:, None] <= cq_last[None, :])
        self.final_ok &= cq_last[None, :] <= (1.0 + self.alpha) * cp_last[:, None]

    # -- upper bounds -------------------------------------------------------

    def _spread(self, count: int, last: int) -> tuple[int, ...] | None:
        """count+2 distinct indices 0..last, roughly equally spaced."""
        if count + 1 > last:
            return None
        idx = np.round(np.linspace(0, last, count + 2)).astype(int)
        for t in range(1, len(idx)):
            if idx[t] <= idx[t - 1]:
                idx[t] = idx[t - 1] + 1
        if idx[-1] > last:
            return None
        idx[-1] = last
        if len(set(idx.tolist())) != count + 2:
            return None
        return tuple(int(v) for v in idx)

    def _plan_value(self, bounds, chain) -> float:
        total = 0.0
        for (a, b), (l, r) in zip(zip(bounds, bounds[1:]), zip(chain, chain[1:])):
            c = self.oracle.query(a, b, l, r)
            if c == INFINITY:
                return INFINITY
            total += c
        uncov = chain[0] + (self.m - 1 - chain[-1])
        return _objective([total], self.inst.delta, uncov)

    def _heuristic_ub(self, k: int) -> float:
        bounds = self._spread(k, self.n - 1)
        chain = self._spread(k, self.m - 1)
        if bounds is None or chain is None:
            return INFINITY
        return self._plan_value(bounds, chain)

    def _polish_plan(self, bounds, chain, rounds: int = 2) -> float:
        """Greedy coordinate descent on a feasible plan: nudge each interior
        cut and clamp by +-1/+-2 while it improves.  Returns the best value."""
        bounds = list(bounds)
        chain = list(chain)
        best = self._plan_value(tuple(bounds), tuple(chain))
        if best == INFINITY:
            return best
        for _ in range(rounds):
            improved = False
            for arr, last in ((bounds, self.n - 1), (chain, self.m - 1)):
                for t in range(1, len(arr) - 1):
                    for step in (-2, -1, 1, 2):
                        cand = arr[t] + step
                        if not arr[t - 1] < cand < arr[t + 1]:
                            continue
                        old = arr[t]
                        arr[t] = cand
                        val = self._plan_value(tuple(bounds), tuple(chain))
                        if val < best:
                            best = val
                            improved = True
                        else:
                            arr[t] = old
            if not improved:
                break
        return best

    def _refined_ub(self, k: int) -> float:
        """Upper bound for k cuts from the exact (k-1)-cut plan: split the
        costliest piece at its midpoint with a midpoint clamp."""
        plan = self.plans.get(k - 1)
        if plan is None or not plan.feasible:
            return INFINITY
        bounds = (0,) + plan.cuts + (self.n - 1,)
        chain = (plan.clamps[0][0],) + tuple(r for _, r in plan.clamps)
        t = int(np.argmax(plan.piece_costs))
        a, b = bounds[t], bounds[t + 1]
        l, r = chain[t], chain[t + 1]
        if b - a < 2 or r - l < 2:
            return INFINITY
        p, q = (a + b) // 2, (l + r) // 2
        new_bounds = bounds[:t + 1] + (p,) + bounds[t + 1:]
        new_chain = chain[:t + 1] + (q,) + chain[t + 1:]
        return self._plan_value(new_bounds, new_chain)

    def _ub_tail(self, m: int) -> float:
        if not self.prune:
            return INFINITY
        vals = [self.ub.get(k, INFINITY) for k in range(m, self.k_max + 1)]
        return max(vals) if vals else INFINITY

    def _seed_ub_from_coarse(self) -> None:
        """Solve a half-resolution instance and price its plans on this one.

        Subsampled points are a subset of the originals, so a coarse plan
        maps index-for-index onto a valid fine plan; its fine value is a
        legitimate upper bound and is typically within a few percent of the
        optimum, which is what makes the bound pruning bite.
        """
        n, m = self.n, self.m
        p_idx = np.arange(0, n, 2)
        if p_idx[-1] != n - 1:
            p_idx = np.append(p_idx, n - 1)
        q_idx = np.arange(0, m, 2)
        if q_idx[-1] != m - 1:
            q_idx = np.append(q_idx, m - 1)
        if p_idx.size - 2 < self.k_max or q_idx.size < self.k_max + 2:
            return
        coarse = RefitInstance(
            FunctionCurve(tuple(self.inst.deformed.points[i] for i in p_idx)),
            FunctionCurve(tuple(self.inst.ideal.points[i] for i in q_idx)),
            self.k_max, self.inst.delta, self.inst.match, self.inst.mode)
        sub = _Engine(coarse, self.k_max, prune=True)
        sub.run()
        for k in range(self.k_max + 1):
            plan = sub.plans.get(k)
            if plan is None or not plan.feasible:
                continue
            bounds = (0,) + tuple(int(p_idx[c]) for c in plan.cuts) + (n - 1,)
            chain = [int(q_idx[plan.clamps[0][0]])]
            chain += [int(q_idx[r]) for _, r in plan.clamps]
            self.ub[k] = min(self.ub[k], self._polish_plan(bounds, tuple(chain)))

    # -- DP -----------------------------------------------------------------

    def run_iter(self):
        """Yield (k, plan) for k = 0..k_max as each cut count is solved."""
        n, m = self.n, self.m
        for k in range(self.k_max + 1):
            self.ub[k] = self._heuristic_ub(k)
        if self.prune and n >= 32 and m >= 32:
            self._seed_ub_from_coarse()
        root = np.full((n, m), INFINITY)
        if math.isinf(self.inst.delta):
            root[0, 0] = 0.0
        else:
            root[0, : m - 1] = np.arange(m - 1, dtype=float) * self.inst.delta
        self.layers.append(root)
        self.backptr.append(np.full((n, m), -1, dtype=np.int64))
        self._readout(0)
        self.plans[0] = self._extract_plan(0)
        yield 0, self.plans[0]
        for k in range(1, self.k_max + 1):
            self.ub[k] = min(self.ub[k], self._refined_ub(k))
            self._build_layer(k)
            self._readout(k)
            self.plans[k] = self._extract_plan(k)
            yield k, self.plans[k]

    def run(self) -> None:
        for _ in self.run_iter():
            pass

    def _sparse_states(self, layer: np.ndarray, cap: float):
        """Finite (and, when pruning, still-useful) cells as flat arrays."""
        ii, ll = np.nonzero(np.isfinite(layer))
        vv = layer[ii, ll]
        if self.prune and math.isfinite(cap):
            keep = vv <= cap
            ii, ll, vv = ii[keep], ll[keep], vv[keep]
        if self.prune and math.isinf(self.inst.delta) and ii.size:
            # Full coverage demanded: the remaining deformed arc must be able
            # to reach across the remaining ideal stretch within the gate.
            n, m = self.n, self.m
            arc_rem = self.arc_p[n - 1] - self.arc_p[ii]
            extent_rem = self.q_x[m - 1] - self.q_x[ll]
            arc_q_rem = self.arc_q[m - 1] - self.arc_q[ll]
            keep = (1.0 + self.alpha) * arc_rem >= extent_rem
            keep &= (1.0 - self.alpha) * self.oracle.chord_p[ii, n - 1] <= arc_q_rem
            ii, ll, vv = ii[keep], ll[keep], vv[keep]
        return ii, ll, vv

    def _span_widths(self, cf_lo: float, cf_hi: float, w_hi: int) -> np.ndarray:
        """Span widths (<= w_hi) whose chord range meets the gate band."""
        lo = (1.0 - self.alpha) * cf_lo
        hi = (1.0 + self.alpha) * cf_hi
        sl = self.cq_min_w[:w_hi]
        sh = self.cq_max_w[:w_hi]
        return np.nonzero((sh >= lo) & (sl <= hi))[0] + 1

    def _build_layer(self, m_next: int) -> None:
        """One transition: add a piece ending at a further interior cut.

        Candidates stream through three sieves per (piece width, span width)
        group: the chord gate, the whole-shape signed-area bound, and the
        bucketed bound; only survivors reach the exact area kernel.
        """
        n, m = self.n, self.m
        src = self.layers[m_next - 1]
        ubt = _cap(self._ub_tail(m_next))
        deep = _cap(self._ub_tail(m_next + 1))
        nxt = np.full((n, m), INFINITY)
        bp = np.full((n, m), -1, dtype=np.int64)
        ii0, ll0, vv0 = self._sparse_states(src, ubt)
        if ii0.size == 0 or self.k_max < m_next:
            self.layers.append(nxt)
            self.backptr.append(bp)
            return
        chord_p = self.oracle.chord_p
        chord_q = self.oracle.chord_q
        tot_p = self.oracle.tot_p
        tot_q = self.oracle.tot_q
        final_ok = self.final_ok
        buf = max(ii0.size, 1) * min(m, 512)
        out_s = np.empty(buf, dtype=np.int64)
        out_w = np.empty(buf, dtype=np.int64)
        out_est = np.empty(buf, dtype=float)
        screen_ubt = ubt if self.prune else INFINITY
        screen_deep = deep if self.prune else INFINITY
        for wf in range(1, n - 1 - int(ii0.min())):
            sel = ii0 + wf <= n - 2
            si, sl_, sv = ii0[sel], ll0[sel], vv0[sel]
            if si.size == 0:
                continue
            cf = chord_p[si, si + wf]
            wqs = self._span_widths(cf.min(), cf.max(), m - 2)
            wqs = wqs[wqs <= m - 2 - int(sl_.min())]
            if wqs.size == 0:
                continue
            ptot = tot_p[si, si + wf]
            if si.size * wqs.size > out_s.size:
                out_s = np.empty(si.size * wqs.size, dtype=np.int64)
                out_w = np.empty(out_s.size, dtype=np.int64)
                out_est = np.empty(out_s.size, dtype=float)
            cnt = kernels._screen_block_nb(
                si, sl_, sv, wf, wqs, cf, ptot, chord_q, tot_q, final_ok,
                nxt, self.alpha, screen_ubt, screen_deep, m - 2,
                out_s, out_w, out_est)
            if cnt == 0:
                continue
            s_idx = out_s[:cnt].copy()
            w_idx = out_w[:cnt].copy()
            order = np.argsort(w_idx, kind="stable")
            s_idx, w_idx = s_idx[order], w_idx[order]
            cut = np.searchsorted(w_idx, np.arange(wqs.size + 1))
            for t in range(wqs.size):
                a, b = cut[t], cut[t + 1]
                if a == b:
                    continue
                wq = int(wqs[t])
                gi = s_idx[a:b]
                iiq, llq, vvq = si[gi], sl_[gi], sv[gi]
                tj = iiq + wf
                tr = llq + wq
                est2 = vvq + self.oracle.bound_batch(iiq, wf, llq, wq)
                keep = est2 <= nxt[tj, tr]
                if self.prune:
                    keep &= est2 <= ubt
                if not keep.any():
                    continue
                iiq, llq, vvq, tj, tr = iiq[keep], llq[keep], vvq[keep], tj[keep], tr[keep]
                new = vvq + self.oracle.cost_batch(iiq, wf, llq, wq)
                ok = np.isfinite(new)
                if self.prune:
                    ok &= new <= ubt
                if not ok.any():
                    continue
                iiq, llq, new, tj, tr = iiq[ok], llq[ok], new[ok], tj[ok], tr[ok]
                better = new <= nxt[tj, tr]
                nxt[tj[better], tr[better]] = new[better]
                bp[tj[better], tr[better]] = iiq[better] * m + llq[better]
        self.layers.append(nxt)
        self.backptr.append(bp)

    def _readout(self, k: int) -> None:
        """Close layer-k states with the final piece (i, n-1) plus the tail
        uncoverage penalty; records the optimum and its final state."""
        n, m = self.n, self.m
        src = self.layers[k]
        delta = self.inst.delta
        if math.isinf(delta):
            tail_pen = np.full(m, INFINITY)
            tail_pen[m - 1] = 0.0
        else:
            tail_pen = delta * np.arange(m - 1, -1, -1, dtype=float)
        ub_k = _cap(self.ub.get(k, INFINITY)) if self.prune else INFINITY
        ii0, ll0, vv0 = self._sparse_states(src, ub_k)
        self.answers[k] = INFINITY
        if ii0.size == 0:
            return
        chord_q = self.oracle.chord_q
        cf = self.oracle.chord_p[ii0, n - 1]
        ptot = self.oracle.tot_p[ii0, n - 1]
        wqs = self._span_widths(cf.min(), cf.max(), m - 1)
        wqs = wqs[wqs <= m - 1 - int(ll0.min())]
        if wqs.size == 0:
            return
        r_idx = ll0[:, None] + wqs[None, :]
        valid = r_idx <= m - 1
        r_safe = np.minimum(r_idx, m - 1)
        cqm = chord_q[ll0[:, None], r_safe]
        gate = ((1.0 - self.alpha) * cf[:, None] <= cqm)
        gate &= cqm <= (1.0 + self.alpha) * cf[:, None]
        gate &= valid
        if not gate.any():
            return
        stot = self.oracle.tot_q[ll0[:, None], r_safe]
        tails = tail_pen[r_safe]
        with np.errstate(invalid="ignore"):
            est = vv0[:, None] + cqm * cqm * np.abs(ptot[:, None] - stot) + tails
        mask = gate & np.isfinite(est)
        if self.prune:
            mask &= est <= ub_k
        if not mask.any():
            return
        s_idx, w_idx = np.nonzero(mask)
        wf_vec = (n - 1 - ii0[s_idx]).astype(np.int64)
        order = np.lexsort((w_idx, wf_vec))
        s_idx, w_idx, wf_vec = s_idx[order], w_idx[order], wf_vec[order]
        group_key = wf_vec * (m + 1) + wqs[w_idx]
        cand_v, cand_i, cand_l, cand_r = [], [], [], []
        running = ub_k
        start = 0
        while start < group_key.size:
            stop = start
            while stop < group_key.size and group_key[stop] == group_key[start]:
                stop += 1
            gs = slice(start, stop)
            start = stop
            wf = int(wf_vec[gs.start])
            wq = int(wqs[w_idx[gs.start]])
            iiq = ii0[s_idx[gs]]
            llq = ll0[s_idx[gs]]
            vvq = vv0[s_idx[gs]]
            est2 = vvq + self.oracle.bound_batch(iiq, wf, llq, wq) + tail_pen[llq + wq]
            keep = est2 <= running if self.prune else np.isfinite(est2)
            if not keep.any():
                continue
            iiq, llq, vvq = iiq[keep], llq[keep], vvq[keep]
            new = vvq + self.oracle.cost_batch(iiq, wf, llq, wq) + tail_pen[llq + wq]
            ok = np.isfinite(new)
            if ok.any():
                cand_v.append(new[ok])
                cand_i.append(iiq[ok])
                cand_l.append(llq[ok])
                cand_r.append(llq[ok] + wq)
                if self.prune:
                    running = min(running, _cap(float(new[ok].min())))
        if not cand_v:
            return
        allv = np.concatenate(cand_v)
        alli = np.concatenate(cand_i)
        alll = np.concatenate(cand_l)
        allr = np.concatenate(cand_r)
        top = np.lexsort((allr, alll, alli, allv))[0]
        best = float(allv[top])
        self.answers[k] = best
        self.finals[k] = (int(alli[top]), int(alll[top]), int(allr[top]))
        if best < self.ub.get(k, INFINITY):
            self.ub[k] = best

    # -- plan extraction ----------------------------------------------------

    def _extract_plan(self, k: int) -> RefitPlan:
        value = self.answers.get(k, INFINITY)
        if value == INFINITY or k not in self.finals:
            return RefitPlan.infeasible()
        i, l, r = self.finals[k]
        chain_r = [r]
        cuts_rev = []
        cur_i, cur_l = i, l
        for m_layer in range(k, 0, -1):
            chain_r.append(cur_l)
            cuts_rev.append(cur_i)
            packed = int(self.backptr[m_layer][cur_i, cur_l])
            assert packed >= 0, "backpointer missing on a finite state"
            cur_i, cur_l = divmod(packed, self.m)
        assert cur_i == 0
        chain_r.append(cur_l)
        chain = list(reversed(chain_r))
        cuts = tuple(reversed(cuts_rev))
        bounds = (0,) + cuts + (self.n - 1,)
        clamps = tuple(zip(chain, chain[1:]))
        costs = tuple(self.oracle.query(a, b, sl, sr)
                      for (a, b), (sl, sr) in zip(zip(bounds, bounds[1:]), clamps))
        uncov = chain[0] + (self.m - 1 - chain[-1])
        objective = _objective(costs, self.inst.delta, uncov)
        assert math.isclose(objective, value, rel_tol=1e-9, abs_tol=1e-12), \
            f"reconstructed objective {objective} drifted from DP value {value}"
        return RefitPlan(cuts, clamps, costs, uncov, objective)


@dataclass
class SweepResult:
    """Per-cut-count optima plus the running best over at most k cuts."""

    entries: list[tuple[int, RefitPlan]]
    best_at_most: list[float]


def solve_exact_k(inst: RefitInstance) -> RefitPlan:
    """Optimal plan with exactly ``inst.k`` cuts; infeasible plan when no
    clamp assignment passes the match gate."""
    engine = _Engine(inst, inst.k)
    engine.run()
    return engine.plans[inst.k]


def sweep(inst: RefitInstance, k_max: int) -> SweepResult:
    """Exact optima for every cut count 0..k_max in one shared-layer pass."""
    engine = _Engine(inst, k_max)
    engine.run()
    entries = [(k, engine.plans[k]) for k in range(k_max + 1)]
    best: list[float] = []
    cur = INFINITY
    for _, plan in entries:
        cur = min(cur, plan.objective)
        best.append(cur)
    return SweepResult(entries, best)


def brute_force(inst: RefitInstance) -> RefitPlan:
    """Exhaustive optimum over all cuts and monotone clamp chains.

    Guarded to |P| <= 12, |Q| <= 12, k <= 3; this is the independent oracle
    the dynamic program is validated against.
    """
    n, m = len(inst.deformed), len(inst.ideal)
    if n > 12 or m > 12 or inst.k > 3:
        raise SizeGuardError(f"brute force limited to |P|,|Q| <= 12 and k <= 3, got ({n}, {m}, {inst.k})")
    if inst.mode is not Mode.NO_REARRANGEMENT:
        raise InvalidInstanceError("brute_force enumerates the no-rearrangement variant")
    oracle = CostOracle(inst.deformed, inst.ideal, inst.match)
    k = inst.k
    best = INFINITY
    best_plan: tuple | None = None
    for cuts in itertools.combinations(range(1, n - 1), k):
        bounds = (0,) + cuts + (n - 1,)
        for chain in itertools.combinations(range(m), k + 2):
            total = 0.0
            for (a, b), (l, r) in zip(zip(bounds, bounds[1:]), zip(chain, chain[1:])):
                c = oracle.query(a, b, l, r)
                total += c
                if total == INFINITY:
                    break
            if total == INFINITY:
                continue
            uncov = chain[0] + (m - 1 - chain[-1])
            value = _objective([total], inst.delta, uncov)
            if value < best:
                best = value
                best_plan = (cuts, chain, uncov)
    if best_plan is None:
        return RefitPlan.infeasible()
    cuts, chain, uncov = best_plan
    bounds = (0,) + cuts + (n - 1,)
    clamps = tuple(zip(chain, chain[1:]))
    costs = tuple(oracle.query(a, b, l, r)
                  for (a, b), (l, r) in zip(zip(bounds, bounds[1:]), clamps))
    return RefitPlan(cuts, clamps, costs, uncov, _objective(costs, inst.delta, uncov))


def render_result(inst: RefitInstance, plan: RefitPlan) -> Polyline:
    """Deformed pieces mapped onto their clamp spans, joined into one curve."""
    if not plan.feasible:
        raise InvalidInstanceError("cannot render an infeasible plan")
    n = len(inst.deformed)
    bounds = (0,) + plan.cuts + (n - 1,)
    q = inst.ideal.points
    pts: list[Point2] = []
    for (a, b), (l, r) in zip(zip(bounds, bounds[1:]), plan.clamps):
        piece = Polyline(inst.deformed.points[a:b + 1])
        mapped = align_endpoints(piece, q[l], q[r])
        pts.extend(mapped.points if not pts else mapped.points[1:])
    return Polyline(tuple(pts))
