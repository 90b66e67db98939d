"""Desk-scale laboratory for the rearrangement variant.

The variant that lets pieces be reordered or flipped on the ideal curve is
intractable in general, so this module ships the machinery to study it at
toy scale instead of a production solver: a generator turning 3-Partition
instances into equivalent curve-reshaping instances built from flat element
segments, tall separator peaks, and unit-gridded buckets; an exact congruence
cost; an exhaustive 3-Partition decider; and a structure-aware zero-cost
decision for the generated instances.  All reduction coordinates are exact
integers and every test on them is exact rational arithmetic.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .dissimilarity import INFINITY, CostOracle
from .errors import InvalidInstanceError, SizeGuardError
from .rng import SplitMix64
from .solver import Mode, RefitInstance

IntPoint = tuple[int, int]


@dataclass(frozen=True)
class ThreePartitionInstance:
    """Multiset of 3m positive integers to split into m groups of equal sum B."""

    sizes: tuple[int, ...]
    m: int
    strict: bool = True

    def __post_init__(self):
        object.__setattr__(self, "sizes", tuple(int(s) for s in self.sizes))
        if self.m < 1:
            raise InvalidInstanceError("m must be >= 1")
        if len(self.sizes) != 3 * self.m:
            raise InvalidInstanceError(f"need exactly 3m={3 * self.m} sizes, got {len(self.sizes)}")
        if any(s <= 0 for s in self.sizes):
            raise InvalidInstanceError("sizes must be positive")
        if sum(self.sizes) % self.m != 0:
            raise InvalidInstanceError(f"total {sum(self.sizes)} not divisible by m={self.m}")
        if self.strict:
            b = self.B
            for s in self.sizes:
                if not (4 * s > b and 2 * s < b):
                    raise InvalidInstanceError(f"size {s} violates B/4 < s < B/2 with B={b}")

    @property
    def B(self) -> int:
        return sum(self.sizes) // self.m


@dataclass(frozen=True)
class ReducedInstance:
    """Curve-reshaping instance produced from a 3-Partition instance.

    ``p_points``: flat element segments followed by m-1 separator peaks;
    ``q_points``: m unit-gridded buckets of length B separated by m-1 peaks;
    every interior point of P is cut (k = |P| - 2).
    """

    p_points: tuple[IntPoint, ...]
    q_points: tuple[IntPoint, ...]
    k: int
    element_segments: tuple[tuple[int, int], ...]
    prefix_sums: tuple[int, ...]

    @property
    def m(self) -> int:
        return len(self.element_segments) // 3

    @property
    def B(self) -> int:
        return self.prefix_sums[-1] // self.m


def reduce_3partition(tp: ThreePartitionInstance) -> ReducedInstance:
    """Build the equivalent curve instance with exact integer coordinates."""
    m, b = tp.m, tp.B
    prefix = [0]
    for s in tp.sizes:
        prefix.append(prefix[-1] + s)
    s_total = prefix[-1]
    p1 = [(s, 0) for s in prefix]
    p2 = [(s_total + 2 * i + 1, 2 * b) for i in range(m - 1)]
    p3 = [(s_total + 2 * i, 0) for i in range(1, m)]
    p = sorted(p1 + p2 + p3)
    q1 = [(x, 0) for i in range(m) for x in range((b + 2) * i, (b + 2) * i + b + 1)]
    q2 = [((b + 2) * i + b + 1, 2 * b) for i in range(m - 1)]
    q = sorted(q1 + q2)
    segments = tuple((t, t + 1) for t in range(3 * m))
    return ReducedInstance(tuple(p), tuple(q), len(p) - 2, segments, tuple(prefix))


def _simplify(points) -> list[tuple[int, int]]:
    """Drop interior vertices that continue the previous edge straight ahead."""
    pts = [(int(x), int(y)) for x, y in points]
    out = [pts[0]]
    for cur in pts[1:]:
        if cur == out[-1]:
            continue
        if len(out) >= 2:
            ax, ay = out[-2]
            bx, by = out[-1]
            cross = (bx - ax) * (cur[1] - by) - (by - ay) * (cur[0] - bx)
            dot = (bx - ax) * (cur[0] - bx) + (by - ay) * (cur[1] - by)
            if cross == 0 and dot > 0:
                out[-1] = cur
                continue
        out.append(cur)
    return out


def congruence_cost(piece, span) -> int:
    """0 iff the two integer polylines are the same curve up to an
    orientation-preserving rigid motion taking endpoints to endpoints; else 1.

    Exact: the candidate rotation has rational cosine/sine once the chords
    agree, so every vertex test is integer/Fraction arithmetic.
    """
    a = _simplify(piece)
    b = _simplify(span)
    if len(a) != len(b):
        return 1
    ux, uy = a[-1][0] - a[0][0], a[-1][1] - a[0][1]
    vx, vy = b[-1][0] - b[0][0], b[-1][1] - b[0][1]
    n2 = ux * ux + uy * uy
    if n2 == 0 or vx * vx + vy * vy != n2:
        return 1
    cos_t = Fraction(ux * vx + uy * vy, n2)
    sin_t = Fraction(ux * vy - uy * vx, n2)
    for (ax, ay), (bx, by) in zip(a, b):
        rx, ry = ax - a[0][0], ay - a[0][1]
        if (cos_t * rx - sin_t * ry != bx - b[0][0]
                or sin_t * rx + cos_t * ry != by - b[0][1]):
            return 1
    return 0


def _pack_exact(lengths: list[int], capacities: list[int]) -> bool:
    """Backtracking: place every length into some bin, no bin overfilled.

    Totals match the capacities, so success means every bin is filled exactly.
    """
    if sum(lengths) != sum(capacities):
        return False
    lengths = sorted(lengths, reverse=True)
    remaining = list(capacities)

    def place(t: int) -> bool:
        if t == len(lengths):
            return True
        seen = set()
        for i, room in enumerate(remaining):
            if room >= lengths[t] and room not in seen:
                seen.add(room)
                remaining[i] = room - lengths[t]
                if place(t + 1):
                    return True
                remaining[i] = room
        return False

    return place(0)


def solve_3partition(tp: ThreePartitionInstance) -> bool:
    """Exhaustive decision: can the sizes split into m groups each summing B?

    With the strict size bounds any solution uses triples; without them any
    group sizes are allowed.  Guarded to at most 15 elements.
    """
    if len(tp.sizes) > 15:
        raise SizeGuardError(f"exhaustive decider limited to 15 elements, got {len(tp.sizes)}")
    return _pack_exact(list(tp.sizes), [tp.B] * tp.m)


def zero_cost_decision(ri: ReducedInstance) -> bool:
    """Can all pieces of the reduced instance sit on the ideal curve at zero
    total cost with nothing uncovered, when every interior P point is cut?

    Structure-aware: separator peaks only fit onto ideal peaks (checked with
    the congruence cost on the actual coordinates), and flat element segments
    must pack the unit-gridded buckets exactly.
    """
    m, b = ri.m, ri.B
    p, q = ri.p_points, ri.q_points
    peak_y = 2 * b
    p_peaks = [i for i in range(1, len(p) - 1) if p[i][1] == peak_y]
    q_peaks = [i for i in range(1, len(q) - 1) if q[i][1] == peak_y]
    if len(p_peaks) != len(q_peaks):
        return False
    for pi in p_peaks:
        tent_p = p[pi - 1:pi + 2]
        if any(congruence_cost(tent_p, q[qi - 1:qi + 2]) != 0 for qi in q_peaks):
            return False
    # Bucket capacities from the geometry: maximal flat runs of Q.
    capacities = []
    run = 0
    for (x0, y0), (x1, y1) in zip(q, q[1:]):
        if y0 == 0 and y1 == 0 and x1 - x0 == 1:
            run += 1
        elif run:
            capacities.append(run)
            run = 0
    if run:
        capacities.append(run)
    if len(capacities) != m or any(c != b for c in capacities):
        return False
    lengths = []
    for (i0, i1) in ri.element_segments:
        if p[i0][1] != 0 or p[i1][1] != 0:
            return False
        lengths.append(p[i1][0] - p[i0][0])
    # A flat element of length s must land congruently on a unit-gridded
    # stretch of the same length; verify once per distinct length.
    for s in set(lengths):
        grid = [(x, 0) for x in range(s + 1)]
        if congruence_cost([(0, 0), (s, 0)], grid) != 0:
            return False
    return _pack_exact(lengths, capacities)


def brute_force_rearrangement(inst: RefitInstance) -> float:
    """Exhaustive optimum when pieces may be reordered or flipped.

    Each piece takes any span (l, r) with l != r; flipped placements are
    normalized to min/max span order, which leaves both the cost and the
    coverage unchanged.  Coverage is the union of all spans; each uncovered
    ideal interval costs delta.  Guarded to |P|,|Q| <= 8 and k <= 3.
    """
    n, mq = len(inst.deformed), len(inst.ideal)
    if n > 8 or mq > 8 or inst.k > 3:
        raise SizeGuardError(f"rearrangement brute force limited to 8 points and k <= 3, got ({n}, {mq}, {inst.k})")
    oracle = CostOracle(inst.deformed, inst.ideal, inst.match)
    k = inst.k
    intervals = mq - 1
    full_mask = (1 << intervals) - 1
    span_opts = []
    for l in range(mq):
        for r in range(l + 1, mq):
            mask = 0
            for t in range(l, r):
                mask |= 1 << t
            span_opts.append((l, r, mask))
    best = INFINITY
    for cuts in itertools.combinations(range(1, n - 1), k):
        bounds = (0,) + cuts + (n - 1,)
        piece_opts = []
        for a, b in zip(bounds, bounds[1:]):
            opts = []
            for l, r, mask in span_opts:
                c = oracle.query(a, b, l, r)
                if c < INFINITY:
                    opts.append((c, mask))
            piece_opts.append(opts)
        if any(not opts for opts in piece_opts):
            continue
        # DP over (piece index, covered-interval mask).
        states = {0: 0.0}
        for opts in piece_opts:
            nxt: dict[int, float] = {}
            for mask, val in states.items():
                for c, smask in opts:
                    nm = mask | smask
                    nv = val + c
                    if nv < nxt.get(nm, INFINITY):
                        nxt[nm] = nv
            states = nxt
        for mask, val in states.items():
            uncov = intervals - bin(mask).count("1")
            penalty = 0.0 if uncov == 0 else inst.delta * uncov
            best = min(best, val + penalty)
    return best


def random_strict_instance(rng: SplitMix64, m: int, b: int, max_tries: int = 100000) -> ThreePartitionInstance:
    """Rejection-sample a strict instance: sizes from (B/4, B/2), total mB."""
    lo = b // 4 + 1
    hi = (b - 1) // 2 if (b % 2) == 0 else b // 2
    while 2 * hi >= b:
        hi -= 1
    if lo > hi:
        raise InvalidInstanceError(f"no strict sizes exist for B={b}")
    for _ in range(max_tries):
        sizes = [rng.randint(lo, hi) for _ in range(3 * m)]
        if sum(sizes) == m * b:
            return ThreePartitionInstance(tuple(sizes), m, strict=True)
    raise InvalidInstanceError(f"could not sample a strict instance for m={m}, B={b}")
