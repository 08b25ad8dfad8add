"""Boxes, level bookkeeping and the splitting primitives of MCS."""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..errors import DegenerateInterval

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0   # 0.618...
GOLDEN_SMALL = 1.0 - GOLDEN             # 0.381...
FREEZE_REL = 1e-12
INTEGER_FREEZE_WIDTH = 0.5
SAMPLE_MEMORY = 6


def golden_splits(a: float, b: float):
    """The two golden-section points of ``[a, b]``, in increasing order."""
    if not b - a >= 1e-14 * max(1.0, abs(a), abs(b)):
        raise DegenerateInterval(f"interval [{a}, {b}] is too small to split")
    w = b - a
    return a + GOLDEN_SMALL * w, b - GOLDEN_SMALL * w


@dataclass(eq=False)
class Box:
    """Hyperrectangle ``[lower, upper]`` whose objective is known at ``base``.

    ``samples[i]`` holds recent ``(position, value)`` observations along
    coordinate ``i`` gathered from the splits that produced this box; they
    feed the separable quadratic model of the split-by-gain rule.
    """

    lower: np.ndarray
    upper: np.ndarray
    base: np.ndarray
    value: float
    level: int
    split_counts: np.ndarray
    samples: list
    index: int
    promising: bool = True
    alive: bool = True

    @property
    def base_point(self) -> np.ndarray:
        return self.base

    @property
    def base_value(self) -> float:
        return self.value

    @property
    def opposite_point(self) -> np.ndarray:
        """Corner farthest from the base point; together they span the box."""
        lo_gap = self.base - self.lower
        hi_gap = self.upper - self.base
        return np.where(hi_gap >= lo_gap, self.upper, self.lower)

    def width(self, i: int) -> float:
        return float(self.upper[i] - self.lower[i])


@dataclass
class SweepState:
    """All boxes of a run grouped by level, plus the global bookkeeping."""

    n: int
    s_max: int
    domain_lower: np.ndarray
    domain_upper: np.ndarray
    integer_mask: np.ndarray
    boxes: list = field(default_factory=list)
    heaps: dict = field(default_factory=dict)
    seeded: set = field(default_factory=set)
    init_samples: Optional[list] = None
    designated: set = field(default_factory=set)

    def new_box(self, lower, upper, base, value, level, split_counts, samples) -> Box:
        box = Box(np.array(lower, float), np.array(upper, float), np.array(base, float), float(value),
                  int(min(level, self.s_max)), np.array(split_counts, dtype=int), samples, len(self.boxes))
        self.boxes.append(box)
        self.designated.add(box.base.tobytes())
        self.push(box)
        return box

    def push(self, box: Box):
        if box.level < self.s_max:
            heapq.heappush(self.heaps.setdefault(box.level, []), (box.value, box.index, box))

    def retire(self, box: Box):
        box.alive = False

    def pop_best(self, level: int) -> Optional[Box]:
        heap = self.heaps.get(level)
        while heap:
            value, index, box = heapq.heappop(heap)
            if box.alive and box.level == level:
                return box
        return None

    def live(self):
        return [b for b in self.boxes if b.alive]

    def has_open_boxes(self) -> bool:
        return any(b.alive and b.level < self.s_max for b in self.boxes)

    def frozen(self, box: Box, i: int) -> bool:
        w = box.width(i)
        if w < FREEZE_REL * (self.domain_upper[i] - self.domain_lower[i]):
            return True
        return bool(self.integer_mask[i]) and w < INTEGER_FREEZE_WIDTH

    def splittable(self, box: Box):
        return [i for i in range(self.n) if not self.frozen(box, i)]


def select_boxes(state: SweepState):
    """Best live box (lowest value, then earliest created) at each level 2..s_max-1."""
    best = {}
    for box in state.boxes:
        if not box.alive or not 2 <= box.level < state.s_max:
            continue
        cur = best.get(box.level)
        if cur is None or (box.value, box.index) < (cur.value, cur.index):
            best[box.level] = box
    return [(s, best[s]) for s in sorted(best)]


def split_decision(box: Box, n: int, candidates=None):
    """``("rank", i)`` when the level exceeds ``2n(m+1)`` for the least split count ``m``, else ``("gain", None)``."""
    coords = range(n) if candidates is None else candidates
    coords = list(coords)
    if not coords:
        return ("gain", None)
    i = min(coords, key=lambda c: (box.split_counts[c], c))
    if box.level > 2 * n * (box.split_counts[i] + 1):
        return ("rank", i)
    return ("gain", None)


def partition(a: float, b: float, positions, values):
    """Intervals tiling ``[a, b]``, one per sorted position.

    Consecutive positions are separated at the golden ratio so that the
    point with the better value receives the larger share.
    """
    cuts = [a]
    for j in range(len(positions) - 1):
        p, q = positions[j], positions[j + 1]
        frac = GOLDEN if values[j] <= values[j + 1] else GOLDEN_SMALL
        cuts.append(p + frac * (q - p))
    cuts.append(b)
    return [(cuts[j], cuts[j + 1]) for j in range(len(positions))]


def quadratic_min(ts, fs, lo: float, hi: float):
    """Minimise the interpolating quadratic of three samples over ``[lo, hi]``.

    Returns ``(t_min, q_min)``.
    """
    t1, t2, t3 = ts
    f1, f2, f3 = fs
    d1 = (f2 - f1) / (t2 - t1)
    d2 = ((f3 - f1) / (t3 - t1) - d1) / (t3 - t2)

    def q(t):
        return f1 + d1 * (t - t1) + d2 * (t - t1) * (t - t2)

    cands = [lo, hi]
    if d2 > 0:
        vertex = 0.5 * (t1 + t2) - d1 / (2.0 * d2)
        if lo < vertex < hi:
            cands.append(vertex)
    vals = [q(t) for t in cands]
    k = int(np.argmin(vals))
    return cands[k], vals[k]


def model_samples(box: Box, i: int, tol: float):
    """Base sample plus the two most recent samples at distinct positions along ``i``."""
    pts = [(float(box.base[i]), box.value)]
    for pos, val in reversed(box.samples[i]):
        if all(abs(pos - p) > tol for p, _ in pts):
            pts.append((pos, val))
            if len(pts) == 3:
                break
    return pts


def child_samples(parent: Box, i: int, positions, values):
    """Sample lists for children of a split along ``i``."""
    own = [s for s in parent.samples[i] if all(abs(s[0] - p) > 0 for p in positions)]
    own.extend(zip((float(p) for p in positions), (float(v) for v in values)))
    samples = list(parent.samples)
    samples[i] = tuple(own[-SAMPLE_MEMORY:])
    return samples


def split_box(state: SweepState, box: Box, i: int, positions, values):
    """Replace ``box`` by one child per position along coordinate ``i``.

    ``positions`` must include the parent's base coordinate; every other
    position has already been evaluated with the remaining coordinates of
    the base point held fixed. Children sit one level above the parent.
    """
    order = np.argsort(positions, kind="stable")
    pos = [float(positions[k]) for k in order]
    val = [float(values[k]) for k in order]
    intervals = partition(float(box.lower[i]), float(box.upper[i]), pos, val)
    counts = box.split_counts.copy()
    counts[i] += 1
    samples = child_samples(box, i, pos, val)
    state.retire(box)
    children = []
    for (lo, hi), p, v in zip(intervals, pos, val):
        lower = box.lower.copy()
        upper = box.upper.copy()
        lower[i], upper[i] = lo, hi
        base = box.base.copy()
        base[i] = p
        children.append(state.new_box(lower, upper, base, v, box.level + 1, counts, samples))
    return children


def bump_level(state: SweepState, box: Box):
    """Tag ``box`` as not promising and move it one level up."""
    box.promising = False
    box.level = min(box.level + 1, state.s_max)
    state.push(box)
    return box
