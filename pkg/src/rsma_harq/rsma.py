"""Two-user uplink rate-splitting model: per-round SINRs, alpha feasibility and
retransmission-case classification.

User 1 splits its unit power into stream s11 (fraction ``alpha``) and s12
(fraction ``1 - alpha``); user 2 sends a single stream s2.  The receiver decodes
in the order s11, s2, s12.  Two rate conditions decide which streams survive
the first round:

* cond1: ``log2(1 + sigma11) + log2(1 + sigma12) >= r1``  (nonincreasing in alpha)
* cond2: ``log2(1 + sigma2) >= r2``                       (nondecreasing in alpha)

so the cond1 feasible set is a prefix ``[0, a1]`` of [0, 1] and the cond2 set is
a suffix ``[a2, 1]``.  Both sets are located by direct evaluation of the
inequalities; the algebraic bounds ``alpha_h`` and ``alpha_l`` serve only as
starting points and diagnostics, because the ``alpha_h`` reading flips when
``2^r1 - 1 - g1 - g2`` changes sign.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

from .channel import ChannelDraw


@dataclass(frozen=True)
class SinrTriple:
    s11: float
    s2: float
    s12: float


def sinr_parts(g1: float, g2: float, alpha: float) -> tuple[float, float, float]:
    """Scalar core of :func:`sinr_components`, shared with the engine."""
    rest = (1.0 - alpha) * g1
    s11 = alpha * g1 / (1.0 + rest + g2)
    s2 = g2 / (1.0 + rest)
    return s11, s2, rest


def sinr_components(draw: ChannelDraw, alpha: float) -> SinrTriple:
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
    return SinrTriple(*sinr_parts(draw.g1, draw.g2, alpha))


def cond1_holds(g1: float, g2: float, alpha: float, r1: float) -> bool:
    s11, _, s12 = sinr_parts(g1, g2, alpha)
    return math.log2(1.0 + s11) + math.log2(1.0 + s12) >= r1


def cond2_holds(g1: float, g2: float, alpha: float, r2: float) -> bool:
    _, s2, _ = sinr_parts(g1, g2, alpha)
    return math.log2(1.0 + s2) >= r2


def all_decodable(draw: ChannelDraw, alpha: float, r1: float, r2: float) -> bool:
    return cond1_holds(draw.g1, draw.g2, alpha, r1) and cond2_holds(draw.g1, draw.g2, alpha, r2)


@dataclass(frozen=True)
class Interval:
    """Closed interval ``[lo, hi]``; ``None`` is used for the empty set."""

    lo: float
    hi: float

    def __contains__(self, a: float) -> bool:
        return self.lo <= a <= self.hi


@dataclass(frozen=True)
class AlphaBounds:
    alpha_l: float
    alpha_h: float
    cond1_set: Interval | None
    cond2_set: Interval | None
    notes: tuple[str, ...] = ()

    @property
    def cond1_feasible_set(self):
        return self.cond1_set

    @property
    def cond2_feasible_set(self):
        return self.cond2_set

    @property
    def s_set(self) -> Interval | None:
        """Intersection of both feasible sets (alphas needing no retransmission)."""
        if self.cond1_set is None or self.cond2_set is None:
            return None
        lo = max(self.cond1_set.lo, self.cond2_set.lo)
        hi = min(self.cond1_set.hi, self.cond2_set.hi)
        return Interval(lo, hi) if lo <= hi else None


def _edge_search(pred, good: float, bad: float, guess: float) -> float:
    """Last point on the ``good`` side of a monotone predicate's boundary.

    ``pred(good)`` is true and ``pred(bad)`` is false.  Starting from an
    algebraic ``guess`` the boundary is polished ulp by ulp; a poor guess
    falls back to bisection.  The result satisfies ``pred`` and its floating
    point neighbour toward ``bad`` does not.
    """
    x = min(max(guess, min(good, bad)), max(good, bad))
    if pred(x):
        for _ in range(64):
            nxt = math.nextafter(x, bad)
            if not pred(nxt):
                return x
            x = nxt
        lo, hi = x, bad
    else:
        for _ in range(64):
            x = math.nextafter(x, good)
            if pred(x):
                return x
        lo, hi = good, x
    while True:
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            return lo
        if pred(mid):
            lo = mid
        else:
            hi = mid


def alpha_h_value(g1: float, g2: float, r1: float) -> float:
    k = 1.0 + g1 + g2
    big_r = 2.0 ** r1
    den = g1 * (k - big_r)
    if den == 0.0:
        return math.nan
    return k * (1.0 + g1 - big_r) / den


def alpha_l_value(g1: float, g2: float, r2: float) -> float:
    if r2 <= 0.0:
        return -math.inf
    if g1 == 0.0:
        return math.nan
    return 1.0 + 1.0 / g1 - g2 / (g1 * (2.0 ** r2 - 1.0))


def cond1_interval(g1: float, g2: float, r1: float) -> Interval | None:
    pred = lambda a: cond1_holds(g1, g2, a, r1)  # noqa: E731
    if not pred(0.0):
        return None
    if pred(1.0):
        return Interval(0.0, 1.0)
    ah = alpha_h_value(g1, g2, r1)
    guess = ah if math.isfinite(ah) else 0.5
    return Interval(0.0, _edge_search(pred, 0.0, 1.0, guess))


def cond2_interval(g1: float, g2: float, r2: float) -> Interval | None:
    if r2 <= 0.0:
        return Interval(0.0, 1.0)
    pred = lambda a: cond2_holds(g1, g2, a, r2)  # noqa: E731
    if not pred(1.0):
        return None
    if pred(0.0):
        return Interval(0.0, 1.0)
    al = alpha_l_value(g1, g2, r2)
    guess = al if math.isfinite(al) else 0.5
    return Interval(_edge_search(pred, 1.0, 0.0, guess), 1.0)


def alpha_bounds(draw: ChannelDraw, r1: float, r2: float) -> AlphaBounds:
    g1, g2 = draw.g1, draw.g2
    notes = []
    if r2 <= 0.0:
        notes.append("condition (8) vacuous")
    if 2.0 ** r1 - 1.0 - g1 - g2 == 0.0:
        notes.append("alpha_h undefined, use direct check")
    return AlphaBounds(
        alpha_l=alpha_l_value(g1, g2, r2),
        alpha_h=alpha_h_value(g1, g2, r1),
        cond1_set=cond1_interval(g1, g2, r1),
        cond2_set=cond2_interval(g1, g2, r2),
        notes=tuple(notes),
    )


class Case(enum.IntEnum):
    NO_RETX = 0
    S2_ONLY = 1
    S11_ONLY = 2
    BOTH = 3
    SPECIAL_ALPHA1 = 4
    SPECIAL_ALPHA0 = 5
    MIXED = 6  # several retransmission regions share [0, 1]; see admissible regions

    @property
    def n_streams(self) -> int:
        return {0: 0, 1: 1, 2: 1, 3: 2, 4: 1, 5: 1}.get(int(self), -1)


@dataclass(frozen=True)
class Region:
    lo: float
    hi: float
    lo_closed: bool
    hi_closed: bool
    case: Case

    def __contains__(self, a: float) -> bool:
        above = a >= self.lo if self.lo_closed else a > self.lo
        below = a <= self.hi if self.hi_closed else a < self.hi
        return above and below


@dataclass(frozen=True)
class RetransmissionCase:
    case_id: Case
    admissible_alpha_regions: tuple[Region, ...]
    specials: tuple[Case, ...] = field(default=())

    def region_of(self, alpha: float) -> Region:
        for reg in self.admissible_alpha_regions:
            if alpha in reg:
                return reg
        raise ValueError(f"alpha {alpha} outside every region")

    @property
    def regions(self):
        return self.admissible_alpha_regions


def region_case(c1: bool, c2: bool) -> Case:
    if c1 and c2:
        return Case.NO_RETX
    if c1:
        return Case.S2_ONLY
    if c2:
        return Case.S11_ONLY
    return Case.BOTH


def classify(bounds: AlphaBounds) -> RetransmissionCase:
    """Partition [0, 1] into retransmission-case regions.

    Boundaries belong to the region that retransmits fewer streams, which is
    the closed side of each feasible set.
    """
    i1, i2 = bounds.cond1_set, bounds.cond2_set
    # cut points: a1 closes the cond1 prefix, a2 opens the cond2 suffix
    a1 = i1.hi if i1 is not None else None
    a2 = i2.lo if i2 is not None else None

    points = sorted({0.0, 1.0} | ({a1} if a1 is not None else set()) | ({a2} if a2 is not None else set()))
    regions: list[Region] = []

    def c1_at(a: float, right_of: bool) -> bool:
        if i1 is None:
            return False
        return a < a1 or (a == a1 and not right_of)

    def c2_at(a: float, left_of: bool) -> bool:
        if i2 is None:
            return False
        return a > a2 or (a == a2 and not left_of)

    # closed singleton points and open gaps, merged by case afterwards
    atoms: list[tuple[float, float, bool, bool, Case]] = []
    for k, p in enumerate(points):
        atoms.append((p, p, True, True, region_case(c1_at(p, False), c2_at(p, False))))
        if k + 1 < len(points):
            q = points[k + 1]
            mid = 0.5 * (p + q)
            atoms.append((p, q, False, False, region_case(c1_at(mid, True), c2_at(mid, True))))
    for lo, hi, lc, hc, case in atoms:
        if regions and regions[-1].case == case:
            prev = regions[-1]
            regions[-1] = Region(prev.lo, hi, prev.lo_closed, hc, case)
        else:
            regions.append(Region(lo, hi, lc, hc, case))

    cases = {r.case for r in regions}
    if Case.NO_RETX in cases:
        case_id = Case.NO_RETX
    elif len(cases) == 1:
        case_id = regions[0].case
    else:
        case_id = Case.MIXED

    specials = []
    if i1 is not None and 1.0 in i1 and (i2 is None or 1.0 not in i2):
        specials.append(Case.SPECIAL_ALPHA1)
    if i2 is not None and 0.0 in i2 and (i1 is None or 0.0 not in i1):
        specials.append(Case.SPECIAL_ALPHA0)
    return RetransmissionCase(case_id, tuple(regions), tuple(specials))
