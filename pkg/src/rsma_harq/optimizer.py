"""Power-split selection: minimise the predicted next-round error sum
``p11 + p2`` over the admissible alpha regions.

The production search lives in the kernels (coarse grid plus golden-section
refinement per region, see :mod:`rsma_harq._pykernels`).  This module wraps it
in a :class:`RetransmissionPlan` and provides :func:`predict_errors`, which
evaluates the same objective through the scalar formulas of
:mod:`rsma_harq.analytic`, plus a brute-force grid oracle used by the tests.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from . import kernels
from .analytic import (ErrorPair, HarqKind, Special, event_terms, joint_threshold_values,
                       joint_thresholds, p_joint, p_s2_only, p_s11_only, p_special)
from .channel import ChannelDraw
from .rsma import Case, cond1_holds, cond2_holds, region_case

EDGE = kernels.EDGE

S11 = "S11"
S2 = "S2"

_RETRANSMIT = {
    Case.NO_RETX: frozenset(),
    Case.S2_ONLY: frozenset({S2}),
    Case.S11_ONLY: frozenset({S11}),
    Case.BOTH: frozenset({S11, S2}),
    Case.SPECIAL_ALPHA1: frozenset({S2}),   # user 2 repeats while user 1 sends a new packet
    Case.SPECIAL_ALPHA0: frozenset({S11}),  # user 1 repeats its whole message
}


@dataclass(frozen=True)
class RetransmissionPlan:
    chosen_alpha: float
    retransmit_set: frozenset
    predicted_errors: ErrorPair
    case_id: Case

    @property
    def objective(self) -> float:
        return self.predicted_errors.total


def retransmit_set(case: Case) -> frozenset:
    return _RETRANSMIT[Case(case)]


def predict_errors(draw: ChannelDraw, alpha: float, r1: float, r2: float, G1: float, G2: float,
                   kind: HarqKind, region: Case) -> ErrorPair:
    """Predicted ``(p11, p2)`` after one retransmission round for ``region``."""
    kind = HarqKind(kind)
    region = Case(region)
    if region == Case.NO_RETX:
        return ErrorPair(0.0, 0.0)
    if region == Case.S2_ONLY:
        return p_s2_only(draw, alpha, r2, G2, kind)
    if region == Case.S11_ONLY:
        return p_s11_only(draw, alpha, r1, G1, kind)
    if region == Case.BOTH:
        if alpha >= 1.0:
            # whole-stream limit of the joint formulas (no s12 left)
            A, B, C, D = joint_threshold_values(draw.g1, draw.g2, 1.0, r1, r2, kind)
            t1, t2, t3 = event_terms(A, B, C, D, G1, G2, 1.0)
            return ErrorPair(min(1.0, max(0.0, t1 + t2 + t3)), min(1.0, max(0.0, t1 + t3)))
        return p_joint(joint_thresholds(draw, alpha, r1, r2, kind), G1, G2, alpha)
    if region == Case.SPECIAL_ALPHA1:
        return p_special(draw, r1, r2, G1, G2, Special.ALPHA1, kind)
    if region == Case.SPECIAL_ALPHA0:
        return p_special(draw, r1, r2, G1, G2, Special.ALPHA0, kind)
    raise ValueError(f"no prediction for {region!r}")


def select_alpha(draw: ChannelDraw, r1: float, r2: float, G1: float, G2: float,
                 kind: HarqKind = HarqKind.CC) -> RetransmissionPlan:
    alpha, case, p11, p2 = kernels.select_alpha(draw.g1, draw.g2, r1, r2, G1, G2, int(HarqKind(kind)))
    case = Case(case)
    return RetransmissionPlan(alpha, retransmit_set(case), ErrorPair(p11, p2), case)


def region_case_at(draw: ChannelDraw, alpha: float, r1: float, r2: float) -> Case:
    """retransmission case at ``alpha`` by direct evaluation of the two rate conditions."""
    c1 = cond1_holds(draw.g1, draw.g2, alpha, r1)
    c2 = r2 <= 0.0 or cond2_holds(draw.g1, draw.g2, alpha, r2)
    return region_case(c1, c2)


def region_objective(draw: ChannelDraw, alpha: float, r1: float, r2: float, G1: float, G2: float,
                     kind: HarqKind) -> float:
    """``p11 + p2`` of the region containing ``alpha``.

    Stream-split formulas are undefined at exactly ``alpha = 0``; that point
    is scored at ``EDGE`` like the optimizer does.
    """
    case = region_case_at(draw, alpha, r1, r2)
    if case in (Case.S11_ONLY, Case.BOTH) and alpha < EDGE:
        alpha = EDGE
    return predict_errors(draw, alpha, r1, r2, G1, G2, kind, case).total


def special_candidates(draw: ChannelDraw, r1: float, r2: float) -> list[Case]:
    """Special whole-stream flows whose one-stream-decoded precondition holds.

    Both feasible sets are intervals anchored at opposite ends of [0, 1], so
    "user 1 decodes at alpha = 1 while user 2 does not" is read off the case
    at alpha = 1 alone (and symmetrically at alpha = 0).
    """
    out = []
    if region_case_at(draw, 1.0, r1, r2) == Case.S2_ONLY:
        out.append(Case.SPECIAL_ALPHA1)
    if region_case_at(draw, 0.0, r1, r2) == Case.S11_ONLY:
        out.append(Case.SPECIAL_ALPHA0)
    return out


def grid_minimum(draw: ChannelDraw, r1: float, r2: float, G1: float, G2: float,
                 kind: HarqKind, step: float = 1e-3) -> tuple[float, float]:
    """Brute-force ``(alpha, objective)`` over an alpha grid plus the special flows."""
    n = int(round(1.0 / step))
    best_a, best_f = math.nan, math.inf
    for k in range(n + 1):
        a = k / n
        f = region_objective(draw, a, r1, r2, G1, G2, kind)
        if f < best_f:
            best_a, best_f = a, f
    for case in special_candidates(draw, r1, r2):
        a = 1.0 if case == Case.SPECIAL_ALPHA1 else 0.0
        f = predict_errors(draw, a, r1, r2, G1, G2, kind, case).total
        if f < best_f:
            best_a, best_f = a, f
    return best_a, best_f
