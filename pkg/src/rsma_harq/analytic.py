"""Closed-form error probabilities for the next retransmission round.

Notation used throughout: ``x = |h1|^2 ~ Exp(G1)`` and ``y = |h2|^2 ~ Exp(G2)``
are the gains of the retransmission round, ``a`` the power fraction of the
retransmitted user-1 stream, and four residual thresholds

* ``A`` (g11_1): s11 still short when decoded *with* s2 interference, i.e. ``a x / (1 + y) < A``
* ``B`` (g2_1):  s2 still short when decoded with s11 interference, ``y / (1 + a x) < B``
* ``C`` (g11_2): s11 still short after s2 was cancelled, ``a x < C``
* ``D`` (g2_2):  s2 still short after s11 was cancelled, ``y < D``

The receiver fails on a stream when no decoding order recovers it, which
gives three disjoint events

* ``T1``: both first attempts fail
* ``T2``: s2 decodes first, then s11 fails
* ``T3``: s11 decodes first, then s2 fails

so ``p11 = T1 + T2 + T3`` (user 1 also needs s2 cancelled to recover s12)
and ``p2 = T1 + T3``.  The special alpha in {0, 1} flows reuse the same events
with ``a = 1``, ``A = C = gamma1`` and ``B = D = gamma2`` where user 1 errs on
``T1 + T2`` and user 2 on ``T1 + T3``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .channel import ChannelDraw
from .rsma import SinrTriple, sinr_parts

PROB_TOL = 1e-12


class HarqKind(enum.IntEnum):
    CC = 0
    IR = 1

    @classmethod
    def parse(cls, name) -> "HarqKind":
        if isinstance(name, cls):
            return name
        return cls[str(name).upper()]


class Special(enum.IntEnum):
    ALPHA1 = 1
    ALPHA0 = 0


class ProbabilityRangeError(ArithmeticError):
    """A closed form left [0, 1] by more than the rounding tolerance."""


def exp_tail(threshold: float, mean: float) -> float:
    """``Pr{X < threshold}`` for ``X ~ Exp(mean)``; negative thresholds give 0."""
    if not mean > 0:
        raise ValueError(f"mean gain must be > 0, got {mean}")
    if threshold <= 0.0:
        return 0.0
    return -math.expm1(-threshold / mean)


# --- residual thresholds -------------------------------------------------

def residual_s11_cc(sinr: SinrTriple, alpha: float, r1: float) -> float:
    if not 0.0 < alpha <= 1.0:
        raise ValueError("s11-only residual needs 0 < alpha <= 1")
    return (2.0 ** r1 / (1.0 + sinr.s12) - (1.0 + sinr.s11)) / alpha


def residual_s11_ir(sinr: SinrTriple, alpha: float, r1: float) -> float:
    if not 0.0 < alpha <= 1.0:
        raise ValueError("s11-only residual needs 0 < alpha <= 1")
    return 2.0 ** r1 / (alpha * (1.0 + sinr.s11) * (1.0 + sinr.s12)) - 1.0 / alpha


def residual_s2_cc(sinr: SinrTriple, r2: float) -> float:
    return 2.0 ** r2 - 1.0 - sinr.s2


def residual_s2_ir(sinr: SinrTriple, r2: float) -> float:
    return 2.0 ** r2 / (1.0 + sinr.s2) - 1.0


def residual_s11(sinr: SinrTriple, alpha: float, r1: float, kind: HarqKind) -> float:
    if kind == HarqKind.CC:
        return residual_s11_cc(sinr, alpha, r1)
    return residual_s11_ir(sinr, alpha, r1)


def residual_s2(sinr: SinrTriple, r2: float, kind: HarqKind) -> float:
    if kind == HarqKind.CC:
        return residual_s2_cc(sinr, r2)
    return residual_s2_ir(sinr, r2)


@dataclass(frozen=True)
class ThresholdSet:
    g11_1: float
    g2_1: float
    g11_2: float
    g2_2: float
    c: float | None = None  # outer cut of the T1 region, only when g11_1 * g2_1 < 1
    harq_kind: HarqKind = HarqKind.CC


def region_cut(a_thr: float, b_thr: float, alpha: float) -> float:
    return (1.0 + b_thr) * a_thr / (alpha * (1.0 - a_thr * b_thr))


def joint_thresholds(draw: ChannelDraw, alpha: float, r1: float, r2: float,
                     kind: HarqKind = HarqKind.CC) -> ThresholdSet:
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"joint thresholds need 0 < alpha < 1, got {alpha}")
    a_thr, b_thr, c_thr, d_thr = joint_threshold_values(draw.g1, draw.g2, alpha, r1, r2, kind)
    cut = region_cut(a_thr, b_thr, alpha) if a_thr * b_thr < 1.0 else None
    return ThresholdSet(a_thr, b_thr, c_thr, d_thr, cut, HarqKind(kind))


def joint_threshold_values(g1, g2, alpha, r1, r2, kind):
    s11, s2, s12 = sinr_parts(g1, g2, alpha)
    clean11 = alpha * g1 / (1.0 + s12)      # s11's first copy once s2 is cancelled
    dirty2 = g2 / (1.0 + g1)                # s2's first copy under all of user 1
    if kind == HarqKind.CC:
        t = 2.0 ** r1 / (1.0 + s12) - 1.0
        return t - s11, 2.0 ** r2 - 1.0 - dirty2, t - clean11, 2.0 ** r2 - 1.0 - s2
    t = 2.0 ** r1 / (1.0 + s12)
    return (t / (1.0 + s11) - 1.0, 2.0 ** r2 / (1.0 + dirty2) - 1.0,
            t / (1.0 + clean11) - 1.0, 2.0 ** r2 / (1.0 + s2) - 1.0)


def special_thresholds(g1: float, g2: float, r1: float, r2: float,
                       which: Special, kind: HarqKind) -> tuple[float, float]:
    """``(gamma1, gamma2)`` for the alpha = 1 or alpha = 0 flows.

    For ALPHA1 user 1 sends a fresh packet while user 2 repeats with its
    buffered first copy ``g2``; ALPHA0 swaps the roles.
    """
    if which == Special.ALPHA1:
        gamma1 = 2.0 ** r1 - 1.0
        gamma2 = 2.0 ** r2 - 1.0 - g2 if kind == HarqKind.CC else 2.0 ** r2 / (1.0 + g2) - 1.0
    else:
        gamma1 = 2.0 ** r1 - 1.0 - g1 if kind == HarqKind.CC else 2.0 ** r1 / (1.0 + g1) - 1.0
        gamma2 = 2.0 ** r2 - 1.0
    return gamma1, gamma2


@dataclass(frozen=True)
class ErrorPair:
    p11: float
    p2: float

    @property
    def total(self) -> float:
        return self.p11 + self.p2

    @property
    def p1(self) -> float:
        return self.p11


# --- event probabilities -------------------------------------------------

def _t1(a_thr, b_thr, G1, G2, a):
    """``Pr{a x/(1+y) < A, y < B (1 + a x)}``."""
    if a_thr <= 0.0 or b_thr <= 0.0:
        return 0.0
    aG1 = a * G1
    u = a_thr / aG1
    v = b_thr / G2
    den_p = aG1 + a_thr * G2
    den_q = G2 + a * b_thr * G1
    P = aG1 / den_p
    Q = G2 / den_q
    out = P * -math.expm1(-u) + Q * -math.expm1(-v) + G2 * aG1 * (a_thr * b_thr - 1.0) / (den_p * den_q)
    ab = a_thr * b_thr
    if ab < 1.0:
        c = (1.0 + b_thr) * a_thr / (a * (1.0 - ab))
        out -= (1.0 - P) * math.exp(1.0 / G2 - (1.0 / G1 + a / (a_thr * G2)) * c)
        out += Q * math.exp(-v - (a * b_thr / G2 + 1.0 / G1) * c)
    return out


def _t2(b_thr, c_thr, G1, G2, a):
    """``Pr{y >= B (1 + a x), a x < C}``."""
    if c_thr <= 0.0:
        return 0.0
    bc = b_thr if b_thr > 0.0 else 0.0
    return (G2 / (G2 + a * bc * G1) * math.exp(-bc / G2)
            * -math.expm1(-c_thr * (bc / G2 + 1.0 / (a * G1))))


def _t3(a_thr, d_thr, G1, G2, a):
    """``Pr{a x/(1+y) >= A, y < D}``."""
    if d_thr <= 0.0:
        return 0.0
    ac = a_thr if a_thr > 0.0 else 0.0
    aG1 = a * G1
    return (aG1 / (aG1 + ac * G2) * math.exp(-ac / aG1)
            * -math.expm1(-d_thr * (1.0 / G2 + ac / aG1)))


def event_terms(a_thr, b_thr, c_thr, d_thr, G1, G2, a) -> tuple[float, float, float]:
    """The three disjoint failure-event probabilities ``(T1, T2, T3)``."""
    return (_t1(a_thr, b_thr, G1, G2, a), _t2(b_thr, c_thr, G1, G2, a),
            _t3(a_thr, d_thr, G1, G2, a))


def _checked(p: float) -> float:
    if not (-PROB_TOL <= p <= 1.0 + PROB_TOL) or math.isnan(p):
        raise ProbabilityRangeError(f"closed form produced {p!r}")
    return min(1.0, max(0.0, p))


def p_joint(ts: ThresholdSet, G1: float, G2: float, alpha: float) -> ErrorPair:
    """Both s11 and s2 retransmitted together."""
    if not (G1 > 0 and G2 > 0):
        raise ValueError("mean gains must be positive")
    if not 0.0 < alpha <= 1.0:
        raise ValueError(f"alpha must lie in (0, 1], got {alpha}")
    t1, t2, t3 = event_terms(ts.g11_1, ts.g2_1, ts.g11_2, ts.g2_2, G1, G2, alpha)
    return ErrorPair(_checked(t1 + t2 + t3), _checked(t1 + t3))


def p_special_gammas(gamma1: float, gamma2: float, G1: float, G2: float) -> ErrorPair:
    """Special flows from explicit ``(gamma1, gamma2)``; ``p11`` holds user 1's error."""
    if not (G1 > 0 and G2 > 0):
        raise ValueError("mean gains must be positive")
    t1, t2, t3 = event_terms(gamma1, gamma2, gamma1, gamma2, G1, G2, 1.0)
    return ErrorPair(_checked(t1 + t2), _checked(t1 + t3))


def p_special(draw: ChannelDraw, r1: float, r2: float, G1: float, G2: float,
              which: Special, kind: HarqKind = HarqKind.CC) -> ErrorPair:
    gamma1, gamma2 = special_thresholds(draw.g1, draw.g2, r1, r2, which, kind)
    return p_special_gammas(gamma1, gamma2, G1, G2)


def p_s11_only(draw: ChannelDraw, alpha: float, r1: float, G1: float,
               kind: HarqKind = HarqKind.CC) -> ErrorPair:
    """Only s11 retransmitted; user 2 recovers exactly when s11 does."""
    sinr = SinrTriple(*sinr_parts(draw.g1, draw.g2, alpha))
    p = exp_tail(residual_s11(sinr, alpha, r1, kind), G1)
    return ErrorPair(p, p)


def p_s2_only(draw: ChannelDraw, alpha: float, r2: float, G2: float,
              kind: HarqKind = HarqKind.CC) -> ErrorPair:
    """Only s2 retransmitted; s11 is already decoded."""
    sinr = SinrTriple(*sinr_parts(draw.g1, draw.g2, alpha))
    return ErrorPair(0.0, exp_tail(residual_s2(sinr, r2, kind), G2))
