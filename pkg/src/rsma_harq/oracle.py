"""Independent numerical references for the closed-form error probabilities.

Both oracles work from the literal event definitions rather than from the
algebra in :mod:`rsma_harq.analytic`:

* :func:`quadrature_oracle` integrates over ``x`` with the ``y``-probability of
  each event written as an exponential CDF difference (the inner integral is
  analytic; the outer one is adaptive Gauss-Kronrod from scipy).
* :func:`mc_oracle` draws paired exponentials and counts the events.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .analytic import ErrorPair, HarqKind, Special, joint_threshold_values, special_thresholds


class OracleConvergenceError(RuntimeError):
    pass


@dataclass(frozen=True)
class EventParams:
    """Event thresholds ``A, B, C, D`` with stream power ``a`` and mean gains."""

    A: float
    B: float
    C: float
    D: float
    G1: float
    G2: float
    a: float = 1.0
    special: bool = False  # user 1 errs on T1+T2 instead of T1+T2+T3

    @classmethod
    def joint(cls, g1, g2, alpha, r1, r2, kind, G1, G2) -> "EventParams":
        A, B, C, D = joint_threshold_values(g1, g2, alpha, r1, r2, HarqKind(kind))
        return cls(A, B, C, D, G1, G2, alpha)

    @classmethod
    def from_special(cls, g1, g2, r1, r2, which, kind, G1, G2) -> "EventParams":
        gam1, gam2 = special_thresholds(g1, g2, r1, r2, Special(which), HarqKind(kind))
        return cls.from_gammas(gam1, gam2, G1, G2)

    @classmethod
    def from_gammas(cls, gamma1, gamma2, G1, G2) -> "EventParams":
        return cls(gamma1, gamma2, gamma1, gamma2, G1, G2, 1.0, special=True)

    def combine(self, t1: float, t2: float, t3: float) -> ErrorPair:
        if self.special:
            return ErrorPair(t1 + t2, t1 + t3)
        return ErrorPair(t1 + t2 + t3, t1 + t3)


def _ycdf(lo, hi, G2):
    """``Pr{lo < y < hi}`` for ``y ~ Exp(G2)``."""
    lo = max(lo, 0.0)
    if hi <= lo:
        return 0.0
    return math.exp(-lo / G2) - (math.exp(-hi / G2) if math.isfinite(hi) else 0.0)


def _inner(ep: EventParams, x: float, which: int) -> float:
    ax = ep.a * x
    if which == 1:  # a x/(1+y) < A  and  y/(1+a x) < B
        if ep.A <= 0.0 or ep.B <= 0.0:
            return 0.0
        return _ycdf(ax / ep.A - 1.0, ep.B * (1.0 + ax), ep.G2)
    if which == 2:  # y/(1+a x) >= B  and  a x < C
        if not ax < ep.C:
            return 0.0
        return _ycdf(ep.B * (1.0 + ax), math.inf, ep.G2)
    # a x/(1+y) >= A  and  y < D
    hi = ep.D if ep.A <= 0.0 else min(ep.D, ax / ep.A - 1.0)
    return _ycdf(0.0, hi, ep.G2)


def _breakpoints(ep: EventParams) -> list[float]:
    pts = []
    a = ep.a
    if ep.A > 0:
        pts.append(ep.A / a)
        if ep.D > 0:
            pts.append(ep.A * (1.0 + ep.D) / a)
        if ep.B > 0 and ep.A * ep.B < 1.0:
            pts.append((1.0 + ep.B) * ep.A / (a * (1.0 - ep.A * ep.B)))
    if ep.C > 0:
        pts.append(ep.C / a)
    return sorted(p for p in set(pts) if math.isfinite(p) and p > 0)


def _integrate_term(ep: EventParams, which: int, epsabs: float, epsrel: float) -> tuple[float, float]:
    f1 = lambda x: _inner(ep, x, which) * math.exp(-x / ep.G1) / ep.G1  # noqa: E731
    edges = [0.0] + _breakpoints(ep)
    total, err = 0.0, 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        for lo, hi in zip(edges, edges[1:] + [math.inf]):
            try:
                val, e = integrate.quad(f1, lo, hi, epsabs=epsabs, epsrel=epsrel, limit=400)
            except integrate.IntegrationWarning as exc:
                raise OracleConvergenceError(f"term T{which} on [{lo}, {hi}]: {exc}") from exc
            total += val
            err += e
    return total, err


def quadrature_terms(ep: EventParams, epsabs: float = 1e-17, epsrel: float = 1e-11):
    """``((T1, T2, T3), abs_error_estimate)`` by one-dimensional quadrature."""
    vals, errs = zip(*(_integrate_term(ep, k, epsabs, epsrel) for k in (1, 2, 3)))
    return tuple(vals), sum(errs)


def quadrature_oracle(ep: EventParams, epsabs: float = 1e-17, epsrel: float = 1e-11) -> ErrorPair:
    terms, _ = quadrature_terms(ep, epsabs, epsrel)
    return ep.combine(*terms)


@dataclass(frozen=True)
class McResult:
    pair: ErrorPair
    n: int
    counts: tuple[int, int]


def mc_event_counts(ep: EventParams, x: np.ndarray, y: np.ndarray) -> tuple[int, int]:
    """Count user-1 and user-2 failures over gain samples ``(x, y)``.

    A stream is recovered when it decodes on the first attempt under the
    other stream's interference, or cleanly after the other stream was
    recovered that way.
    """
    ax = ep.a * x
    first11 = ax >= ep.A * (1.0 + y)
    first2 = y >= ep.B * (1.0 + ax)
    ok11 = first11 | (first2 & (ax >= ep.C))
    ok2 = first2 | (first11 & (y >= ep.D))
    fail1 = ~ok11 if ep.special else ~(ok11 & ok2)
    return int(fail1.sum()), int((~ok2).sum())


def mc_oracle(ep: EventParams, n: int = 1_000_000, seed: int = 0, chunk: int = 1 << 20) -> McResult:
    rng = np.random.default_rng(seed)
    c1 = c2 = 0
    done = 0
    while done < n:
        m = min(chunk, n - done)
        x = rng.exponential(ep.G1, m)
        y = rng.exponential(ep.G2, m)
        k1, k2 = mc_event_counts(ep, x, y)
        c1 += k1
        c2 += k2
        done += m
    return McResult(ErrorPair(c1 / n, c2 / n), n, (c1, c2))


def binomial_z(p_hat: float, p: float, n: int) -> float:
    """z-score of an observed frequency against ``p``; degenerate ``p`` needs an exact match."""
    p = min(1.0, max(0.0, p))
    if p == 0.0 or p == 1.0:
        return 0.0 if p_hat == p else math.inf
    return (p_hat - p) / math.sqrt(p * (1.0 - p) / n)
