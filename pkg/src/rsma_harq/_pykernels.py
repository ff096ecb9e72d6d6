"""Pure-Python hot kernels: alpha selection and per-trial HARQ state machines.

This module is the reference implementation and the import-time fallback for
the compiled ``_ckernels`` extension, which mirrors it operation for
operation (same libm calls, same evaluation order) so both backends produce
bit-identical results.  Everything here works on plain floats and ints.

Integer codes: scheme RSMA=0, NOMA=1, FDMA=2; kind CC=0, IR=1; cases follow
:class:`rsma_harq.rsma.Case`.
"""
import math

BACKEND = "python"

M64 = 0xFFFFFFFFFFFFFFFF
GOLDEN = 0x9E3779B97F4A7C15
STREAM_MUL = 0xD1B54A32D192ED03
COUNTER_MUL = 0x8CB92BA72F3D8DD7
INV_2_53 = 1.0 / 9007199254740992.0

RSMA, NOMA, FDMA = 0, 1, 2
CC, IR = 0, 1
NO_RETX, S2_ONLY, S11_ONLY, BOTH, SPECIAL_ALPHA1, SPECIAL_ALPHA0 = 0, 1, 2, 3, 4, 5

EDGE = 1e-9
NGRID = 64
NGOLD = 48
NGEO = 24
GEO_K0 = 7
NPOINTS = NGRID + 2 * NGEO
ALMOST_ONE = math.nextafter(1.0, 0.0)
INVPHI = 0.6180339887498949
MAX_ROUNDS = 4096

PENDING, DECODED, DROPPED = 0, 1, 2
N_SUMS = 14


# --- counter-based RNG ---------------------------------------------------

def mix64(z):
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & M64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & M64
    return z ^ (z >> 31)


def round_gains(seed, trial, rnd, G1, G2):
    key = mix64((seed & M64) ^ GOLDEN)
    h = mix64((key + (trial & M64) * STREAM_MUL) & M64)
    base = (rnd * 4) & M64
    h1 = mix64((h + base * COUNTER_MUL) & M64)
    h2 = mix64((h + ((base + 1) & M64) * COUNTER_MUL) & M64)
    u1 = ((h1 >> 11) + 0.5) * INV_2_53
    u2 = ((h2 >> 11) + 0.5) * INV_2_53
    return G1 * -math.log(u1), G2 * -math.log(u2)


# --- feasibility ---------------------------------------------------------

def cond_holds(which, g1, g2, a, r):
    rest = (1.0 - a) * g1
    if which == 1:
        s11 = a * g1 / (1.0 + rest + g2)
        return math.log2(1.0 + s11) + math.log2(1.0 + rest) >= r
    s2 = g2 / (1.0 + rest)
    return math.log2(1.0 + s2) >= r


def edge_search(which, g1, g2, r, good, bad, guess):
    lo_b = good if good < bad else bad
    hi_b = bad if good < bad else good
    x = guess
    if x < lo_b:
        x = lo_b
    if x > hi_b:
        x = hi_b
    if cond_holds(which, g1, g2, x, r):
        for _ in range(64):
            nxt = math.nextafter(x, bad)
            if not cond_holds(which, g1, g2, nxt, r):
                return x
            x = nxt
        lo = x
        hi = bad
    else:
        for _ in range(64):
            x = math.nextafter(x, good)
            if cond_holds(which, g1, g2, x, r):
                return x
        lo = good
        hi = x
    while True:
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            return lo
        if cond_holds(which, g1, g2, mid, r):
            lo = mid
        else:
            hi = mid


def cond_intervals(g1, g2, r1, r2):
    """``(has1, a1, has2, a2)``: cond1 holds on ``[0, a1]``, cond2 on ``[a2, 1]``."""
    has1 = cond_holds(1, g1, g2, 0.0, r1)
    a1 = 0.0
    if has1:
        if cond_holds(1, g1, g2, 1.0, r1):
            a1 = 1.0
        else:
            k = 1.0 + g1 + g2
            big_r = 2.0 ** r1
            den = g1 * (k - big_r)
            guess = 0.5
            if den != 0.0:
                guess = k * (1.0 + g1 - big_r) / den
                if not math.isfinite(guess):
                    guess = 0.5
            a1 = edge_search(1, g1, g2, r1, 0.0, 1.0, guess)
    if r2 <= 0.0:
        return has1, a1, True, 0.0
    has2 = cond_holds(2, g1, g2, 1.0, r2)
    a2 = 1.0
    if has2:
        if cond_holds(2, g1, g2, 0.0, r2):
            a2 = 0.0
        else:
            guess = 0.5
            if g1 != 0.0:
                guess = 1.0 + 1.0 / g1 - g2 / (g1 * (2.0 ** r2 - 1.0))
                if not math.isfinite(guess):
                    guess = 0.5
            a2 = edge_search(2, g1, g2, r2, 1.0, 0.0, guess)
    return has1, a1, has2, a2


# --- closed-form error probabilities ------------------------------------

def tail(th, mean):
    if th <= 0.0:
        return 0.0
    return -math.expm1(-th / mean)


def t1_term(A, B, G1, G2, a):
    if A <= 0.0 or B <= 0.0:
        return 0.0
    aG1 = a * G1
    u = A / aG1
    v = B / G2
    den_p = aG1 + A * G2
    den_q = G2 + a * B * G1
    P = aG1 / den_p
    Q = G2 / den_q
    out = P * -math.expm1(-u) + Q * -math.expm1(-v) + G2 * aG1 * (A * B - 1.0) / (den_p * den_q)
    ab = A * B
    if ab < 1.0:
        c = (1.0 + B) * A / (a * (1.0 - ab))
        out -= (1.0 - P) * math.exp(1.0 / G2 - (1.0 / G1 + a / (A * G2)) * c)
        out += Q * math.exp(-v - (a * B / G2 + 1.0 / G1) * c)
    return out


def t2_term(B, C, G1, G2, a):
    if C <= 0.0:
        return 0.0
    bc = B if B > 0.0 else 0.0
    return G2 / (G2 + a * bc * G1) * math.exp(-bc / G2) * -math.expm1(-C * (bc / G2 + 1.0 / (a * G1)))


def t3_term(A, D, G1, G2, a):
    if D <= 0.0:
        return 0.0
    ac = A if A > 0.0 else 0.0
    aG1 = a * G1
    return aG1 / (aG1 + ac * G2) * math.exp(-ac / aG1) * -math.expm1(-D * (1.0 / G2 + ac / aG1))


def clamp01(p):
    if p < 0.0:
        return 0.0
    if p > 1.0:
        return 1.0
    return p


def objective(g1, g2, a, r1, r2, G1, G2, kind, case):
    """Predicted ``(p11, p2)`` for one retransmission case at power split ``a``."""
    if case == NO_RETX:
        return 0.0, 0.0
    if case == SPECIAL_ALPHA1 or case == SPECIAL_ALPHA0:
        if case == SPECIAL_ALPHA1:
            gam1 = 2.0 ** r1 - 1.0
            if kind == CC:
                gam2 = 2.0 ** r2 - 1.0 - g2
            else:
                gam2 = 2.0 ** r2 / (1.0 + g2) - 1.0
        else:
            gam2 = 2.0 ** r2 - 1.0
            if kind == CC:
                gam1 = 2.0 ** r1 - 1.0 - g1
            else:
                gam1 = 2.0 ** r1 / (1.0 + g1) - 1.0
        t1 = t1_term(gam1, gam2, G1, G2, 1.0)
        t2 = t2_term(gam2, gam1, G1, G2, 1.0)
        t3 = t3_term(gam1, gam2, G1, G2, 1.0)
        return clamp01(t1 + t2), clamp01(t1 + t3)
    rest = (1.0 - a) * g1
    s11 = a * g1 / (1.0 + rest + g2)
    s2 = g2 / (1.0 + rest)
    if case == S2_ONLY:
        if kind == CC:
            gam = 2.0 ** r2 - 1.0 - s2
        else:
            gam = 2.0 ** r2 / (1.0 + s2) - 1.0
        return 0.0, tail(gam, G2)
    if case == S11_ONLY:
        if kind == CC:
            gam = (2.0 ** r1 / (1.0 + rest) - (1.0 + s11)) / a
        else:
            gam = 2.0 ** r1 / (a * (1.0 + s11) * (1.0 + rest)) - 1.0 / a
        p = tail(gam, G1)
        return p, p
    clean11 = a * g1 / (1.0 + rest)
    dirty2 = g2 / (1.0 + g1)
    if kind == CC:
        t = 2.0 ** r1 / (1.0 + rest) - 1.0
        A = t - s11
        B = 2.0 ** r2 - 1.0 - dirty2
        C = t - clean11
        D = 2.0 ** r2 - 1.0 - s2
    else:
        t = 2.0 ** r1 / (1.0 + rest)
        A = t / (1.0 + s11) - 1.0
        B = 2.0 ** r2 / (1.0 + dirty2) - 1.0
        C = t / (1.0 + clean11) - 1.0
        D = 2.0 ** r2 / (1.0 + s2) - 1.0
    t1 = t1_term(A, B, G1, G2, a)
    t2 = t2_term(B, C, G1, G2, a)
    t3 = t3_term(A, D, G1, G2, a)
    return clamp01(t1 + t2 + t3), clamp01(t1 + t3)


# --- alpha selection -----------------------------------------------------

def grid_point(lo, hi, width, i):
    """Point ``i`` of the sorted search grid over ``[lo, hi]``.

    The grid is ``lo``, ``NGEO`` points approaching ``lo`` geometrically
    (offsets ``width * 2^-30 .. width * 2^-7``), the interior of a uniform
    ``NGRID``-point grid, the mirrored geometric points below ``hi``, and
    ``hi``.  The geometric points catch narrow valleys at region ends.
    """
    if i <= 0:
        return lo
    if i <= NGEO:
        x = lo + math.ldexp(width, -(GEO_K0 + NGEO - i))
    elif i < NGEO + NGRID - 1:
        x = lo + width * ((i - NGEO) / (NGRID - 1.0))
    elif i < NPOINTS - 1:
        x = hi - math.ldexp(width, -(GEO_K0 + i - NGEO - NGRID + 1))
    else:
        return hi
    if x > hi:
        x = hi
    if x < lo:
        x = lo
    return x


def region_search(g1, g2, r1, r2, G1, G2, kind, case, lo, hi):
    """Minimise ``p11 + p2`` over ``[lo, hi]``: coarse grid, then golden section."""
    bx = lo
    bp1, bp2 = objective(g1, g2, lo, r1, r2, G1, G2, kind, case)
    bf = bp1 + bp2
    if hi <= lo:
        return bx, bf, bp1, bp2
    width = hi - lo
    kbest = 0
    for k in range(1, NPOINTS):
        x = grid_point(lo, hi, width, k)
        p1, p2 = objective(g1, g2, x, r1, r2, G1, G2, kind, case)
        f = p1 + p2
        if f < bf:
            bx, bf, bp1, bp2, kbest = x, f, p1, p2, k
    if bf == 0.0:
        return bx, bf, bp1, bp2
    a = grid_point(lo, hi, width, kbest - 1)
    b = grid_point(lo, hi, width, kbest + 1)
    c = b - INVPHI * (b - a)
    d = a + INVPHI * (b - a)
    pc1, pc2 = objective(g1, g2, c, r1, r2, G1, G2, kind, case)
    pd1, pd2 = objective(g1, g2, d, r1, r2, G1, G2, kind, case)
    fc = pc1 + pc2
    fd = pd1 + pd2
    if fc < bf or (fc == bf and c < bx):
        bx, bf, bp1, bp2 = c, fc, pc1, pc2
    if fd < bf or (fd == bf and d < bx):
        bx, bf, bp1, bp2 = d, fd, pd1, pd2
    for _ in range(NGOLD):
        if fc <= fd:
            b = d
            d = c
            fd = fc
            c = b - INVPHI * (b - a)
            pc1, pc2 = objective(g1, g2, c, r1, r2, G1, G2, kind, case)
            fc = pc1 + pc2
            if fc < bf or (fc == bf and c < bx):
                bx, bf, bp1, bp2 = c, fc, pc1, pc2
        else:
            a = c
            c = d
            fc = fd
            d = a + INVPHI * (b - a)
            pd1, pd2 = objective(g1, g2, d, r1, r2, G1, G2, kind, case)
            fd = pd1 + pd2
            if fd < bf or (fd == bf and d < bx):
                bx, bf, bp1, bp2 = d, fd, pd1, pd2
    return bx, bf, bp1, bp2


def select_alpha(g1, g2, r1, r2, G1, G2, kind):
    """``(alpha, case, p11, p2)`` minimising the predicted next-round error sum."""
    has1, a1, has2, a2 = cond_intervals(g1, g2, r1, r2)
    if has1 and has2 and a2 <= a1:
        return 0.5 * (a2 + a1), NO_RETX, 0.0, 0.0
    special1 = has1 and a1 == 1.0 and not has2
    special0 = has2 and a2 == 0.0 and not has1
    best_a = -1.0
    best_f = 0.0
    best_case = BOTH
    best_p1 = 0.0
    best_p2 = 0.0
    # candidates in increasing alpha so that strict '<' breaks ties toward smaller alpha
    if special0:
        p1, p2 = objective(g1, g2, 0.0, r1, r2, G1, G2, kind, SPECIAL_ALPHA0)
        best_a, best_f, best_case, best_p1, best_p2 = 0.0, p1 + p2, SPECIAL_ALPHA0, p1, p2
    if has1 and a1 > 0.0:
        x = a1
        if special1:
            x = ALMOST_ONE
        p1, p2 = objective(g1, g2, x, r1, r2, G1, G2, kind, S2_ONLY)
        f = p1 + p2
        if best_a < 0.0 or f < best_f:
            best_a, best_f, best_case, best_p1, best_p2 = x, f, S2_ONLY, p1, p2
    lo = EDGE
    if has1:
        lo = math.nextafter(a1, 2.0)
    hi = 1.0
    if has2:
        hi = math.nextafter(a2, -1.0)
    if lo <= hi and not special1:
        x, f, p1, p2 = region_search(g1, g2, r1, r2, G1, G2, kind, BOTH, lo, hi)
        if best_a < 0.0 or f < best_f:
            best_a, best_f, best_case, best_p1, best_p2 = x, f, BOTH, p1, p2
    if has2:
        lo = a2 if a2 > EDGE else EDGE
        x, f, p1, p2 = region_search(g1, g2, r1, r2, G1, G2, kind, S11_ONLY, lo, 1.0)
        if best_a < 0.0 or f < best_f:
            best_a, best_f, best_case, best_p1, best_p2 = x, f, S11_ONLY, p1, p2
    if special1:
        p1, p2 = objective(g1, g2, 1.0, r1, r2, G1, G2, kind, SPECIAL_ALPHA1)
        if p1 + p2 < best_f:
            best_a, best_f, best_case, best_p1, best_p2 = 1.0, p1 + p2, SPECIAL_ALPHA1, p1, p2
    return best_a, best_case, best_p1, best_p2


# --- HARQ state machines -------------------------------------------------

def _passes(acc, kind, offset, r):
    if kind == CC:
        return math.log2(1.0 + acc) + offset >= r
    return acc + offset >= r


def _add(acc, sinr, kind):
    if kind == CC:
        return acc + sinr
    return acc + math.log2(1.0 + sinr)


def split_cycle(kind, L, r1, r2, G1, G2, seed, trial, alpha, g1_0, g2_0, log):
    """Both users hold their packets until s11 and s2 resolve; alpha in (0, 1)."""
    rest = (1.0 - alpha) * g1_0
    r12 = math.log2(1.0 + rest)
    if r12 > r1:
        r12 = r1
    g1s = [g1_0]
    g2s = [g2_0]
    tx11 = [1]
    tx2 = [1]
    d11 = False
    d2 = False
    e1 = 1.0
    e2 = 1.0
    rnd = 0
    while True:
        # fixed-point SIC over every buffered copy
        changed = True
        while changed:
            changed = False
            if not d11:
                acc = 0.0
                for k in range(rnd + 1):
                    if tx11[k]:
                        if k == 0:
                            if d2:
                                s = alpha * g1_0 / (1.0 + rest)
                            else:
                                s = alpha * g1_0 / (1.0 + rest + g2_0)
                        elif tx2[k] and not d2:
                            s = alpha * g1s[k] / (1.0 + g2s[k])
                        else:
                            s = alpha * g1s[k] / (1.0 + 0.0)
                        acc = _add(acc, s, kind)
                if _passes(acc, kind, r12, r1):
                    d11 = True
                    changed = True
            if not d2:
                acc = 0.0
                for k in range(rnd + 1):
                    if tx2[k]:
                        if k == 0:
                            if d11:
                                s = g2_0 / (1.0 + rest)
                            else:
                                s = g2_0 / (1.0 + g1_0)
                        elif tx11[k] and not d11:
                            s = g2s[k] / (1.0 + alpha * g1s[k])
                        else:
                            s = g2s[k] / (1.0 + 0.0)
                        acc = _add(acc, s, kind)
                if _passes(acc, kind, 0.0, r2):
                    d2 = True
                    changed = True
        if log is not None:
            sent = ("s11,s12,s2" if rnd == 0 else
                    ",".join(n for n, t in (("s11", tx11[rnd]), ("s2", tx2[rnd])) if t))
            log.append("trial=%d round=%d mode=split alpha=%.17g sent=%s g1=%.17g g2=%.17g "
                       "dec11=%d dec2=%d dec12=%d e1=%.17g e2=%.17g"
                       % (trial, rnd, alpha, sent, g1s[rnd], g2s[rnd], d11, d2, d11 and d2, e1, e2))
        if (d11 and d2) or rnd >= L:
            break
        rnd += 1
        if not d11 and not d2 and rnd > 1:
            # sticky: s2 keeps the choice made at the first retransmission
            t11 = 1
            t2 = tx2[rnd - 1]
        elif not d11 and not d2:
            # first retransmission: resend s2 only if it would still fail
            # once s11 is recovered
            acc = 0.0
            for k in range(rnd):
                if tx2[k]:
                    if k == 0:
                        s = g2_0 / (1.0 + rest)
                    else:
                        s = g2s[k] / (1.0 + 0.0)
                    acc = _add(acc, s, kind)
            t11 = 1
            t2 = 0 if _passes(acc, kind, 0.0, r2) else 1
        elif not d11:
            t11, t2 = 1, 0
        else:
            t11, t2 = 0, 1
        g1k, g2k = round_gains(seed, trial, rnd, G1, G2)
        g1s.append(g1k)
        g2s.append(g2k)
        tx11.append(t11)
        tx2.append(t2)
        if t11:
            e1 += alpha
        if t2:
            e2 += 1.0
    ok1 = 1 if (d11 and d2) else 0
    ok2 = 1 if d2 else 0
    return 1, 1, 1 - ok1, 1 - ok2, e1, e2, rnd + 1, ok1, ok2


def _packet_sinr(u, k, g1s, g2s, pid1, pid2, st1, st2):
    """SINR of user ``u``'s copy in round ``k`` given current decode states."""
    if u == 1:
        q = pid2[k]
        if q >= 0 and st2[q] != DECODED:
            return g1s[k] / (1.0 + g2s[k])
        return g1s[k] / (1.0 + 0.0)
    q = pid1[k]
    if q >= 0 and st1[q] != DECODED:
        return g2s[k] / (1.0 + g1s[k])
    return g2s[k] / (1.0 + 0.0)


def _packet_ok(u, pid, start, rnd, kind, r, g1s, g2s, pid1, pid2, st1, st2):
    own = pid1 if u == 1 else pid2
    acc = 0.0
    for k in range(start, rnd + 1):
        if own[k] == pid:
            acc = _add(acc, _packet_sinr(u, k, g1s, g2s, pid1, pid2, st1, st2), kind)
    return _passes(acc, kind, 0.0, r)


def unsplit_cycle(kind, L, r1, r2, G1, G2, seed, trial, first, g1_0, g2_0, log):
    """Whole-stream SIC with decode order ``first`` (1 or 2).

    When the first packet in decoding order is decoded and the other is not,
    the first user sends a new packet alongside the retransmission.  While
    the first packet is pending nobody starts a new packet.  The trial ends
    when nothing is pending.
    """
    g1s = [g1_0]
    g2s = [g2_0]
    pid1 = [0]
    pid2 = [0]
    st1 = [PENDING]
    st2 = [PENDING]
    start1 = 0
    start2 = 0
    cur1 = 0
    cur2 = 0
    e1 = 1.0
    e2 = 1.0
    fail1 = 0
    fail2 = 0
    rnd = 0
    while True:
        changed = True
        while changed:
            changed = False
            if st1[cur1] == PENDING and _packet_ok(1, cur1, start1, rnd, kind, r1, g1s, g2s, pid1, pid2, st1, st2):
                st1[cur1] = DECODED
                changed = True
            if st2[cur2] == PENDING and _packet_ok(2, cur2, start2, rnd, kind, r2, g1s, g2s, pid1, pid2, st1, st2):
                st2[cur2] = DECODED
                changed = True
        if st1[cur1] == PENDING and rnd >= start1 + L:
            st1[cur1] = DROPPED
            fail1 += 1
        if st2[cur2] == PENDING and rnd >= start2 + L:
            st2[cur2] = DROPPED
            fail2 += 1
        if log is not None:
            sent = ",".join("u%d#%d" % (u, p) for u, p in ((1, pid1[rnd]), (2, pid2[rnd])) if p >= 0)
            log.append("trial=%d round=%d mode=unsplit first=%d sent=%s g1=%.17g g2=%.17g "
                       "state1=%d#%d state2=%d#%d e1=%.17g e2=%.17g"
                       % (trial, rnd, first, sent, g1s[rnd], g2s[rnd], cur1, st1[cur1], cur2, st2[cur2], e1, e2))
        pend1 = st1[cur1] == PENDING
        pend2 = st2[cur2] == PENDING
        if not pend1 and not pend2:
            break
        if rnd + 1 >= MAX_ROUNDS:
            if pend1:
                st1[cur1] = DROPPED
                fail1 += 1
            if pend2:
                st2[cur2] = DROPPED
                fail2 += 1
            break
        rnd += 1
        t1 = -1
        t2 = -1
        if (pend1 if first == 1 else pend2):
            # the first packet in decoding order failed: nobody starts a new
            # packet and it is resent
            send_other = 0
            if pend1 and pend2:
                # the other packet waits if cancelling the first would recover it
                if first == 1:
                    st1[cur1] = DECODED
                    ok = _packet_ok(2, cur2, start2, rnd - 1, kind, r2, g1s, g2s, pid1, pid2, st1, st2)
                    st1[cur1] = PENDING
                else:
                    st2[cur2] = DECODED
                    ok = _packet_ok(1, cur1, start1, rnd - 1, kind, r1, g1s, g2s, pid1, pid2, st1, st2)
                    st2[cur2] = PENDING
                send_other = 0 if ok else 1
            if first == 1:
                t1 = cur1
                if send_other:
                    t2 = cur2
            else:
                t2 = cur2
                if send_other:
                    t1 = cur1
        else:
            # a decoded user starts a new packet while the other retransmits
            if st1[cur1] == DECODED:
                cur1 += 1
                st1.append(PENDING)
                start1 = rnd
            if st2[cur2] == DECODED:
                cur2 += 1
                st2.append(PENDING)
                start2 = rnd
            if st1[cur1] == PENDING:
                t1 = cur1
            if st2[cur2] == PENDING:
                t2 = cur2
        g1k, g2k = round_gains(seed, trial, rnd, G1, G2)
        g1s.append(g1k)
        g2s.append(g2k)
        pid1.append(t1)
        pid2.append(t2)
        if t1 >= 0:
            e1 += 1.0
        if t2 >= 0:
            e2 += 1.0
    ok1 = 1 if st1[0] == DECODED else 0
    ok2 = 1 if st2[0] == DECODED else 0
    return cur1 + 1, cur2 + 1, fail1, fail2, e1, e2, rnd + 1, ok1, ok2


def fdma_cycle(kind, L, r1, r2, G1, G2, seed, trial, w1, log):
    """Independent per-user HARQ on bandwidth shares ``w1`` and ``1 - w1``."""
    w2 = 1.0 - w1
    acc1 = 0.0
    acc2 = 0.0
    d1 = False
    d2 = False
    e1 = 0.0
    e2 = 0.0
    rnd = 0
    while True:
        g1, g2 = round_gains(seed, trial, rnd, G1, G2)
        if not d1:
            e1 += 1.0
            if kind == CC:
                acc1 += g1
                d1 = w1 * math.log2(1.0 + acc1 / w1) >= r1
            else:
                acc1 += w1 * math.log2(1.0 + g1 / w1)
                d1 = acc1 >= r1
        if not d2:
            e2 += 1.0
            if kind == CC:
                acc2 += g2
                d2 = w2 * math.log2(1.0 + acc2 / w2) >= r2
            else:
                acc2 += w2 * math.log2(1.0 + g2 / w2)
                d2 = acc2 >= r2
        if log is not None:
            log.append("trial=%d round=%d mode=fdma w1=%.17g g1=%.17g g2=%.17g dec1=%d dec2=%d e1=%.17g e2=%.17g"
                       % (trial, rnd, w1, g1, g2, d1, d2, e1, e2))
        if (d1 and d2) or rnd >= L:
            break
        rnd += 1
    ok1 = 1 if d1 else 0
    ok2 = 1 if d2 else 0
    return 1, 1, 1 - ok1, 1 - ok2, e1, e2, rnd + 1, ok1, ok2


def trial(scheme, kind, L, r1, r2, G1, G2, seed, tr, w1, plan_kind, pin_alpha, log=None):
    """One trial: ``(pk1, pk2, fail1, fail2, e1, e2, rounds, ok1, ok2, alpha)``.

    ``ok1``/``ok2`` refer to each user's first packet.  For RSMA a negative
    ``pin_alpha`` selects alpha with ``plan_kind``; otherwise alpha is pinned
    (0 or 1 give whole-stream transmission).  NOMA uses ``pin_alpha`` as its
    decode order.
    """
    if scheme == FDMA:
        out = fdma_cycle(kind, L, r1, r2, G1, G2, seed, tr, w1, log)
        return out + (-1.0,)
    g1, g2 = round_gains(seed, tr, 0, G1, G2)
    if scheme == RSMA and pin_alpha < 0.0:
        alpha = select_alpha(g1, g2, r1, r2, G1, G2, plan_kind)[0]
    else:
        alpha = pin_alpha
    if alpha > 0.0 and alpha < 1.0:
        out = split_cycle(kind, L, r1, r2, G1, G2, seed, tr, alpha, g1, g2, log)
    else:
        out = unsplit_cycle(kind, L, r1, r2, G1, G2, seed, tr, 1 if alpha >= 1.0 else 2, g1, g2, log)
    return out + (alpha,)


def block(scheme, kind, L, r1, r2, G1, G2, seed, start, n, w1, plan_kind, pin_alpha):
    """Sums over trials ``start .. start+n-1`` in trial order.

    Returns ``[pk1, pk2, fail1, fail2, e1, e2, sumE, sumE2, sumP, sumP2,
    sumEP, alpha_sum, rounds_sum, first_fail_any]`` where E and P are a trial's
    total energy and packet count.
    """
    s = [0.0] * N_SUMS
    for tr in range(start, start + n):
        pk1, pk2, f1, f2, e1, e2, rounds, ok1, ok2, alpha = trial(
            scheme, kind, L, r1, r2, G1, G2, seed, tr, w1, plan_kind, pin_alpha)
        e = e1 + e2
        p = pk1 + pk2
        s[0] += pk1
        s[1] += pk2
        s[2] += f1
        s[3] += f2
        s[4] += e1
        s[5] += e2
        s[6] += e
        s[7] += e * e
        s[8] += p
        s[9] += p * p
        s[10] += e * p
        s[11] += alpha
        s[12] += rounds
        s[13] += 1 if (ok1 == 0 or ok2 == 0) else 0
    return s


def trial_outcomes(scheme, kind, L, r1, r2, G1, G2, seed, start, n, w1, plan_kind, pin_alpha):
    """Per-trial tuples for ``n`` consecutive trials (used by coupled tests)."""
    return [trial(scheme, kind, L, r1, r2, G1, G2, seed, tr, w1, plan_kind, pin_alpha)
            for tr in range(start, start + n)]
