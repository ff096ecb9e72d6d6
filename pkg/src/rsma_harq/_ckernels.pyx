# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled mirror of :mod:`rsma_harq._pykernels`.

Every function follows the Python reference statement by statement so that
both backends agree bit for bit (the extension is built without fused
multiply-add contraction or fast-math).
"""
from libc.math cimport log, log2, exp, expm1, pow, nextafter, isfinite, ldexp
from libc.stdlib cimport malloc, free
from libc.stdint cimport uint64_t, int64_t

BACKEND = "cython"

cdef uint64_t GOLDEN = 0x9E3779B97F4A7C15ULL
cdef uint64_t STREAM_MUL = 0xD1B54A32D192ED03ULL
cdef uint64_t COUNTER_MUL = 0x8CB92BA72F3D8DD7ULL
cdef double INV_2_53 = 1.0 / 9007199254740992.0

DEF C_RSMA = 0
DEF C_NOMA = 1
DEF C_FDMA = 2
DEF C_CC = 0
DEF C_IR = 1
DEF C_NO_RETX = 0
DEF C_S2_ONLY = 1
DEF C_S11_ONLY = 2
DEF C_BOTH = 3
DEF C_SPECIAL_ALPHA1 = 4
DEF C_SPECIAL_ALPHA0 = 5
DEF C_PENDING = 0
DEF C_DECODED = 1
DEF C_DROPPED = 2
DEF C_NGRID = 64
DEF C_NGOLD = 48
DEF C_NGEO = 24
DEF C_GEO_K0 = 7
DEF C_NPOINTS = C_NGRID + 2 * C_NGEO
DEF C_MAX_ROUNDS = 4096
DEF C_N_SUMS = 14

cdef double EDGE = 1e-9
cdef double INVPHI = 0.6180339887498949

EDGE_VALUE = EDGE
NGRID = C_NGRID
NGOLD = C_NGOLD
MAX_ROUNDS = C_MAX_ROUNDS
N_SUMS = C_N_SUMS


# --- counter-based RNG ---------------------------------------------------

cdef inline uint64_t mix64(uint64_t z) nogil:
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL
    return z ^ (z >> 31)


cdef inline void c_round_gains(uint64_t seed, uint64_t tr, uint64_t rnd, double G1, double G2,
                               double* g1, double* g2) nogil:
    cdef uint64_t key = mix64(seed ^ GOLDEN)
    cdef uint64_t h = mix64(key + tr * STREAM_MUL)
    cdef uint64_t base = rnd * 4
    cdef uint64_t h1 = mix64(h + base * COUNTER_MUL)
    cdef uint64_t h2 = mix64(h + (base + 1) * COUNTER_MUL)
    cdef double u1 = (<double>(h1 >> 11) + 0.5) * INV_2_53
    cdef double u2 = (<double>(h2 >> 11) + 0.5) * INV_2_53
    g1[0] = G1 * -log(u1)
    g2[0] = G2 * -log(u2)


def round_gains(seed, trial, rnd, double G1, double G2):
    cdef double g1, g2
    c_round_gains(<uint64_t>(seed & 0xFFFFFFFFFFFFFFFF), <uint64_t>(trial & 0xFFFFFFFFFFFFFFFF),
                  <uint64_t>rnd, G1, G2, &g1, &g2)
    return g1, g2


# --- feasibility ---------------------------------------------------------

cdef inline bint cond_holds(int which, double g1, double g2, double a, double r) nogil:
    cdef double rest = (1.0 - a) * g1
    cdef double s11, s2
    if which == 1:
        s11 = a * g1 / (1.0 + rest + g2)
        return log2(1.0 + s11) + log2(1.0 + rest) >= r
    s2 = g2 / (1.0 + rest)
    return log2(1.0 + s2) >= r


cdef double edge_search(int which, double g1, double g2, double r, double good, double bad, double guess) nogil:
    cdef double lo_b = good if good < bad else bad
    cdef double hi_b = bad if good < bad else good
    cdef double x = guess
    cdef double nxt, lo, hi, mid
    cdef int i
    if x < lo_b:
        x = lo_b
    if x > hi_b:
        x = hi_b
    if cond_holds(which, g1, g2, x, r):
        for i in range(64):
            nxt = nextafter(x, bad)
            if not cond_holds(which, g1, g2, nxt, r):
                return x
            x = nxt
        lo = x
        hi = bad
    else:
        for i in range(64):
            x = nextafter(x, good)
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


cdef void c_cond_intervals(double g1, double g2, double r1, double r2,
                           bint* has1, double* a1, bint* has2, double* a2) nogil:
    cdef double k, big_r, den, guess
    has1[0] = cond_holds(1, g1, g2, 0.0, r1)
    a1[0] = 0.0
    if has1[0]:
        if cond_holds(1, g1, g2, 1.0, r1):
            a1[0] = 1.0
        else:
            k = 1.0 + g1 + g2
            big_r = pow(2.0, r1)
            den = g1 * (k - big_r)
            guess = 0.5
            if den != 0.0:
                guess = k * (1.0 + g1 - big_r) / den
                if not isfinite(guess):
                    guess = 0.5
            a1[0] = edge_search(1, g1, g2, r1, 0.0, 1.0, guess)
    if r2 <= 0.0:
        has2[0] = True
        a2[0] = 0.0
        return
    has2[0] = cond_holds(2, g1, g2, 1.0, r2)
    a2[0] = 1.0
    if has2[0]:
        if cond_holds(2, g1, g2, 0.0, r2):
            a2[0] = 0.0
        else:
            guess = 0.5
            if g1 != 0.0:
                guess = 1.0 + 1.0 / g1 - g2 / (g1 * (pow(2.0, r2) - 1.0))
                if not isfinite(guess):
                    guess = 0.5
            a2[0] = edge_search(2, g1, g2, r2, 1.0, 0.0, guess)


def cond_intervals(double g1, double g2, double r1, double r2):
    cdef bint has1, has2
    cdef double a1, a2
    c_cond_intervals(g1, g2, r1, r2, &has1, &a1, &has2, &a2)
    return bool(has1), a1, bool(has2), a2


# --- closed-form error probabilities ------------------------------------

cdef inline double tail(double th, double mean) nogil:
    if th <= 0.0:
        return 0.0
    return -expm1(-th / mean)


cdef double t1_term(double A, double B, double G1, double G2, double a) nogil:
    cdef double aG1, u, v, den_p, den_q, P, Q, out, ab, c
    if A <= 0.0 or B <= 0.0:
        return 0.0
    aG1 = a * G1
    u = A / aG1
    v = B / G2
    den_p = aG1 + A * G2
    den_q = G2 + a * B * G1
    P = aG1 / den_p
    Q = G2 / den_q
    out = P * -expm1(-u) + Q * -expm1(-v) + G2 * aG1 * (A * B - 1.0) / (den_p * den_q)
    ab = A * B
    if ab < 1.0:
        c = (1.0 + B) * A / (a * (1.0 - ab))
        out -= (1.0 - P) * exp(1.0 / G2 - (1.0 / G1 + a / (A * G2)) * c)
        out += Q * exp(-v - (a * B / G2 + 1.0 / G1) * c)
    return out


cdef double t2_term(double B, double C, double G1, double G2, double a) nogil:
    cdef double bc
    if C <= 0.0:
        return 0.0
    bc = B if B > 0.0 else 0.0
    return G2 / (G2 + a * bc * G1) * exp(-bc / G2) * -expm1(-C * (bc / G2 + 1.0 / (a * G1)))


cdef double t3_term(double A, double D, double G1, double G2, double a) nogil:
    cdef double ac, aG1
    if D <= 0.0:
        return 0.0
    ac = A if A > 0.0 else 0.0
    aG1 = a * G1
    return aG1 / (aG1 + ac * G2) * exp(-ac / aG1) * -expm1(-D * (1.0 / G2 + ac / aG1))


cdef inline double clamp01(double p) nogil:
    if p < 0.0:
        return 0.0
    if p > 1.0:
        return 1.0
    return p


cdef void c_objective(double g1, double g2, double a, double r1, double r2, double G1, double G2,
                      int kind, int case, double* p11, double* p2) nogil:
    cdef double gam1, gam2, t1, t2, t3, rest, s11, s2, gam, p, clean11, dirty2, t, A, B, C, D
    if case == C_NO_RETX:
        p11[0] = 0.0
        p2[0] = 0.0
        return
    if case == C_SPECIAL_ALPHA1 or case == C_SPECIAL_ALPHA0:
        if case == C_SPECIAL_ALPHA1:
            gam1 = pow(2.0, r1) - 1.0
            if kind == C_CC:
                gam2 = pow(2.0, r2) - 1.0 - g2
            else:
                gam2 = pow(2.0, r2) / (1.0 + g2) - 1.0
        else:
            gam2 = pow(2.0, r2) - 1.0
            if kind == C_CC:
                gam1 = pow(2.0, r1) - 1.0 - g1
            else:
                gam1 = pow(2.0, r1) / (1.0 + g1) - 1.0
        t1 = t1_term(gam1, gam2, G1, G2, 1.0)
        t2 = t2_term(gam2, gam1, G1, G2, 1.0)
        t3 = t3_term(gam1, gam2, G1, G2, 1.0)
        p11[0] = clamp01(t1 + t2)
        p2[0] = clamp01(t1 + t3)
        return
    rest = (1.0 - a) * g1
    s11 = a * g1 / (1.0 + rest + g2)
    s2 = g2 / (1.0 + rest)
    if case == C_S2_ONLY:
        if kind == C_CC:
            gam = pow(2.0, r2) - 1.0 - s2
        else:
            gam = pow(2.0, r2) / (1.0 + s2) - 1.0
        p11[0] = 0.0
        p2[0] = tail(gam, G2)
        return
    if case == C_S11_ONLY:
        if kind == C_CC:
            gam = (pow(2.0, r1) / (1.0 + rest) - (1.0 + s11)) / a
        else:
            gam = pow(2.0, r1) / (a * (1.0 + s11) * (1.0 + rest)) - 1.0 / a
        p = tail(gam, G1)
        p11[0] = p
        p2[0] = p
        return
    clean11 = a * g1 / (1.0 + rest)
    dirty2 = g2 / (1.0 + g1)
    if kind == C_CC:
        t = pow(2.0, r1) / (1.0 + rest) - 1.0
        A = t - s11
        B = pow(2.0, r2) - 1.0 - dirty2
        C = t - clean11
        D = pow(2.0, r2) - 1.0 - s2
    else:
        t = pow(2.0, r1) / (1.0 + rest)
        A = t / (1.0 + s11) - 1.0
        B = pow(2.0, r2) / (1.0 + dirty2) - 1.0
        C = t / (1.0 + clean11) - 1.0
        D = pow(2.0, r2) / (1.0 + s2) - 1.0
    t1 = t1_term(A, B, G1, G2, a)
    t2 = t2_term(B, C, G1, G2, a)
    t3 = t3_term(A, D, G1, G2, a)
    p11[0] = clamp01(t1 + t2 + t3)
    p2[0] = clamp01(t1 + t3)


def objective(double g1, double g2, double a, double r1, double r2, double G1, double G2, int kind, int case):
    cdef double p11, p2
    c_objective(g1, g2, a, r1, r2, G1, G2, kind, case, &p11, &p2)
    return p11, p2


# --- alpha selection -----------------------------------------------------

cdef inline double grid_point(double lo, double hi, double width, int i) nogil:
    cdef double x
    if i <= 0:
        return lo
    if i <= C_NGEO:
        x = lo + ldexp(width, -(C_GEO_K0 + C_NGEO - i))
    elif i < C_NGEO + C_NGRID - 1:
        x = lo + width * ((i - C_NGEO) / (C_NGRID - 1.0))
    elif i < C_NPOINTS - 1:
        x = hi - ldexp(width, -(C_GEO_K0 + i - C_NGEO - C_NGRID + 1))
    else:
        return hi
    if x > hi:
        x = hi
    if x < lo:
        x = lo
    return x


cdef void region_search(double g1, double g2, double r1, double r2, double G1, double G2, int kind, int case,
                        double lo, double hi, double* ox, double* of, double* op1, double* op2) nogil:
    cdef double bx = lo
    cdef double bp1, bp2, bf, width, x, p1, p2, f, a, b, c, d, pc1, pc2, pd1, pd2, fc, fd
    cdef int k, kbest, i
    c_objective(g1, g2, lo, r1, r2, G1, G2, kind, case, &bp1, &bp2)
    bf = bp1 + bp2
    if hi <= lo:
        ox[0] = bx; of[0] = bf; op1[0] = bp1; op2[0] = bp2
        return
    width = hi - lo
    kbest = 0
    for k in range(1, C_NPOINTS):
        x = grid_point(lo, hi, width, k)
        c_objective(g1, g2, x, r1, r2, G1, G2, kind, case, &p1, &p2)
        f = p1 + p2
        if f < bf:
            bx = x; bf = f; bp1 = p1; bp2 = p2; kbest = k
    if bf == 0.0:
        ox[0] = bx; of[0] = bf; op1[0] = bp1; op2[0] = bp2
        return
    a = grid_point(lo, hi, width, kbest - 1)
    b = grid_point(lo, hi, width, kbest + 1)
    c = b - INVPHI * (b - a)
    d = a + INVPHI * (b - a)
    c_objective(g1, g2, c, r1, r2, G1, G2, kind, case, &pc1, &pc2)
    c_objective(g1, g2, d, r1, r2, G1, G2, kind, case, &pd1, &pd2)
    fc = pc1 + pc2
    fd = pd1 + pd2
    if fc < bf or (fc == bf and c < bx):
        bx = c; bf = fc; bp1 = pc1; bp2 = pc2
    if fd < bf or (fd == bf and d < bx):
        bx = d; bf = fd; bp1 = pd1; bp2 = pd2
    for i in range(C_NGOLD):
        if fc <= fd:
            b = d
            d = c
            fd = fc
            c = b - INVPHI * (b - a)
            c_objective(g1, g2, c, r1, r2, G1, G2, kind, case, &pc1, &pc2)
            fc = pc1 + pc2
            if fc < bf or (fc == bf and c < bx):
                bx = c; bf = fc; bp1 = pc1; bp2 = pc2
        else:
            a = c
            c = d
            fc = fd
            d = a + INVPHI * (b - a)
            c_objective(g1, g2, d, r1, r2, G1, G2, kind, case, &pd1, &pd2)
            fd = pd1 + pd2
            if fd < bf or (fd == bf and d < bx):
                bx = d; bf = fd; bp1 = pd1; bp2 = pd2
    ox[0] = bx; of[0] = bf; op1[0] = bp1; op2[0] = bp2


cdef void c_select_alpha(double g1, double g2, double r1, double r2, double G1, double G2, int kind,
                         double* oa, int* ocase, double* op1, double* op2) nogil:
    cdef bint has1, has2, special1, special0
    cdef double a1, a2, best_a, best_f, best_p1, best_p2, p1, p2, f, x, lo, hi
    cdef int best_case
    c_cond_intervals(g1, g2, r1, r2, &has1, &a1, &has2, &a2)
    if has1 and has2 and a2 <= a1:
        oa[0] = 0.5 * (a2 + a1); ocase[0] = C_NO_RETX; op1[0] = 0.0; op2[0] = 0.0
        return
    special1 = has1 and a1 == 1.0 and not has2
    special0 = has2 and a2 == 0.0 and not has1
    best_a = -1.0
    best_f = 0.0
    best_case = C_BOTH
    best_p1 = 0.0
    best_p2 = 0.0
    if special0:
        c_objective(g1, g2, 0.0, r1, r2, G1, G2, kind, C_SPECIAL_ALPHA0, &p1, &p2)
        best_a = 0.0; best_f = p1 + p2; best_case = C_SPECIAL_ALPHA0; best_p1 = p1; best_p2 = p2
    if has1 and a1 > 0.0:
        x = a1
        if special1:
            x = nextafter(1.0, 0.0)
        c_objective(g1, g2, x, r1, r2, G1, G2, kind, C_S2_ONLY, &p1, &p2)
        f = p1 + p2
        if best_a < 0.0 or f < best_f:
            best_a = x; best_f = f; best_case = C_S2_ONLY; best_p1 = p1; best_p2 = p2
    lo = EDGE
    if has1:
        lo = nextafter(a1, 2.0)
    hi = 1.0
    if has2:
        hi = nextafter(a2, -1.0)
    if lo <= hi and not special1:
        region_search(g1, g2, r1, r2, G1, G2, kind, C_BOTH, lo, hi, &x, &f, &p1, &p2)
        if best_a < 0.0 or f < best_f:
            best_a = x; best_f = f; best_case = C_BOTH; best_p1 = p1; best_p2 = p2
    if has2:
        lo = a2 if a2 > EDGE else EDGE
        region_search(g1, g2, r1, r2, G1, G2, kind, C_S11_ONLY, lo, 1.0, &x, &f, &p1, &p2)
        if best_a < 0.0 or f < best_f:
            best_a = x; best_f = f; best_case = C_S11_ONLY; best_p1 = p1; best_p2 = p2
    if special1:
        c_objective(g1, g2, 1.0, r1, r2, G1, G2, kind, C_SPECIAL_ALPHA1, &p1, &p2)
        if p1 + p2 < best_f:
            best_a = 1.0; best_f = p1 + p2; best_case = C_SPECIAL_ALPHA1; best_p1 = p1; best_p2 = p2
    oa[0] = best_a; ocase[0] = best_case; op1[0] = best_p1; op2[0] = best_p2


def select_alpha(double g1, double g2, double r1, double r2, double G1, double G2, int kind):
    cdef double a, p1, p2
    cdef int case
    c_select_alpha(g1, g2, r1, r2, G1, G2, kind, &a, &case, &p1, &p2)
    return a, case, p1, p2


# --- HARQ state machines -------------------------------------------------

cdef inline bint passes(double acc, int kind, double offset, double r) nogil:
    if kind == C_CC:
        return log2(1.0 + acc) + offset >= r
    return acc + offset >= r


cdef inline double add_copy(double acc, double sinr, int kind) nogil:
    if kind == C_CC:
        return acc + sinr
    return acc + log2(1.0 + sinr)


cdef struct Outcome:
    int64_t pk1
    int64_t pk2
    int64_t fail1
    int64_t fail2
    double e1
    double e2
    int64_t rounds
    int ok1
    int ok2
    double alpha


cdef struct Work:
    double* g1s
    double* g2s
    int* ta
    int* tb
    int* st1
    int* st2


cdef void split_cycle(int kind, int L, double r1, double r2, double G1, double G2, uint64_t seed, uint64_t tr,
                      double alpha, double g1_0, double g2_0, Work* w, Outcome* out) nogil:
    cdef double rest = (1.0 - alpha) * g1_0
    cdef double r12 = log2(1.0 + rest)
    cdef bint d11 = False
    cdef bint d2 = False
    cdef bint changed
    cdef double e1 = 1.0
    cdef double e2 = 1.0
    cdef double acc, s, g1k, g2k
    cdef int rnd = 0
    cdef int k, t11, t2
    cdef double* g1s = w.g1s
    cdef double* g2s = w.g2s
    cdef int* tx11 = w.ta
    cdef int* tx2 = w.tb
    if r12 > r1:
        r12 = r1
    g1s[0] = g1_0
    g2s[0] = g2_0
    tx11[0] = 1
    tx2[0] = 1
    while True:
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
                        acc = add_copy(acc, s, kind)
                if passes(acc, kind, r12, r1):
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
                        acc = add_copy(acc, s, kind)
                if passes(acc, kind, 0.0, r2):
                    d2 = True
                    changed = True
        if (d11 and d2) or rnd >= L:
            break
        rnd += 1
        if not d11 and not d2 and rnd > 1:
            t11 = 1
            t2 = tx2[rnd - 1]
        elif not d11 and not d2:
            acc = 0.0
            for k in range(rnd):
                if tx2[k]:
                    if k == 0:
                        s = g2_0 / (1.0 + rest)
                    else:
                        s = g2s[k] / (1.0 + 0.0)
                    acc = add_copy(acc, s, kind)
            t11 = 1
            t2 = 0 if passes(acc, kind, 0.0, r2) else 1
        elif not d11:
            t11 = 1
            t2 = 0
        else:
            t11 = 0
            t2 = 1
        c_round_gains(seed, tr, <uint64_t>rnd, G1, G2, &g1k, &g2k)
        g1s[rnd] = g1k
        g2s[rnd] = g2k
        tx11[rnd] = t11
        tx2[rnd] = t2
        if t11:
            e1 += alpha
        if t2:
            e2 += 1.0
    out.pk1 = 1
    out.pk2 = 1
    out.ok1 = 1 if (d11 and d2) else 0
    out.ok2 = 1 if d2 else 0
    out.fail1 = 1 - out.ok1
    out.fail2 = 1 - out.ok2
    out.e1 = e1
    out.e2 = e2
    out.rounds = rnd + 1


cdef inline double packet_sinr(int u, int k, Work* w) nogil:
    cdef int q
    if u == 1:
        q = w.tb[k]
        if q >= 0 and w.st2[q] != C_DECODED:
            return w.g1s[k] / (1.0 + w.g2s[k])
        return w.g1s[k] / (1.0 + 0.0)
    q = w.ta[k]
    if q >= 0 and w.st1[q] != C_DECODED:
        return w.g2s[k] / (1.0 + w.g1s[k])
    return w.g2s[k] / (1.0 + 0.0)


cdef bint packet_ok(int u, int pid, int start, int rnd, int kind, double r, Work* w) nogil:
    cdef int* own = w.ta if u == 1 else w.tb
    cdef double acc = 0.0
    cdef int k
    for k in range(start, rnd + 1):
        if own[k] == pid:
            acc = add_copy(acc, packet_sinr(u, k, w), kind)
    return passes(acc, kind, 0.0, r)


cdef void unsplit_cycle(int kind, int L, double r1, double r2, double G1, double G2, uint64_t seed, uint64_t tr,
                        int first, double g1_0, double g2_0, Work* w, Outcome* out) nogil:
    cdef int start1 = 0
    cdef int start2 = 0
    cdef int cur1 = 0
    cdef int cur2 = 0
    cdef double e1 = 1.0
    cdef double e2 = 1.0
    cdef int64_t fail1 = 0
    cdef int64_t fail2 = 0
    cdef int rnd = 0
    cdef bint changed, pend1, pend2, send_other, ok
    cdef int t1, t2
    cdef double g1k, g2k
    w.g1s[0] = g1_0
    w.g2s[0] = g2_0
    w.ta[0] = 0
    w.tb[0] = 0
    w.st1[0] = C_PENDING
    w.st2[0] = C_PENDING
    while True:
        changed = True
        while changed:
            changed = False
            if w.st1[cur1] == C_PENDING and packet_ok(1, cur1, start1, rnd, kind, r1, w):
                w.st1[cur1] = C_DECODED
                changed = True
            if w.st2[cur2] == C_PENDING and packet_ok(2, cur2, start2, rnd, kind, r2, w):
                w.st2[cur2] = C_DECODED
                changed = True
        if w.st1[cur1] == C_PENDING and rnd >= start1 + L:
            w.st1[cur1] = C_DROPPED
            fail1 += 1
        if w.st2[cur2] == C_PENDING and rnd >= start2 + L:
            w.st2[cur2] = C_DROPPED
            fail2 += 1
        pend1 = w.st1[cur1] == C_PENDING
        pend2 = w.st2[cur2] == C_PENDING
        if not pend1 and not pend2:
            break
        if rnd + 1 >= C_MAX_ROUNDS:
            if pend1:
                w.st1[cur1] = C_DROPPED
                fail1 += 1
            if pend2:
                w.st2[cur2] = C_DROPPED
                fail2 += 1
            break
        rnd += 1
        t1 = -1
        t2 = -1
        if (pend1 if first == 1 else pend2):
            send_other = False
            if pend1 and pend2:
                if first == 1:
                    w.st1[cur1] = C_DECODED
                    ok = packet_ok(2, cur2, start2, rnd - 1, kind, r2, w)
                    w.st1[cur1] = C_PENDING
                else:
                    w.st2[cur2] = C_DECODED
                    ok = packet_ok(1, cur1, start1, rnd - 1, kind, r1, w)
                    w.st2[cur2] = C_PENDING
                send_other = not ok
            if first == 1:
                t1 = cur1
                if send_other:
                    t2 = cur2
            else:
                t2 = cur2
                if send_other:
                    t1 = cur1
        else:
            if w.st1[cur1] == C_DECODED:
                cur1 += 1
                w.st1[cur1] = C_PENDING
                start1 = rnd
            if w.st2[cur2] == C_DECODED:
                cur2 += 1
                w.st2[cur2] = C_PENDING
                start2 = rnd
            if w.st1[cur1] == C_PENDING:
                t1 = cur1
            if w.st2[cur2] == C_PENDING:
                t2 = cur2
        c_round_gains(seed, tr, <uint64_t>rnd, G1, G2, &g1k, &g2k)
        w.g1s[rnd] = g1k
        w.g2s[rnd] = g2k
        w.ta[rnd] = t1
        w.tb[rnd] = t2
        if t1 >= 0:
            e1 += 1.0
        if t2 >= 0:
            e2 += 1.0
    out.pk1 = cur1 + 1
    out.pk2 = cur2 + 1
    out.fail1 = fail1
    out.fail2 = fail2
    out.e1 = e1
    out.e2 = e2
    out.rounds = rnd + 1
    out.ok1 = 1 if w.st1[0] == C_DECODED else 0
    out.ok2 = 1 if w.st2[0] == C_DECODED else 0


cdef void fdma_cycle(int kind, int L, double r1, double r2, double G1, double G2, uint64_t seed, uint64_t tr,
                     double w1, Outcome* out) nogil:
    cdef double w2 = 1.0 - w1
    cdef double acc1 = 0.0
    cdef double acc2 = 0.0
    cdef bint d1 = False
    cdef bint d2 = False
    cdef double e1 = 0.0
    cdef double e2 = 0.0
    cdef int rnd = 0
    cdef double g1, g2
    while True:
        c_round_gains(seed, tr, <uint64_t>rnd, G1, G2, &g1, &g2)
        if not d1:
            e1 += 1.0
            if kind == C_CC:
                acc1 += g1
                d1 = w1 * log2(1.0 + acc1 / w1) >= r1
            else:
                acc1 += w1 * log2(1.0 + g1 / w1)
                d1 = acc1 >= r1
        if not d2:
            e2 += 1.0
            if kind == C_CC:
                acc2 += g2
                d2 = w2 * log2(1.0 + acc2 / w2) >= r2
            else:
                acc2 += w2 * log2(1.0 + g2 / w2)
                d2 = acc2 >= r2
        if (d1 and d2) or rnd >= L:
            break
        rnd += 1
    out.pk1 = 1
    out.pk2 = 1
    out.ok1 = 1 if d1 else 0
    out.ok2 = 1 if d2 else 0
    out.fail1 = 1 - out.ok1
    out.fail2 = 1 - out.ok2
    out.e1 = e1
    out.e2 = e2
    out.rounds = rnd + 1


cdef void c_trial(int scheme, int kind, int L, double r1, double r2, double G1, double G2, uint64_t seed,
                  uint64_t tr, double w1, int plan_kind, double pin_alpha, Work* w, Outcome* out) nogil:
    cdef double g1, g2, alpha, p1, p2
    cdef int case
    if scheme == C_FDMA:
        fdma_cycle(kind, L, r1, r2, G1, G2, seed, tr, w1, out)
        out.alpha = -1.0
        return
    c_round_gains(seed, tr, 0, G1, G2, &g1, &g2)
    if scheme == C_RSMA and pin_alpha < 0.0:
        c_select_alpha(g1, g2, r1, r2, G1, G2, plan_kind, &alpha, &case, &p1, &p2)
    else:
        alpha = pin_alpha
    if alpha > 0.0 and alpha < 1.0:
        split_cycle(kind, L, r1, r2, G1, G2, seed, tr, alpha, g1, g2, w, out)
    else:
        unsplit_cycle(kind, L, r1, r2, G1, G2, seed, tr, 1 if alpha >= 1.0 else 2, g1, g2, w, out)
    out.alpha = alpha


cdef int work_alloc(Work* w) nogil:
    cdef size_t n = C_MAX_ROUNDS + 1
    w.g1s = <double*>malloc(n * sizeof(double))
    w.g2s = <double*>malloc(n * sizeof(double))
    w.ta = <int*>malloc(n * sizeof(int))
    w.tb = <int*>malloc(n * sizeof(int))
    w.st1 = <int*>malloc(n * sizeof(int))
    w.st2 = <int*>malloc(n * sizeof(int))
    if w.g1s == NULL or w.g2s == NULL or w.ta == NULL or w.tb == NULL or w.st1 == NULL or w.st2 == NULL:
        return -1
    return 0


cdef void work_free(Work* w) nogil:
    free(w.g1s)
    free(w.g2s)
    free(w.ta)
    free(w.tb)
    free(w.st1)
    free(w.st2)


cdef tuple outcome_tuple(Outcome* o):
    return (o.pk1, o.pk2, o.fail1, o.fail2, o.e1, o.e2, o.rounds, o.ok1, o.ok2, o.alpha)


def _check_L(int L):
    if L < 0 or L >= C_MAX_ROUNDS:
        raise ValueError("L must lie in [0, %d)" % C_MAX_ROUNDS)


def trial(int scheme, int kind, int L, double r1, double r2, double G1, double G2, seed, tr,
          double w1, int plan_kind, double pin_alpha, log=None):
    cdef Work w
    cdef Outcome o
    _check_L(L)
    if log is not None:
        raise ValueError("event logs are produced by the pure-Python backend only")
    if work_alloc(&w) != 0:
        work_free(&w)
        raise MemoryError()
    c_trial(scheme, kind, L, r1, r2, G1, G2, <uint64_t>(seed & 0xFFFFFFFFFFFFFFFF),
            <uint64_t>(tr & 0xFFFFFFFFFFFFFFFF), w1, plan_kind, pin_alpha, &w, &o)
    work_free(&w)
    return outcome_tuple(&o)


def block(int scheme, int kind, int L, double r1, double r2, double G1, double G2, seed, int64_t start,
          int64_t n, double w1, int plan_kind, double pin_alpha):
    cdef Work w
    cdef Outcome o
    cdef double s[C_N_SUMS]
    cdef int64_t tr
    cdef double e, p
    cdef int i
    cdef uint64_t useed = <uint64_t>(seed & 0xFFFFFFFFFFFFFFFF)
    _check_L(L)
    for i in range(C_N_SUMS):
        s[i] = 0.0
    if work_alloc(&w) != 0:
        work_free(&w)
        raise MemoryError()
    with nogil:
        for tr in range(start, start + n):
            c_trial(scheme, kind, L, r1, r2, G1, G2, useed, <uint64_t>tr, w1, plan_kind, pin_alpha, &w, &o)
            e = o.e1 + o.e2
            p = <double>(o.pk1 + o.pk2)
            s[0] += o.pk1
            s[1] += o.pk2
            s[2] += o.fail1
            s[3] += o.fail2
            s[4] += o.e1
            s[5] += o.e2
            s[6] += e
            s[7] += e * e
            s[8] += p
            s[9] += p * p
            s[10] += e * p
            s[11] += o.alpha
            s[12] += o.rounds
            s[13] += 1 if (o.ok1 == 0 or o.ok2 == 0) else 0
    work_free(&w)
    return [s[i] for i in range(C_N_SUMS)]


def trial_outcomes(int scheme, int kind, int L, double r1, double r2, double G1, double G2, seed, int64_t start,
                   int64_t n, double w1, int plan_kind, double pin_alpha):
    cdef Work w
    cdef Outcome o
    cdef int64_t tr
    cdef uint64_t useed = <uint64_t>(seed & 0xFFFFFFFFFFFFFFFF)
    _check_L(L)
    if work_alloc(&w) != 0:
        work_free(&w)
        raise MemoryError()
    res = []
    for tr in range(start, start + n):
        c_trial(scheme, kind, L, r1, r2, G1, G2, useed, <uint64_t>tr, w1, plan_kind, pin_alpha, &w, &o)
        res.append(outcome_tuple(&o))
    work_free(&w)
    return res
