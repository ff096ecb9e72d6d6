"""Sweeps, Monte Carlo aggregation and oracle validation.

Every rate point of a sweep runs the same trial indices ``0 .. trials-1``
with the same seed, so all schemes, HARQ kinds and rates see coupled
channel realisations.  Trials are processed in fixed-size chunks whose
tallies are merged in chunk order, which makes the output independent of
the number of worker processes.
"""
from __future__ import annotations

import csv
import math
import multiprocessing
import random
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

from .analytic import (ErrorPair, HarqKind, ProbabilityRangeError, Special, ThresholdSet, p_joint,
                       p_special_gammas, special_thresholds)
from .channel import UserProfile
from .engine import BlockSums, HarqConfig, Scheme, optimize_fdma_w, run_block
from .oracle import EventParams, OracleConvergenceError, binomial_z, mc_oracle, quadrature_oracle

Z95 = 1.959963984540054


class ConfigError(ValueError):
    """Invalid sweep configuration; ``field`` names the offending setting."""

    def __init__(self, field_name: str, message: str):
        super().__init__(f"{field_name}: {message}")
        self.field = field_name


SCHEME_ORDER = ("RSMA", "NOMA", "FDMA")
KIND_ORDER = ("CC", "IR")


@dataclass(frozen=True)
class SweepSpec:
    schemes: tuple = SCHEME_ORDER
    kinds: tuple = KIND_ORDER
    L_values: tuple = (2,)
    rate_start: float = 1.0
    rate_stop: float = 3.5
    rate_step: float = 0.25
    gamma1_db: float = 20.0
    gamma2_db: float = 15.0
    trials: int = 100_000
    seed: int = 1
    workers: int = 1
    chunk: int = 10_000
    fdma_trials: int = 20_000

    def __post_init__(self):
        for name in ("schemes", "kinds", "L_values"):
            val = getattr(self, name)
            if isinstance(val, (str, int)):
                val = (val,)
            object.__setattr__(self, name, tuple(val))
        object.__setattr__(self, "schemes", tuple(str(s).upper() for s in self.schemes))
        object.__setattr__(self, "kinds", tuple(str(k).upper() for k in self.kinds))
        self.validate()

    def validate(self) -> None:
        if not self.schemes or any(s not in SCHEME_ORDER for s in self.schemes):
            raise ConfigError("schemes", f"must be a non-empty subset of {SCHEME_ORDER}, got {self.schemes}")
        if not self.kinds or any(k not in KIND_ORDER for k in self.kinds):
            raise ConfigError("kinds", f"must be a non-empty subset of {KIND_ORDER}, got {self.kinds}")
        if not self.L_values or any(not isinstance(v, int) or isinstance(v, bool) or v < 0 for v in self.L_values):
            raise ConfigError("L_values", f"must be non-negative integers, got {self.L_values}")
        if not self.rate_step > 0:
            raise ConfigError("rate_step", f"must be > 0, got {self.rate_step}")
        if not (math.isfinite(self.rate_start) and self.rate_start >= 0):
            raise ConfigError("rate_start", f"must be finite and >= 0, got {self.rate_start}")
        if not (math.isfinite(self.rate_stop) and self.rate_stop >= self.rate_start):
            raise ConfigError("rate_stop", f"must be >= rate_start, got {self.rate_stop}")
        for name in ("gamma1_db", "gamma2_db"):
            if not math.isfinite(getattr(self, name)):
                raise ConfigError(name, "must be finite")
        for name in ("trials", "workers", "chunk", "fdma_trials"):
            v = getattr(self, name)
            if not isinstance(v, int) or isinstance(v, bool) or v < 1:
                raise ConfigError(name, f"must be an integer >= 1, got {v!r}")
        if not isinstance(self.seed, int) or isinstance(self.seed, bool) or self.seed < 0:
            raise ConfigError("seed", f"must be a non-negative integer, got {self.seed!r}")

    @property
    def rates(self) -> list[float]:
        n = int(math.floor((self.rate_stop - self.rate_start) / self.rate_step + 1e-9)) + 1
        return [round(self.rate_start + k * self.rate_step, 12) for k in range(n)]

    @classmethod
    def from_mapping(cls, data: dict) -> "SweepSpec":
        data = dict(data)
        grid = data.pop("rate_grid", None)
        if grid is not None:
            if not isinstance(grid, dict):
                raise ConfigError("rate_grid", "must be a mapping with start/stop/step")
            for key in ("start", "stop", "step"):
                if key in grid:
                    data[f"rate_{key}"] = grid[key]
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError(unknown[0], "unknown configuration field")
        try:
            return cls(**data)
        except ConfigError:
            raise
        except (TypeError, ValueError) as exc:
            raise ConfigError("config", str(exc)) from exc


CSV_FIELDS = ("scheme", "kind", "L", "rate", "user", "error_prob", "ci95_halfwidth", "avg_power_per_packet",
              "trials", "seed", "fdma_w1", "mean_chosen_alpha", "power_ci95_halfwidth")


@dataclass(frozen=True)
class SweepRecord:
    scheme: str
    kind: str
    L: int
    rate: float
    user: int
    error_prob: float
    ci95_halfwidth: float
    avg_power_per_packet: float
    trials: int
    seed: int
    fdma_w1: float | None = None
    mean_chosen_alpha: float | None = None
    power_ci95_halfwidth: float | None = None
    # in-memory only: raw counts behind the estimates
    failures: int | None = field(default=None, compare=False)
    packets: int | None = field(default=None, compare=False)

    @property
    def ci(self) -> tuple[float, float]:
        """Wilson 95% interval (needs the raw counts)."""
        if self.packets is None:
            raise ValueError("record carries no raw counts")
        return wilson_interval(self.failures, self.packets)

    @property
    def power_ci(self) -> tuple[float, float]:
        h = self.power_ci95_halfwidth or 0.0
        return self.avg_power_per_packet - h, self.avg_power_per_packet + h


def wilson_interval(k: float, n: float, z: float = Z95) -> tuple[float, float]:
    if n <= 0:
        return 0.0, 1.0
    p = k / n
    den = 1.0 + z * z / n
    centre = (p + z * z / (2.0 * n)) / den
    half = z * math.sqrt(max(p * (1.0 - p) / n + z * z / (4.0 * n * n), 0.0)) / den
    return max(0.0, centre - half), min(1.0, centre + half)


def wilson_halfwidth(k: float, n: float, z: float = Z95) -> float:
    lo, hi = wilson_interval(k, n, z)
    return 0.5 * (hi - lo)


def ratio_ci_halfwidth(s: BlockSums, z: float = Z95) -> float:
    """Delta-method half-width for total energy over total packets."""
    n = s.trials
    if n < 2 or s.sum_p <= 0:
        return 0.0
    r = s.sum_e / s.sum_p
    ss = s.sum_e2 - 2.0 * r * s.sum_ep + r * r * s.sum_p2
    mean_p = s.sum_p / n
    return z * math.sqrt(max(ss, 0.0) / (n * (n - 1))) / mean_p


@dataclass(frozen=True)
class SweepPoint:
    scheme: str
    kind: str
    L: int
    rate: float

    def config(self, spec: SweepSpec, w1: float = 0.5) -> HarqConfig:
        return HarqConfig(Scheme.parse(self.scheme), HarqKind.parse(self.kind), self.L,
                          UserProfile(spec.gamma1_db, self.rate), UserProfile(spec.gamma2_db, self.rate),
                          fdma_w1=w1)


def sweep_points(spec: SweepSpec) -> list[SweepPoint]:
    schemes = [s for s in SCHEME_ORDER if s in spec.schemes]
    kinds = [k for k in KIND_ORDER if k in spec.kinds]
    return [SweepPoint(s, k, L, r) for s in schemes for k in kinds for L in sorted(set(spec.L_values))
            for r in spec.rates]


def _run_chunk(task) -> BlockSums:
    cfg, seed, start, n = task
    return run_block(cfg, seed, start, n)


def _chunks(trials: int, chunk: int):
    start = 0
    while start < trials:
        n = min(chunk, trials - start)
        yield start, n
        start += n


def point_records(point: SweepPoint, spec: SweepSpec, sums: BlockSums, w1: float | None) -> list[SweepRecord]:
    power = sums.sum_e / sums.sum_p if sums.sum_p > 0 else math.nan
    power_h = ratio_ci_halfwidth(sums)
    alpha = sums.alpha_sum / sums.trials if point.scheme == "RSMA" else None
    out = []
    for user, k, n in ((1, sums.failures1, sums.packets1), (2, sums.failures2, sums.packets2)):
        out.append(SweepRecord(point.scheme, point.kind, point.L, point.rate, user, k / n, wilson_halfwidth(k, n),
                               power, spec.trials, spec.seed, w1, alpha, power_h, int(k), int(n)))
    return out


def run_sweep(spec: SweepSpec, progress=None) -> list[SweepRecord]:
    """Run every (scheme, kind, L, rate) point; rows come out in sorted order."""
    points = sweep_points(spec)
    configs = []
    for p in points:
        w1 = None
        cfg = p.config(spec)
        if p.scheme == "FDMA":
            w1 = optimize_fdma_w(cfg, spec.fdma_trials, spec.seed)
            cfg = p.config(spec, w1)
        configs.append((p, cfg, w1))
    tasks = [(cfg, spec.seed, start, n) for _, cfg, _ in configs for start, n in _chunks(spec.trials, spec.chunk)]
    if spec.workers > 1:
        with multiprocessing.get_context("spawn").Pool(spec.workers) as pool:
            results = pool.map(_run_chunk, tasks, chunksize=1)
    else:
        results = []
        for t in tasks:
            results.append(_run_chunk(t))
            if progress is not None:
                progress(len(results), len(tasks))
    records = []
    it = iter(results)
    for p, cfg, w1 in configs:
        total = BlockSums()
        for _ in _chunks(spec.trials, spec.chunk):
            total = total.merge(next(it))
        records.extend(point_records(p, spec, total, w1))
    return records


# --- CSV -------------------------------------------------------------------

def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return str(int(v))
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        if math.isnan(v):
            return "nan"
        return f"{v:.6g}"
    return str(v)


def record_row(rec: SweepRecord) -> list[str]:
    return [_fmt(getattr(rec, f)) for f in CSV_FIELDS]


def write_csv(records, path) -> None:
    path = Path(path)
    rows = sorted(records, key=lambda r: (SCHEME_ORDER.index(r.scheme), KIND_ORDER.index(r.kind), r.L, r.rate,
                                          r.user))
    try:
        with path.open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(CSV_FIELDS)
            for rec in rows:
                w.writerow(record_row(rec))
    except OSError as exc:
        raise OSError(f"cannot write CSV to {path}: {exc}") from exc


_PARSERS = {"L": int, "user": int, "trials": int, "seed": int}


def _parse(name: str, text: str):
    if text == "":
        return None
    if name in ("scheme", "kind"):
        return text
    if name in _PARSERS:
        return _PARSERS[name](text)
    return float(text)


def read_csv(path) -> list[SweepRecord]:
    with Path(path).open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if tuple(header) != CSV_FIELDS:
            raise ValueError(f"unexpected CSV header in {path}: {header}")
        return [SweepRecord(**{k: _parse(k, v) for k, v in zip(header, row)}) for row in reader]


def rounded(rec: SweepRecord) -> SweepRecord:
    """The record as it reads back from CSV (6 significant digits)."""
    return SweepRecord(**{k: _parse(k, _fmt(getattr(rec, k))) for k in CSV_FIELDS})


def format_record(rec: SweepRecord) -> str:
    return "\n".join(f"{k}: {_fmt(getattr(rec, k))}" for k in CSV_FIELDS)


# --- oracle validation -------------------------------------------------------

@dataclass
class ValidationPoint:
    index: int
    family: str          # "joint" or "special"
    kind: str
    branch: str          # "AB>=1" or "AB<1"
    params: EventParams
    closed: ErrorPair | None = None
    quad: ErrorPair | None = None
    rel_error: float = math.nan
    z11: float = math.nan
    z2: float = math.nan
    error: str | None = None

    @property
    def max_abs_z(self) -> float:
        return max(abs(self.z11), abs(self.z2))


@dataclass
class ValidationReport:
    points: list
    rel_tol: float = 1e-6
    z_tol: float = 4.0
    gap_tol: float = 1e-6
    branch_gaps: list = field(default_factory=list)
    mc_draws: int = 0

    @property
    def max_rel_error(self) -> float:
        vals = [p.rel_error for p in self.points if p.error is None]
        return max(vals) if vals else math.nan

    @property
    def max_abs_z(self) -> float:
        vals = [p.max_abs_z for p in self.points if p.error is None and not math.isnan(p.z11)]
        return max(vals) if vals else math.nan

    @property
    def frac_z_ok(self) -> float:
        vals = [p.max_abs_z <= self.z_tol for p in self.points if p.error is None and not math.isnan(p.z11)]
        return sum(vals) / len(vals) if vals else math.nan

    @property
    def failures(self) -> list[str]:
        out = [f"point {p.index}: {p.error}" for p in self.points if p.error is not None]
        out += [f"point {p.index}: rel error {p.rel_error:.3g}" for p in self.points
                if p.error is None and p.rel_error > self.rel_tol]
        if self.mc_draws:
            out += [f"point {p.index}: |z| {p.max_abs_z:.3g}" for p in self.points
                    if p.error is None and p.max_abs_z > self.z_tol]
        out += [f"branch gap {g:.3g} at point {i}" for i, g in self.branch_gaps if g > self.gap_tol]
        return out

    @property
    def ok(self) -> bool:
        return not self.failures

    def summary(self) -> str:
        lines = [f"points: {len(self.points)}",
                 f"max relative error (closed form vs quadrature): {self.max_rel_error:.3e}"]
        if self.mc_draws:
            lines.append(f"max |z| (closed form vs {self.mc_draws} MC draws): {self.max_abs_z:.3f}")
            lines.append(f"fraction of points with |z| <= {self.z_tol:g}: {self.frac_z_ok:.4f}")
        if self.branch_gaps:
            lines.append(f"max branch continuity gap: {max(g for _, g in self.branch_gaps):.3e}")
        lines.append("status: " + ("ok" if self.ok else "FAILED"))
        lines += ["  " + f for f in self.failures]
        return "\n".join(lines)


def rel_error(a: ErrorPair, b: ErrorPair) -> float:
    """Largest relative deviation of ``a`` from the reference ``b`` over both entries."""
    worst = 0.0
    for x, y in ((a.p11, b.p11), (a.p2, b.p2)):
        if x == y:
            continue
        worst = max(worst, abs(x - y) / max(abs(y), 1e-300))
    return worst


def closed_form(ep: EventParams) -> ErrorPair:
    """Closed-form pair for event parameters (joint or special flow)."""
    if ep.special:
        return p_special_gammas(ep.A, ep.B, ep.G1, ep.G2)
    return p_joint(ThresholdSet(ep.A, ep.B, ep.C, ep.D), ep.G1, ep.G2, ep.a)


def sample_validation_params(n: int, seed: int) -> list[tuple[str, str, str, EventParams]]:
    """Random parameter sets cycling through family x kind x branch.

    Gains are drawn from their exponential laws and rates from [0.3, 10];
    draws are rejected until the thresholds are positive and land on the
    requested side of the ``A * B = 1`` branch split.
    """
    rng = random.Random(seed)
    combos = [(fam, kind, br) for fam in ("joint", "special") for kind in ("CC", "IR") for br in ("AB>=1", "AB<1")]
    out = []
    for i in range(n):
        fam, kind, br = combos[i % len(combos)]
        while True:
            G1 = 10.0 ** rng.uniform(1.0, 3.0)
            G2 = 10.0 ** rng.uniform(math.log10(3.0), math.log10(300.0))
            alpha = rng.uniform(0.05, 0.95)
            g1, g2 = rng.expovariate(1.0 / G1), rng.expovariate(1.0 / G2)
            r1, r2 = rng.uniform(0.3, 10.0), rng.uniform(0.3, 10.0)
            if fam == "joint":
                ep = EventParams.joint(g1, g2, alpha, r1, r2, HarqKind.parse(kind), G1, G2)
            else:
                which = Special.ALPHA1 if i % 2 == 0 else Special.ALPHA0
                gam1, gam2 = special_thresholds(g1, g2, r1, r2, which, HarqKind.parse(kind))
                ep = EventParams.from_gammas(gam1, gam2, G1, G2)
            if ep.A <= 0 or ep.B <= 0:
                continue
            if (ep.A * ep.B >= 1.0) == (br == "AB>=1"):
                out.append((fam, kind, br, ep))
                break
    return out


def _branch_gap(ep: EventParams, delta: float = 1e-9) -> float:
    """Jump of the closed form when ``B`` moves across ``A * B = 1``."""
    b0 = 1.0 / ep.A
    hi = closed_form(EventParams(ep.A, b0 * (1.0 + delta), ep.C, ep.D, ep.G1, ep.G2, ep.a, ep.special))
    lo = closed_form(EventParams(ep.A, b0 * (1.0 - delta), ep.C, ep.D, ep.G1, ep.G2, ep.a, ep.special))
    return max(abs(hi.p11 - lo.p11), abs(hi.p2 - lo.p2))


def run_validate(points: int = 200, seed: int = 0, mc_draws: int = 1_000_000, gap_points: int = 20) -> ValidationReport:
    """Closed forms against the quadrature oracle and Monte Carlo event counts."""
    if points < 1:
        raise ConfigError("points", "must be >= 1")
    report = ValidationReport([], mc_draws=mc_draws)
    for i, (fam, kind, br, ep) in enumerate(sample_validation_params(points, seed)):
        vp = ValidationPoint(i, fam, kind, br, ep)
        try:
            vp.closed = closed_form(ep)
            vp.quad = quadrature_oracle(ep)
            vp.rel_error = rel_error(vp.closed, vp.quad)
            if mc_draws:
                mc = mc_oracle(ep, mc_draws, seed=(seed * 1_000_003 + i) & 0xFFFFFFFF)
                vp.z11 = binomial_z(mc.pair.p11, vp.closed.p11, mc_draws)
                vp.z2 = binomial_z(mc.pair.p2, vp.closed.p2, mc_draws)
        except (OracleConvergenceError, ProbabilityRangeError) as exc:
            vp.error = str(exc)
        report.points.append(vp)
        if i < gap_points:
            report.branch_gaps.append((i, _branch_gap(ep)))
    return report


def records_to_dicts(records) -> list[dict]:
    return [{k: v for k, v in asdict(r).items() if k in CSV_FIELDS} for r in records]
