"""Rayleigh block-fading power gains drawn from counter-based random streams.

Every uniform variate is a pure function of ``(seed, stream, counter, lane)``,
so a trial's channel sequence never depends on how many workers run or in
which order trials are scheduled.  Noise power is fixed at 1; channels enter
only through their power gains ``|h|^2``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

M64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_STREAM_MUL = 0xD1B54A32D192ED03
_COUNTER_MUL = 0x8CB92BA72F3D8DD7
_INV_2_53 = 1.0 / 9007199254740992.0

LANES = 4  # lanes per counter slot; 0 -> user 1, 1 -> user 2


def db_to_linear(x_db: float) -> float:
    return 10.0 ** (x_db / 10.0)


def linear_to_db(x: float) -> float:
    return 10.0 * math.log10(x)


def _mix64(z: int) -> int:
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & M64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & M64
    return z ^ (z >> 31)


def seed_key(seed: int) -> int:
    """Per-seed key shared by every stream derived from ``seed``."""
    return _mix64((seed & M64) ^ _GOLDEN)


def counter_uniform(seed: int, stream: int, counter: int, lane: int = 0) -> float:
    """Uniform variate in the open interval (0, 1) for one counter slot."""
    h = _mix64((seed_key(seed) + (stream & M64) * _STREAM_MUL) & M64)
    h = _mix64((h + ((counter * LANES + lane) & M64) * _COUNTER_MUL) & M64)
    return ((h >> 11) + 0.5) * _INV_2_53


def counter_uniform_array(seed: int, stream, counter, lane) -> np.ndarray:
    """Vectorised :func:`counter_uniform`; arguments broadcast against each other."""
    stream = np.asarray(stream, dtype=np.uint64)
    counter = np.asarray(counter, dtype=np.uint64)
    lane = np.asarray(lane, dtype=np.uint64)

    def mix(z):
        z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
        return z ^ (z >> np.uint64(31))

    key = np.uint64(seed_key(seed))
    with np.errstate(over="ignore"):  # arithmetic is mod 2^64 on purpose
        h = mix(key + stream * np.uint64(_STREAM_MUL))
        h = mix(h + (counter * np.uint64(LANES) + lane) * np.uint64(_COUNTER_MUL))
    return ((h >> np.uint64(11)).astype(np.float64) + 0.5) * _INV_2_53


def exp_gain(mean: float, u: float) -> float:
    """Exponential power gain with the given mean from a uniform in (0, 1)."""
    return mean * -math.log(u)


@dataclass(frozen=True)
class UserProfile:
    avg_gain_db: float
    rate: float

    def __post_init__(self):
        if not math.isfinite(self.avg_gain_db):
            raise ValueError(f"avg_gain_db must be finite, got {self.avg_gain_db}")
        if not self.rate >= 0:
            raise ValueError(f"rate must be >= 0, got {self.rate}")

    @property
    def mean_gain(self) -> float:
        return db_to_linear(self.avg_gain_db)


@dataclass(frozen=True)
class ChannelDraw:
    g1: float
    g2: float

    def __post_init__(self):
        if not (self.g1 >= 0 and self.g2 >= 0):
            raise ValueError(f"channel gains must be >= 0, got ({self.g1}, {self.g2})")


@dataclass
class RngStream:
    """Per-trial random stream; ``counter`` advances once per round drawn."""

    seed: int
    stream_id: int
    counter: int = field(default=0)

    def uniform(self, lane: int = 0) -> float:
        return counter_uniform(self.seed, self.stream_id, self.counter, lane)


def sample_gain(profile: UserProfile, rng: RngStream, lane: int = 0) -> float:
    """Draw one exponential gain with mean ``profile.mean_gain`` and advance ``rng``."""
    u = rng.uniform(lane)
    rng.counter += 1
    return exp_gain(profile.mean_gain, u)


def round_gains(seed: int, trial: int, rnd: int, mean1: float, mean2: float) -> tuple[float, float]:
    """Gains of both users in round ``rnd`` of ``trial``; the engine's only source of randomness."""
    g1 = exp_gain(mean1, counter_uniform(seed, trial, rnd, 0))
    g2 = exp_gain(mean2, counter_uniform(seed, trial, rnd, 1))
    return g1, g2


def draw_round(p1: UserProfile, p2: UserProfile, rng: RngStream) -> ChannelDraw:
    g1, g2 = round_gains(rng.seed, rng.stream_id, rng.counter, p1.mean_gain, p2.mean_gain)
    rng.counter += 1
    return ChannelDraw(g1, g2)
