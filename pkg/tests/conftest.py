"""Shared fixtures: the figure-level sweeps and the acceptance summary."""
from __future__ import annotations

import time

import pytest

from rsma_harq.experiment import SweepSpec, run_sweep

# (criterion id, passed, detail) in the order the criteria were checked
ACCEPTANCE: list[tuple[int, bool, str]] = []

SWEEP_TRIALS = 100_000
SWEEP_SEED = 1
_sweep_seconds: dict[int, float] = {}


def record(cid: int, passed: bool, detail: str) -> None:
    ACCEPTANCE.append((cid, passed, detail))
    print(f"criterion {cid}: {'PASS' if passed else 'FAIL'} {detail}")


def sweep_seconds() -> float:
    return sum(_sweep_seconds.values())


class SweepTable:
    """Sweep records indexed by ``(scheme, kind, rate, user)``."""

    def __init__(self, spec: SweepSpec, records):
        self.spec = spec
        self.records = records
        self.index = {(r.scheme, r.kind, r.rate, r.user): r for r in records}

    def get(self, scheme: str, kind: str, rate: float, user: int):
        return self.index[(scheme, kind, rate, user)]

    @property
    def rates(self) -> list[float]:
        return self.spec.rates


def _run(L: int, start: float, stop: float, step: float) -> SweepTable:
    spec = SweepSpec(L_values=(L,), rate_start=start, rate_stop=stop, rate_step=step,
                     trials=SWEEP_TRIALS, seed=SWEEP_SEED)
    t0 = time.perf_counter()
    records = run_sweep(spec)
    _sweep_seconds[L] = time.perf_counter() - t0
    return SweepTable(spec, records)


@pytest.fixture(scope="session")
def sweep_l2() -> SweepTable:
    return _run(2, 1.0, 3.5, 0.25)


@pytest.fixture(scope="session")
def sweep_l4() -> SweepTable:
    # the L = 4 figures extend to higher rates; below 3.5 every error is ~0
    return _run(4, 1.0, 8.0, 0.5)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for cid, passed, detail in sorted(ACCEPTANCE, key=lambda x: x[0]):
        terminalreporter.write_line(f"criterion {cid}: {'PASS' if passed else 'FAIL'}  {detail}")
