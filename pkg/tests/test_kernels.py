"""The compiled kernels and the pure-Python reference agree bit for bit."""
import itertools
import os
import subprocess
import sys

import numpy as np
import pytest

from rsma_harq import _pykernels as py
from rsma_harq import kernels

try:
    from rsma_harq import _ckernels as ck
except ImportError:  # extension not built
    ck = None

needs_ext = pytest.mark.skipif(ck is None, reason="compiled extension not built")

G1, G2 = 100.0, 10.0 ** 1.5


def test_backend_selected_at_import():
    assert kernels.BACKEND == ("cython" if ck is not None else "python")
    env = dict(os.environ, RSMA_HARQ_PURE="1")
    out = subprocess.run([sys.executable, "-c", "from rsma_harq import kernels; print(kernels.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


@needs_ext
@pytest.mark.parametrize("scheme,kind", list(itertools.product((0, 1, 2), (0, 1))))
def test_trial_outcomes_identical(scheme, kind):
    for L, r in ((0, 2.0), (2, 2.5), (2, 3.5), (4, 6.0), (3, 9.0)):
        pins = (1.0, 0.0) if scheme == 1 else ((-1.0, 0.3, 1.0) if scheme == 0 else (-1.0,))
        for pin in pins:
            args = (scheme, kind, L, r, 0.8 * r, G1, G2, 3, 0, 1500, 0.45, kind, pin)
            assert py.trial_outcomes(*args) == ck.trial_outcomes(*args)
            assert py.block(*args) == list(ck.block(*args))


@needs_ext
def test_plan_kind_is_honoured_identically():
    args = (0, 1, 2, 3.0, 3.0, G1, G2, 5, 0, 2000, 0.5, 0, -1.0)
    assert py.trial_outcomes(*args) == ck.trial_outcomes(*args)


@needs_ext
def test_scalar_kernels_identical():
    rng = np.random.default_rng(0)
    for _ in range(2000):
        g1, g2 = rng.exponential(G1), rng.exponential(G2)
        r1, r2 = rng.uniform(0.2, 9.0), rng.uniform(0.0, 9.0)
        kind = int(rng.integers(2))
        assert py.cond_intervals(g1, g2, r1, r2) == ck.cond_intervals(g1, g2, r1, r2)
        assert py.select_alpha(g1, g2, r1, r2, G1, G2, kind) == ck.select_alpha(g1, g2, r1, r2, G1, G2, kind)
        a = float(rng.uniform(0.01, 0.99))
        for case in range(1, 6):
            assert py.objective(g1, g2, a, r1, r2, G1, G2, kind, case) == ck.objective(
                g1, g2, a, r1, r2, G1, G2, kind, case)


@needs_ext
def test_round_gains_identical():
    for seed, tr, rnd in itertools.product((0, 1, 2**40 + 3), range(50), range(6)):
        assert py.round_gains(seed, tr, rnd, G1, G2) == ck.round_gains(seed, tr, rnd, G1, G2)


@needs_ext
def test_sweep_csv_identical_across_backends(tmp_path):
    code = ("import sys; from rsma_harq.experiment import SweepSpec, run_sweep, write_csv; "
            "write_csv(run_sweep(SweepSpec(L_values=(2,), rate_start=2.0, rate_stop=3.0, rate_step=0.5, "
            "trials=3000, fdma_trials=10000, chunk=1000)), sys.argv[1])")
    paths = []
    for pure in ("0", "1"):
        p = tmp_path / f"out{pure}.csv"
        subprocess.run([sys.executable, "-c", code, str(p)], env=dict(os.environ, RSMA_HARQ_PURE=pure),
                       check=True)
        paths.append(p)
    assert paths[0].read_bytes() == paths[1].read_bytes()
