"""Backend selection for the hot kernels.

The compiled ``_ckernels`` extension is used when it was built; otherwise, or
when ``RSMA_HARQ_PURE=1`` is set in the environment, the pure-Python
reference ``_pykernels`` is used.  Both expose the same functions and agree
bit for bit.
"""
import os

from . import _pykernels as py

if os.environ.get("RSMA_HARQ_PURE") == "1":
    impl = py
else:
    try:
        from . import _ckernels as impl
    except ImportError:  # extension not built
        impl = py

BACKEND = impl.BACKEND

round_gains = impl.round_gains
cond_intervals = impl.cond_intervals
objective = impl.objective
select_alpha = impl.select_alpha
trial = impl.trial
block = impl.block
trial_outcomes = impl.trial_outcomes

RSMA, NOMA, FDMA = py.RSMA, py.NOMA, py.FDMA
CC, IR = py.CC, py.IR
EDGE = py.EDGE
MAX_ROUNDS = py.MAX_ROUNDS
N_SUMS = py.N_SUMS


def trial_logged(*args):
    """Run one trial through the Python reference and return ``(outcome, log_lines)``."""
    log: list[str] = []
    out = py.trial(*args, log=log)
    return out, log
