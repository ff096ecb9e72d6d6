"""Time the compiled trial kernels against the pure-Python reference.

    python benchmarks/bench_kernels.py --trials 20000
"""
import argparse
import time

from rsma_harq import _pykernels as py

try:
    from rsma_harq import _ckernels as ck
except ImportError:
    ck = None

CASES = [
    ("RSMA", py.RSMA, -1.0),
    ("NOMA", py.NOMA, 1.0),
    ("FDMA", py.FDMA, -1.0),
]


def timed(fn, *args, repeat=3):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, list(out)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--trials", type=int, default=20_000)
    ap.add_argument("--retx", type=int, default=4)
    ap.add_argument("--rate", type=float, default=3.0)
    args = ap.parse_args(argv)
    if ck is None:
        print("compiled extension not built; nothing to compare")
        return 1
    print(f"{'scheme':6} {'kind':4} {'python s':>10} {'cython s':>10} {'speedup':>8} same")
    for name, scheme, pin in CASES:
        for kind in (0, 1):
            call = (scheme, kind, args.retx, args.rate, args.rate, 100.0, 10 ** 1.5, 1, 0, args.trials,
                    0.45, kind, pin)
            tp, outp = timed(py.block, *call, repeat=1)
            tc, outc = timed(ck.block, *call)
            print(f"{name:6} {'CC' if kind == 0 else 'IR':4} {tp:10.3f} {tc:10.4f} {tp / tc:8.1f} {outp == outc}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
