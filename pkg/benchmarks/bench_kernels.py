"""Compiled vs pure-Python kernel timings.

Usage: python benchmarks/bench_kernels.py [--repeat N]

Times one mLLF pass and one full ET offset sweep on a desk-scale generated
task set with each backend, checks that both agree, and prints a CSV table.
"""

import argparse
import sys
import timeit
from fractions import Fraction

import numpy as np

from ttsynth import kernels
from ttsynth.b3lf import synthesize
from ttsynth.blc import BlcParams
from ttsynth.experiment import DESK_PERIODS
from ttsynth.taskgen import GenSpec, generate
from ttsynth.taskmodel import hyperperiod


def cases():
    ts = generate(GenSpec(30, 20, Fraction(3, 10), Fraction(1, 5), DESK_PERIODS, seed=11,
                          microtick_ns=100_000))
    tt, et = ts.tt, ts.et
    T = hyperperiod(tt)
    u = sum(t.utilization for t in tt)
    params = BlcParams.for_envelope(u, sum(t.C for t in tt))
    out = synthesize(ts)
    busy = out.table.busy_mask([t.id for t in tt])

    def llf(pure):
        return kernels.llf_run([t.C for t in tt], [t.T for t in tt], [t.D for t in tt], T,
                               mode=kernels.MLLF, budget0=params.l_m, itt=params.i_tt,
                               iidle=params.i_idle, lm=params.l_m, pure=pure)

    def sweep(pure):
        return kernels.et_sweep(busy, [t.C for t in et], [t.T for t in et],
                                [t.priority for t in et], T, 2 * T,
                                2 * T + max(t.D for t in et), pure=pure)

    return {"mllf_pass": llf, "et_sweep": sweep}


def same(a, b):
    if isinstance(a, tuple):
        return all(same(x, y) for x, y in zip(a, b))
    if isinstance(a, np.ndarray) or isinstance(b, np.ndarray):
        return np.array_equal(np.asarray(a), np.asarray(b))
    return a == b


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    if kernels.BACKEND != "compiled":
        print("compiled extension not available; build with pip install -e .", file=sys.stderr)
        return 1
    print("kernel,compiled_s,python_s,speedup,agree")
    for name, fn in cases().items():
        fast = min(timeit.repeat(lambda: fn(False), number=1, repeat=args.repeat))
        slow = min(timeit.repeat(lambda: fn(True), number=1, repeat=args.repeat))
        print(f"{name},{fast:.6f},{slow:.6f},{slow / fast:.1f},{same(fn(False), fn(True))}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
