import random
from fractions import Fraction

import numpy as np
import pytest

from ttsynth import kernels

F = Fraction

compiled = pytest.mark.skipif(kernels.BACKEND != "compiled", reason="extension not built")


def test_common_scale():
    assert kernels.common_scale(F(1, 3), F(1, 4), 2) == 12
    assert kernels.common_scale() == 1


def test_blc_modes_need_positive_slope():
    with pytest.raises(ValueError):
        kernels.llf_run([1], [2], [2], 2, mode=kernels.MLLF, itt=0)


def _llf_case(rng):
    n = rng.randint(1, 4)
    T = [rng.choice([2, 3, 4, 6, 12]) for _ in range(n)]
    D = [rng.randint(1, t) for t in T]
    C = [rng.randint(1, d) for d in D]
    u = sum(F(c, t) for c, t in zip(C, T))
    itt = max(F(1, 12), 1 - u)
    lm = F(rng.randint(1, 8), rng.randint(1, 4))
    return C, T, D, 12, itt, 1 - itt, lm


@compiled
@pytest.mark.parametrize("mode", [0, 1, 2])
def test_llf_run_parity(mode):
    rng = random.Random(mode)
    for _ in range(300):
        C, T, D, cycle, itt, iidle, lm = _llf_case(rng)
        b0 = lm * F(rng.randint(0, 4), 4)
        kw = dict(mode=mode, budget0=b0, itt=itt, iidle=iidle, lm=lm)
        a = kernels.llf_run(C, T, D, cycle, **kw)
        b = kernels.llf_run(C, T, D, cycle, pure=True, **kw)
        assert a[:3] == b[:3]
        assert np.array_equal(np.asarray(a[3])[: a[1] if a[1] >= 0 else cycle],
                              np.asarray(b[3])[: b[1] if b[1] >= 0 else cycle])


@compiled
def test_llf_run_reserved_parity():
    rng = random.Random(5)
    for _ in range(100):
        C, T, D, cycle, *_ = _llf_case(rng)
        reserved = np.full(cycle, -1, dtype=np.int32)
        reserved[rng.randrange(cycle)] = len(C)
        a = kernels.llf_run(C, T, D, cycle, reserved=reserved)
        b = kernels.llf_run(C, T, D, cycle, reserved=reserved, pure=True)
        assert a[:3] == b[:3]


@compiled
def test_et_sweep_parity():
    rng = random.Random(3)
    for _ in range(60):
        cycle = rng.randint(1, 30)
        busy = np.array([rng.random() < 0.5 for _ in range(cycle)], dtype=np.uint8)
        n = rng.randint(1, 4)
        C = [rng.randint(1, 3) for _ in range(n)]
        T = [rng.randint(1, 20) for _ in range(n)]
        P = [rng.randint(0, 3) for _ in range(n)]
        window, horizon = 2 * cycle, 2 * cycle + 2 * max(T)
        wa, ua = kernels.et_sweep(busy, C, T, P, cycle, window, horizon)
        wb, ub = kernels.et_sweep(busy, C, T, P, cycle, window, horizon, pure=True)
        assert np.array_equal(wa, wb)
        assert np.array_equal(np.asarray(ua, bool), np.asarray(ub, bool))


def test_huge_budgets_fall_back_to_python():
    big = F(1, 2**61)
    st, fail, b, _ = kernels.llf_run([1], [4], [4], 4, mode=kernels.BLC, budget0=1,
                                     itt=1 - big, iidle=big, lm=1)
    assert st == kernels.OK and b == 4 * big


def test_pure_backend_selected_by_environment():
    import os
    import subprocess
    import sys
    env = {**os.environ, "TTSYNTH_PURE": "1"}
    res = subprocess.run([sys.executable, "-c", "from ttsynth import kernels; print(kernels.BACKEND)"],
                         capture_output=True, text=True, env=env)
    assert res.stdout.strip() == "python"
