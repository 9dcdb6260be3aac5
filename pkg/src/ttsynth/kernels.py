"""Backend selection for the hot loops.

The compiled extension ``ttsynth._kernels`` is used when it imports and the
environment variable ``TTSYNTH_PURE`` is unset; otherwise the pure-Python
module ``ttsynth._pykernels`` is used. Both expose the same functions.

Budget rationals are mapped to integers over a common denominator before
entering the kernels. The compiled path works in 64-bit integers and is
skipped for a call whose scaled magnitudes could overflow.
"""

from __future__ import annotations

import math
import os
from fractions import Fraction

from . import _pykernels

try:
    if os.environ.get("TTSYNTH_PURE"):
        raise ImportError("pure backend forced by TTSYNTH_PURE")
    from . import _kernels as _compiled
except ImportError:
    _compiled = None

BACKEND = "compiled" if _compiled is not None else "python"

OK, MISS, LEFTOVER = _pykernels.OK, _pykernels.MISS, _pykernels.LEFTOVER
PLAIN, BLC, MLLF = _pykernels.PLAIN, _pykernels.BLC, _pykernels.MLLF

_I64_SAFE = 1 << 62


def _backend(pure: bool):
    return _pykernels if (pure or _compiled is None) else _compiled


def common_scale(*values) -> int:
    """Least common denominator of rational values."""
    q = 1
    for v in values:
        d = Fraction(v).denominator
        q = q * d // math.gcd(q, d)
    return q


def llf_run(C, T, D, cycle, *, mode=PLAIN, budget0=0, itt=0, iidle=0, lm=0,
            reserved=None, pure=False):
    """LLF / LLF-under-BLC / mLLF slot loop on exact budgets.

    Returns ``(status, fail_slot, final_budget, slots)`` with the final budget
    as a :class:`~fractions.Fraction`.
    """
    q = common_scale(budget0, itt, iidle, lm)
    b0, i_tt, i_idle, l_m = (int(Fraction(v) * q) for v in (budget0, itt, iidle, lm))
    bound = (cycle + 2) * q + abs(b0) + abs(l_m) + (abs(i_tt) + abs(i_idle)) * (cycle + 2)
    impl = _backend(pure or bound * 4 >= _I64_SAFE)
    if mode != PLAIN and i_tt <= 0:
        raise ValueError("budget-constrained modes need a positive TT slope")
    status, fail, b, slots = impl.llf_run(C, T, D, cycle, reserved, b0, i_tt,
                                          i_idle, l_m, max(q, 1), mode)
    return status, fail, Fraction(int(b), q), slots


def et_offset(busy, C, T, prio, phi, cycle, window, horizon, pure=False):
    return _backend(pure).et_offset(busy, C, T, prio, phi, cycle, window, horizon)


def et_sweep(busy, C, T, prio, cycle, window, horizon, pure=False):
    return _backend(pure).et_sweep(busy, C, T, prio, cycle, window, horizon)
