"""Reproducible random task sets for schedulability experiments.

Per-task utilizations are a uniform random split of the target utilization
(a flat Dirichlet draw), periods are drawn from a fixed set, and computation
times are rounded to whole microticks. ET tasks get deadline-monotonic
priorities quantized to levels 0..6; TT tasks share level 7.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Sequence, Tuple

import numpy as np

from . import kernels
from .taskmodel import TaskSet, et_task, lcm, tt_task, validate

CONSTRAINED = "constrained"
ARBITRARY = "arbitrary"
QUINTILE = "quintile"

ET_LEVELS = 7
TT_PRIORITY = 7


class GenerationError(RuntimeError):
    pass


@dataclass(frozen=True)
class GenSpec:
    """Generator parameters; ``period_set`` and all outputs are in microticks.

    ``deadline_mode`` is one of ``constrained`` (upper half of ``[C, T]``),
    ``arbitrary`` (``[T, 5T]``) or ``quintile`` (the ``k``-th fifth of
    ``[C, T]`` counted down from ``T``).
    """

    n_tt: int
    n_et: int
    u_tt: Fraction
    u_et: Fraction
    period_set: Tuple[int, ...]
    deadline_mode: str = CONSTRAINED
    seed: int = 0
    microtick_ns: int = 10_000
    quintile: int = 1
    max_retries: int = 100

    def __post_init__(self):
        object.__setattr__(self, "u_tt", Fraction(self.u_tt).limit_denominator(10**6))
        object.__setattr__(self, "u_et", Fraction(self.u_et).limit_denominator(10**6))
        object.__setattr__(self, "period_set", tuple(int(p) for p in self.period_set))
        if self.deadline_mode not in (CONSTRAINED, ARBITRARY, QUINTILE):
            raise ValueError(f"unknown deadline mode {self.deadline_mode!r}")
        if self.u_tt + self.u_et > Fraction(9, 10):
            raise ValueError("total target utilization above 0.9")
        if self.deadline_mode == QUINTILE and not 1 <= self.quintile <= 5:
            raise ValueError("quintile must be in 1..5")


def split_utilization(rng: np.random.Generator, n: int, total: float) -> np.ndarray:
    if n == 0:
        return np.zeros(0)
    return rng.dirichlet(np.ones(n)) * total


def _draw(rng, n, total, periods) -> List[Tuple[int, int]]:
    us = split_utilization(rng, n, total)
    Ts = rng.choice(periods, size=n)
    return [(max(1, int(round(u * T))), int(T)) for u, T in zip(us, Ts)]


def draw_deadline(rng: np.random.Generator, C: int, T: int, mode: str, k: int = 1) -> int:
    if mode == CONSTRAINED:
        lo, hi = -(-(C + T) // 2), T
    elif mode == ARBITRARY:
        lo, hi = T, 5 * T
    else:
        span = Fraction(T - C, 5)
        lo = math.ceil(T - k * span)
        hi = math.floor(T - (k - 1) * span)
    lo = max(lo, C)
    hi = max(hi, lo)
    return int(rng.integers(lo, hi + 1))


def dm_levels(deadlines: Sequence[int], levels: int = ET_LEVELS) -> List[int]:
    """Deadline-monotonic levels: shortest deadlines get ``levels - 1``.

    >>> dm_levels([40, 10, 20, 30, 50, 60, 70])
    [3, 6, 5, 4, 2, 1, 0]
    """
    n = len(deadlines)
    order = sorted(range(n), key=lambda i: (deadlines[i], i))
    out = [0] * n
    for rank, i in enumerate(order):
        out[i] = levels - 1 - rank * levels // n
    return out


def schedulable_as_tt(ts: TaskSet) -> bool:
    """Plain LLF feasibility with every task treated as periodic TT work."""
    tasks = ts.tasks
    if sum((t.utilization for t in tasks), Fraction(0)) > ts.lam:
        return False
    if all(t.D >= t.T for t in tasks):
        return True
    cycle = lcm(t.T for t in tasks)
    status, _, _, _ = kernels.llf_run([t.C for t in tasks], [t.T for t in tasks],
                                      [min(t.D, t.T) for t in tasks], cycle)
    return status == kernels.OK


def _attempt(rng, spec: GenSpec) -> TaskSet:
    periods = np.array(spec.period_set)
    tt = [tt_task(f"tt{i}", C, T, priority=TT_PRIORITY)
          for i, (C, T) in enumerate(_draw(rng, spec.n_tt, float(spec.u_tt), periods))]
    raw = _draw(rng, spec.n_et, float(spec.u_et), periods)
    Ds = [draw_deadline(rng, C, T, spec.deadline_mode, spec.quintile) for C, T in raw]
    prios = dm_levels(Ds) if raw else []
    et = [et_task(f"et{i}", C, T, D, p) for i, ((C, T), D, p) in enumerate(zip(raw, Ds, prios))]
    return TaskSet(tt, et, spec.microtick_ns)


def generate(spec: GenSpec) -> TaskSet:
    """Draw a valid task set that is LLF-schedulable when ET tasks are made periodic.

    Rejected draws are retried with the same generator stream, so the result
    depends on ``spec.seed`` only.
    """
    rng = np.random.default_rng(spec.seed)
    for _ in range(spec.max_retries):
        ts = _attempt(rng, spec)
        if not validate(ts) and schedulable_as_tt(ts):
            return ts
    raise GenerationError(f"no valid task set after {spec.max_retries} draws (seed {spec.seed})")


def batch_seeds(seed: int, n: int, key: int = 0) -> List[int]:
    """``n`` independent 63-bit seeds derived from a master seed and a stream key."""
    state = np.random.SeedSequence([seed, key]).generate_state(n, dtype=np.uint64)
    return [int(s) >> 1 for s in state]
