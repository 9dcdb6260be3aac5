"""Burst Limiting Least Laxity First (B3LF) schedule synthesis.

:func:`mllf_schedule` is one slot-by-slot pass of least-laxity-first under the
BLC, with a virtual IDLE task whose laxity shrinks as the budget drains.
:func:`b3lf` searches for an initial budget whose pass ends with at least as
much budget as it started with, so the table can repeat forever.
:func:`binary_b3lf` finds the smallest budget ceiling that keeps the TT tasks
schedulable, which later ET iterations are checked against.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence

from . import kernels
from .blc import BlcParams, ScheduleTable
from .envelope import INFEASIBLE, max_tt_burst
from .taskmodel import Task, TaskSet, hyperperiod, tt_task

MISS_AT_LM = "miss-at-L_M"
EXHAUSTED = "search-exhausted"
ET_INFEASIBLE = "et-infeasible"
OVERLOAD = "overload"

_STATUS = {kernels.OK: "ok", kernels.MISS: "deadline-miss", kernels.LEFTOVER: "leftover-work"}


class InvariantBreach(RuntimeError):
    """An internal guarantee of the synthesis algorithms did not hold."""


@dataclass(frozen=True)
class Pass:
    """Outcome of one scheduling pass from a given initial budget."""

    table: Optional[ScheduleTable]
    initial_budget: Fraction
    final_budget: Fraction
    status: str
    fail_slot: int = -1

    @property
    def ok(self) -> bool:
        return self.table is not None


@dataclass(frozen=True)
class SynthesisOutcome:
    table: Optional[ScheduleTable]
    params: Optional[BlcParams]
    initial_budget: Optional[Fraction] = None
    final_budget: Optional[Fraction] = None
    iterations: int = 0
    reason: Optional[str] = None

    @property
    def feasible(self) -> bool:
        return self.table is not None


def last_deadline(tt: Sequence[Task], T: int) -> int:
    """Deadline of the last TT job released before ``T``, capped at ``T``."""
    return min(T, max((T - 1) // t.T * t.T + t.D for t in tt))


def _run(tt, T, mode, initial_budget, params, reserved=None) -> Pass:
    C = [t.C for t in tt]
    Ts = [t.T for t in tt]
    D = [t.D for t in tt]
    if params is None:
        status, fail, b, slots = kernels.llf_run(C, Ts, D, T, mode=mode, reserved=reserved)
    else:
        status, fail, b, slots = kernels.llf_run(
            C, Ts, D, T, mode=mode, budget0=initial_budget, itt=params.i_tt,
            iidle=params.i_idle, lm=params.l_m, reserved=reserved)
    table = None
    if status == kernels.OK:
        table = ScheduleTable.from_indices(slots, [t.id for t in tt])
    return Pass(table, Fraction(initial_budget), b, _STATUS[status], fail)


def mllf_schedule(initial_budget, tt: Sequence[Task], T: int, params: BlcParams) -> Pass:
    """One mLLF pass over ``[0, T)`` starting from ``initial_budget``.

    Ties between TT tasks go to the earlier task in ``tt``; IDLE wins only on
    strictly smaller laxity.
    """
    initial_budget = Fraction(initial_budget)
    if not 0 <= initial_budget <= params.l_m:
        raise ValueError("initial budget outside [0, l_m]")
    return _run(tt, T, kernels.MLLF, initial_budget, params)


def llf_under_blc(initial_budget, tt: Sequence[Task], T: int, params: BlcParams) -> Pass:
    """Work-conserving LLF that only respects the budget (no IDLE task)."""
    return _run(tt, T, kernels.BLC, Fraction(initial_budget), params)


def llf_table(tasks: Sequence[Task], cycle: int, reserved=None) -> Pass:
    """Plain LLF without any budget; ``reserved[t] >= 0`` pins slot ``t``."""
    if not tasks:
        return Pass(ScheduleTable((None,) * cycle), Fraction(0), Fraction(0), "ok")
    return _run(tasks, cycle, kernels.PLAIN, 0, None, reserved)


def b3lf(tt: Sequence[Task], b_max, T: Optional[int] = None, lam=1,
         exhaustive: bool = False) -> SynthesisOutcome:
    """Build a repeatable TT table whose budget stays within ``[0, b_max]``.

    Probes the minimal end-of-cycle budget first (success there is always
    repeatable), then the full ceiling (failure there means no table), then
    walks the initial budget down until the pass ends with at least the
    budget it started from. By default the walk is quantized to multiples of
    the TT slope; ``exhaustive=True`` restarts from the exact final budget.
    """
    tt = list(tt)
    lam = Fraction(lam)
    b_max = Fraction(b_max)
    if T is None:
        T = hyperperiod(tt)
    u_tt = sum((t.utilization for t in tt), Fraction(0))
    if u_tt > lam:
        return SynthesisOutcome(None, None, reason=OVERLOAD)
    if u_tt == lam:
        # zero TT slope: the budget never drains and plain LLF decides
        run = llf_table(tt, T)
        return SynthesisOutcome(run.table, None, b_max, b_max, 1,
                                None if run.ok else MISS_AT_LM)
    params = BlcParams.for_envelope(u_tt, b_max, lam)
    i_tt, i_idle, l_m = params.i_tt, params.i_idle, params.l_m

    min_budget = min((T - last_deadline(tt, T)) * i_idle, l_m)
    iterations = 1
    run = mllf_schedule(min_budget, tt, T, params)
    if run.ok:
        return _success(run, params, iterations)
    if min_budget == l_m:
        return SynthesisOutcome(None, params, min_budget, run.final_budget, iterations, MISS_AT_LM)

    initial = l_m
    run = mllf_schedule(initial, tt, T, params)
    iterations += 1
    if not run.ok:
        return SynthesisOutcome(None, params, initial, run.final_budget, iterations, MISS_AT_LM)

    previous_final = None
    while run.ok and initial > max(min_budget, run.final_budget):
        if previous_final is not None and run.final_budget >= previous_final:
            raise InvariantBreach(
                f"final budget did not decrease: {previous_final} -> {run.final_budget}")
        previous_final = run.final_budget
        if exhaustive:
            nxt = run.final_budget
        else:
            nxt = math.floor(run.final_budget / i_tt) * i_tt
        if nxt <= min_budget:
            # the min_budget probe already failed; lower starts are not searched
            return SynthesisOutcome(None, params, nxt, run.final_budget, iterations, EXHAUSTED)
        initial = nxt
        run = mllf_schedule(initial, tt, T, params)
        iterations += 1
    if not run.ok:
        return SynthesisOutcome(None, params, initial, run.final_budget, iterations, EXHAUSTED)
    return _success(run, params, iterations)


def _success(run: Pass, params: BlcParams, iterations: int) -> SynthesisOutcome:
    if run.initial_budget > run.final_budget:
        raise InvariantBreach("accepted table is not repeatable")
    return SynthesisOutcome(run.table, params, run.initial_budget, run.final_budget,
                            iterations, None)


def synthesize(ts: TaskSet, exhaustive: bool = False) -> SynthesisOutcome:
    """Envelope computation followed by :func:`b3lf`."""
    env = max_tt_burst(ts)
    if not env.feasible:
        return SynthesisOutcome(None, None, reason=ET_INFEASIBLE)
    return b3lf(ts.tt, env.b_tt_max, hyperperiod(ts.tt), ts.lam, exhaustive)


@dataclass(frozen=True)
class DesignResult:
    l_m_min: Optional[Fraction]
    outcome: Optional[SynthesisOutcome]
    probes: int

    @property
    def feasible(self) -> bool:
        return self.l_m_min is not None


def ceiling_grid(tt: Sequence[Task], lam=1) -> List[Fraction]:
    """Candidate ceilings: multiples of the TT slope up to C^TT, plus C^TT itself."""
    lam = Fraction(lam)
    u_tt = sum((t.utilization for t in tt), Fraction(0))
    c_tt = Fraction(sum(t.C for t in tt))
    i_tt = lam - u_tt
    if i_tt <= 0:
        return [c_tt]
    grid = [k * i_tt for k in range(1, math.floor(c_tt / i_tt) + 1)]
    if not grid or grid[-1] != c_tt:
        grid.append(c_tt)
    return grid


def binary_b3lf(tt: Sequence[Task], T: Optional[int] = None, lam=1) -> DesignResult:
    """Smallest ceiling on :func:`ceiling_grid` for which :func:`b3lf` succeeds.

    Assumes schedulability is monotone in the ceiling.
    """
    tt = list(tt)
    if T is None:
        T = hyperperiod(tt)
    grid = ceiling_grid(tt, lam)
    top = b3lf(tt, grid[-1], T, lam)
    probes = 1
    if not top.feasible:
        return DesignResult(None, top, probes)
    lo, hi = 0, len(grid) - 1
    best = top
    while lo < hi:
        mid = (lo + hi) // 2
        out = b3lf(tt, grid[mid], T, lam)
        probes += 1
        if out.feasible:
            hi, best = mid, out
        else:
            lo = mid + 1
    return DesignResult(grid[hi], best, probes)


def admit_et_iteration(l_m_min, ts: TaskSet) -> bool:
    """Accept a new ET set for an existing table designed with ceiling ``l_m_min``."""
    env = max_tt_burst(ts)
    return env.b_tt_max != INFEASIBLE and env.b_tt_max >= Fraction(l_m_min)


@dataclass(frozen=True)
class LlfWitness:
    tasks: tuple
    l_m: Fraction
    cycle: int


def search_llf_counterexample(max_cycle: int = 16, max_tasks: int = 3,
                              periods=(2, 3, 4, 6, 8, 12, 16)) -> Optional[LlfWitness]:
    """First instance where LLF under the BLC misses but mLLF does not.

    Enumerates TT sets by task count (cycle at most ``max_cycle``), then the
    ceiling on the multiples-of-slope grid. Both passes start from a full
    budget.
    """
    periods = [p for p in periods if p <= max_cycle]
    for n in range(1, max_tasks + 1):
        for combo in itertools.combinations_with_replacement(
                [(C, T, D) for T in periods for D in range(1, T + 1) for C in range(1, D + 1)], n):
            tasks = [tt_task(f"t{i}", C, T, D) for i, (C, T, D) in enumerate(combo)]
            cycle = hyperperiod(tasks)
            if cycle > max_cycle:
                continue
            u = sum((t.utilization for t in tasks), Fraction(0))
            if u >= 1:
                continue
            for l_m in ceiling_grid(tasks):
                params = BlcParams.for_envelope(u, l_m)
                if llf_under_blc(l_m, tasks, cycle, params).ok:
                    continue
                if mllf_schedule(l_m, tasks, cycle, params).ok:
                    return LlfWitness(tuple(tasks), l_m, cycle)
    return None
