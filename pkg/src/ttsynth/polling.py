"""Polling baselines: simple per-task polling (SPoll) and a single periodic server (AdvPoll).

Both turn ET demand into extra periodic TT work and then build the table
with plain LLF. SPoll sizes one polling task per ET task by oversampling;
AdvPoll sizes one server with the linear supply lower bound

    lslbf(t) = max(0, (t - delta) * a),  a = C_p / T_p,  delta = 2 (T_p - C_p)

and the level-i load staircase of the ET tasks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from . import kernels
from .b3lf import llf_table
from .blc import ScheduleTable
from .taskmodel import Task, TaskSet, hyperperiod, lcm, tt_task

INFEASIBLE = "infeasible"
DIVERGENT = "divergent"

STRICT = "strict"
OVERSAMPLED = "oversampled"
SERVER = "server"


@dataclass(frozen=True)
class PollingTask:
    serves: Tuple[str, ...]
    T_p: int
    C_p: int
    variant: str = OVERSAMPLED

    @property
    def utilization(self) -> Fraction:
        return Fraction(self.C_p, self.T_p)

    @property
    def id(self) -> str:
        return "poll:" + "+".join(self.serves)

    def as_task(self) -> Task:
        return tt_task(self.id, self.C_p, self.T_p, self.T_p)


@dataclass(frozen=True)
class ServerAbstraction:
    C_p: int
    T_p: int

    @property
    def a(self) -> Fraction:
        return Fraction(self.C_p, self.T_p)

    @property
    def delta(self) -> int:
        return 2 * (self.T_p - self.C_p)


def lslbf(t, srv: ServerAbstraction) -> Fraction:
    """Linear supply lower bound of the server over any window of length ``t``.

    >>> lslbf(16, ServerAbstraction(2, 5))
    Fraction(4, 1)
    >>> lslbf(6, ServerAbstraction(2, 5))
    Fraction(0, 1)
    """
    return max(Fraction(0), (Fraction(t) - srv.delta) * srv.a)


def spoll_period(et: Task, conservative: bool = False) -> int:
    """Ideal oversampling period; ``conservative`` uses ``(D - C) / 2``."""
    return (et.D - et.C) // 2 if conservative else (et.D + et.C) // 2


def spoll_budget(et: Task, T_p: int) -> int:
    if et.D <= et.T:
        return et.C
    return -(-T_p // et.T) * et.C


def spoll_derive(et: Task, hyperperiod: int, cycle_cap: int,
                 conservative: bool = False) -> Union[PollingTask, str]:
    """Polling task for one ET task, shrinking the period to respect ``cycle_cap``.

    >>> p = spoll_derive(Task("e", "ET", 2, 100, 20), 1, 10**6, conservative=True)
    >>> p.T_p, p.C_p
    (9, 2)
    """
    ideal = spoll_period(et, conservative)
    for T_p in range(ideal, 0, -1):
        C_p = spoll_budget(et, T_p)
        if T_p < C_p:
            break
        if lcm([hyperperiod, T_p]) <= cycle_cap:
            return PollingTask((et.id,), T_p, C_p, OVERSAMPLED)
    return INFEASIBLE


def spoll_strict(et: Task) -> Union[PollingTask, str]:
    """Strictly periodic polling: period ``D``, budget ``C``; needs ``D == T``."""
    if et.D != et.T:
        return INFEASIBLE
    return PollingTask((et.id,), et.D, et.C, STRICT)


@dataclass(frozen=True)
class BaselineOutcome:
    table: Optional[ScheduleTable]
    cycle: int
    polling: Tuple[PollingTask, ...] = ()
    server: Optional[ServerAbstraction] = None
    reason: Optional[str] = None

    @property
    def feasible(self) -> bool:
        return self.table is not None


def _pin_strict(polls: Sequence[PollingTask], cycle: int, first_index: int):
    """Reserve one contiguous block per polling period at a fixed offset."""
    reserved = np.full(cycle, -1, dtype=np.int32)
    for k, p in enumerate(polls):
        for off in range(p.T_p - p.C_p + 1):
            spots = [s for base in range(off, cycle, p.T_p) for s in range(base, base + p.C_p)]
            if all(reserved[s] < 0 for s in spots):
                reserved[spots] = first_index + k
                break
        else:
            return None
    return reserved


def spoll(ts: TaskSet, cycle_cap: Optional[int] = None, conservative: bool = False,
          strict: bool = False) -> BaselineOutcome:
    """SPoll baseline: derive polling tasks, then schedule everything with LLF."""
    T = hyperperiod(ts.tt)
    cap = 4 * T if cycle_cap is None else cycle_cap
    polls: List[PollingTask] = []
    cycle = T
    for et in ts.et:
        p = spoll_strict(et) if strict else spoll_derive(et, cycle, cap, conservative)
        if p == INFEASIBLE:
            return BaselineOutcome(None, cycle, tuple(polls), reason=f"no polling period for {et.id}")
        polls.append(p)
        cycle = lcm([cycle, p.T_p])
    if cycle > cap:
        return BaselineOutcome(None, cycle, tuple(polls), reason="cycle cap exceeded")
    u = sum((t.utilization for t in ts.tt), Fraction(0)) + sum((p.utilization for p in polls), Fraction(0))
    if u > ts.lam:
        return BaselineOutcome(None, cycle, tuple(polls), reason="overload")
    if not strict:
        run = llf_table(list(ts.tt) + [p.as_task() for p in polls], cycle)
        return BaselineOutcome(run.table, cycle, tuple(polls),
                               reason=None if run.ok else "llf " + run.status)
    reserved = _pin_strict(polls, cycle, len(ts.tt))
    if reserved is None:
        return BaselineOutcome(None, cycle, tuple(polls), reason="no pinning offset")
    tt = list(ts.tt)
    status, _, _, slots = kernels.llf_run([t.C for t in tt], [t.T for t in tt],
                                          [t.D for t in tt], cycle, reserved=reserved)
    if status != kernels.OK:
        return BaselineOutcome(None, cycle, tuple(polls), reason="llf failed")
    ids = [t.id for t in tt] + [p.id for p in polls]
    return BaselineOutcome(ScheduleTable.from_indices(slots, ids), cycle, tuple(polls))


def _require_constrained(ts: TaskSet):
    for t in ts.et:
        if t.D > t.T:
            raise ValueError(f"{t.id}: level-i load needs constrained deadlines")


def level_i_load(ts: TaskSet, task: Task, t) -> int:
    """Worst-case demand of ET tasks at or above ``task``'s priority in ``[0, t)``.

    >>> from .taskmodel import et_task
    >>> ts = TaskSet([], [et_task("e", 1, 4)])
    >>> level_i_load(ts, ts.et[0], 4), level_i_load(ts, ts.et[0], 5)
    (1, 2)
    """
    _require_constrained(ts)
    t = Fraction(t)
    return sum(math.ceil(t / j.T) * j.C for j in ts.et if j.priority >= task.priority)


def advpoll_response(ts: TaskSet, task: Task, srv: ServerAbstraction):
    """Least ``R`` with ``R = delta + H(R) / a``, or :data:`DIVERGENT`."""
    _require_constrained(ts)
    if srv.C_p <= 0:
        return DIVERGENT
    a = srv.a
    first = sum(j.C for j in ts.et if j.priority >= task.priority)
    r = srv.delta + max(first, level_i_load(ts, task, srv.delta)) / a
    limit = task.D + srv.T_p
    while r <= limit:
        nxt = srv.delta + level_i_load(ts, task, r) / a
        if nxt == r:
            return r
        r = nxt
    return DIVERGENT


def _server_candidates(ts: TaskSet, cycle_cap: Optional[int]):
    T = hyperperiod(ts.tt) if ts.tt else 1
    cap = 4 * T if cycle_cap is None else cycle_cap
    u_tt = sum((t.utilization for t in ts.tt), Fraction(0))
    for T_p in range(1, min(t.D for t in ts.et) + 1):
        if lcm([T, T_p]) > cap:
            continue
        C_p = math.floor((ts.lam - u_tt) * T_p)
        if C_p <= 0:
            continue
        srv = ServerAbstraction(C_p, T_p)
        if _meets_deadlines(ts, srv):
            yield srv


def _meets_deadlines(ts: TaskSet, srv: ServerAbstraction) -> bool:
    for t in ts.et:
        r = advpoll_response(ts, t, srv)
        if r == DIVERGENT or r > t.D:
            return False
    return True


def advpoll_design(ts: TaskSet, cycle_cap: Optional[int] = None) -> Union[ServerAbstraction, str]:
    """Smallest server period whose maximal budget meets every ET deadline."""
    u = sum((t.utilization for t in ts.tasks), Fraction(0))
    if u > ts.lam:
        return INFEASIBLE
    if not ts.et:
        return ServerAbstraction(0, 1)
    return next(_server_candidates(ts, cycle_cap), INFEASIBLE)


def advpoll(ts: TaskSet, cycle_cap: Optional[int] = None) -> BaselineOutcome:
    """AdvPoll baseline: first server period whose LLF table exists."""
    T = hyperperiod(ts.tt)
    u = sum((t.utilization for t in ts.tasks), Fraction(0))
    if u > ts.lam:
        return BaselineOutcome(None, T, reason="overload")
    if not ts.et:
        run = llf_table(ts.tt, T)
        return BaselineOutcome(run.table, T, server=ServerAbstraction(0, 1),
                               reason=None if run.ok else "llf " + run.status)
    for srv in _server_candidates(ts, cycle_cap):
        cycle = lcm([T, srv.T_p])
        poll = PollingTask(tuple(t.id for t in ts.et), srv.T_p, srv.C_p, SERVER)
        run = llf_table(list(ts.tt) + [poll.as_task()], cycle)
        if run.ok:
            return BaselineOutcome(run.table, cycle, (poll,), srv)
    return BaselineOutcome(None, T, reason="no server")
