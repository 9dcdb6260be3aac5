"""Brute-force validation of schedule tables.

TT jobs are checked slot by slot. ET behaviour is measured by simulating the
second-level fixed-priority dispatcher in the idle slots of the repeating
table: for every phase ``phi`` of the cycle, all ET tasks release together at
``phi`` and then at their minimal inter-arrival time, over a window of two
cycles plus the largest deadline.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, Optional, Sequence, Tuple

import numpy as np

from . import kernels
from .blc import BlcParams, ScheduleTable, check_arrival_envelope
from .envelope import max_tt_burst
from .taskmodel import Task, TaskSet, lcm


@dataclass(frozen=True)
class TtViolation:
    task_id: str
    release: int
    shortfall: int     # slots missing (negative: too many)

    def __str__(self):
        return f"{self.task_id}@{self.release}: shortfall {self.shortfall}"


def validate_tt(sched: ScheduleTable, tt: Sequence[Task]) -> Optional[TtViolation]:
    """First TT job not given exactly ``C`` slots inside ``[release, deadline)``.

    Returns ``None`` when every job is served. Slots of a TT task outside all
    of its job windows count as a surplus on the job of that period.
    """
    cycle = sched.cycle_length
    if not tt:
        return None
    if cycle % lcm(t.T for t in tt):
        raise ValueError("table cycle is not a multiple of the TT hyperperiod")
    index = {t.id: k for k, t in enumerate(tt)}
    codes = np.array([index.get(s, -1) for s in sched.slots], dtype=np.int64)
    for k, task in enumerate(tt):
        mine = (codes == k).astype(np.int64)
        prefix = np.concatenate([[0], np.cumsum(mine)])
        for r in range(0, cycle, task.T):
            inside = int(prefix[r + task.D] - prefix[r])
            period = int(prefix[r + task.T] - prefix[r])
            if inside != task.C:
                return TtViolation(task.id, r, task.C - inside)
            if period != task.C:
                return TtViolation(task.id, r, task.C - period)
    return None


@dataclass(frozen=True)
class EtMeasurement:
    worst: Dict[str, int]
    witness: Dict[str, int]          # phase at which the worst response occurs
    unbounded: bool
    per_offset: np.ndarray = field(repr=False, compare=False)


def _et_arrays(et: Sequence[Task]):
    return ([t.C for t in et], [t.T for t in et], [t.priority for t in et])


def _window(sched: ScheduleTable, et: Sequence[Task]) -> Tuple[int, int]:
    cycle = sched.cycle_length
    return 2 * cycle, 2 * cycle + max(t.D for t in et)


def measure_et_worst(sched: ScheduleTable, et: Sequence[Task],
                     tt_ids: Optional[Iterable[str]] = None, pure: bool = False) -> EtMeasurement:
    """Worst ET response per task over every release phase of the table.

    With ``tt_ids`` only those ids block ET work (polling slots stay usable).
    """
    et = list(et)
    if not et:
        return EtMeasurement({}, {}, False, np.zeros((sched.cycle_length, 0), dtype=np.int64))
    busy = sched.busy_mask(tt_ids)
    C, T, P = _et_arrays(et)
    window, horizon = _window(sched, et)
    worst, unb = kernels.et_sweep(busy, C, T, P, sched.cycle_length, window, horizon, pure=pure)
    arg = np.argmax(worst, axis=0)
    return EtMeasurement(
        {t.id: int(worst[arg[k], k]) for k, t in enumerate(et)},
        {t.id: int(arg[k]) for k, t in enumerate(et)},
        bool(unb.any()),
        worst,
    )


def simulate_offset(sched: ScheduleTable, et: Sequence[Task], phi: int,
                    tt_ids: Optional[Iterable[str]] = None, pure: bool = True) -> Dict[str, int]:
    """Replay one phase; by default through the independent pure-Python simulator."""
    et = list(et)
    C, T, P = _et_arrays(et)
    window, horizon = _window(sched, et)
    worst, _, _, _ = kernels.et_offset(sched.busy_mask(tt_ids), C, T, P, phi,
                                       sched.cycle_length, window, horizon, pure=pure)
    return {t.id: int(w) for t, w in zip(et, worst)}


@dataclass(frozen=True)
class ValidationReport:
    tt_violation: Optional[TtViolation]
    et: EtMeasurement
    deadline_misses: Tuple[str, ...]
    bound_violations: Tuple[str, ...] = ()
    envelope_ok: Optional[bool] = None
    bounds: Dict[str, Fraction] = field(default_factory=dict)

    @property
    def tt_ok(self) -> bool:
        return self.tt_violation is None

    @property
    def et_ok(self) -> bool:
        return not self.deadline_misses and not self.et.unbounded

    @property
    def ok(self) -> bool:
        return (self.tt_ok and self.et_ok and not self.bound_violations
                and self.envelope_ok is not False)


def full_report(sched: ScheduleTable, ts: TaskSet, params: Optional[BlcParams] = None,
                tt_ids: Optional[Iterable[str]] = None) -> ValidationReport:
    """TT check, ET sweep and, for BLC tables, the analytic and envelope checks.

    ``params`` given: each measured ET response must stay within the response
    bound evaluated at ``b = l_m``, and the TT slots must fit the envelope
    ``u_tt * t + l_m``.
    """
    if tt_ids is None:
        tt_ids = [t.id for t in ts.tt]
    tt_ids = list(tt_ids)
    tt_violation = validate_tt(sched, ts.tt)
    et = measure_et_worst(sched, ts.et, tt_ids)
    misses = tuple(t.id for t in ts.et if et.worst[t.id] > t.D)
    if params is None:
        return ValidationReport(tt_violation, et, misses)
    levels = max_tt_burst(ts).per_priority
    bounds = {}
    over = []
    for t in ts.et:
        lb = levels[t.priority]
        bounds[t.id] = math.inf if lb.admissible_burst is None else lb.response_bound(params.l_m)
        if et.worst[t.id] > bounds[t.id]:
            over.append(t.id)
    u_tt = sum((t.utilization for t in ts.tt), Fraction(0))
    env = check_arrival_envelope(sched, u_tt, params.l_m, tt_ids)
    return ValidationReport(tt_violation, et, misses, tuple(over), env.ok, bounds)
