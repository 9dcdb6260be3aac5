"""Task and task-set data model.

All durations are integers counted in microticks. Utilizations and every
quantity derived from them are :class:`fractions.Fraction` values so that
budget and curve computations stay exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

TT = "TT"
ET = "ET"


@dataclass(frozen=True)
class Task:
    """A time-triggered (periodic) or event-triggered (sporadic) task.

    ``T`` is the period for TT tasks and the minimal inter-arrival time for
    ET tasks. Larger ``priority`` values mean higher priority.

    >>> Task("a", TT, C=1, T=3, D=3, priority=7).utilization
    Fraction(1, 3)
    """

    id: str
    kind: str
    C: int
    T: int
    D: int
    priority: int = 0

    @property
    def utilization(self) -> Fraction:
        return Fraction(self.C, self.T)

    @property
    def is_tt(self) -> bool:
        return self.kind == TT


def tt_task(id: str, C: int, T: int, D: Optional[int] = None,
            priority: int = 7) -> Task:
    return Task(id, TT, C, T, T if D is None else D, priority)


def et_task(id: str, C: int, T: int, D: Optional[int] = None,
            priority: int = 0) -> Task:
    return Task(id, ET, C, T, T if D is None else D, priority)


@dataclass(frozen=True)
class TaskSet:
    """TT and ET tasks scheduled on one core of capacity ``lam``."""

    tt: Tuple[Task, ...] = ()
    et: Tuple[Task, ...] = ()
    microtick_ns: int = 1
    lam: Fraction = Fraction(1)

    def __post_init__(self):
        object.__setattr__(self, "tt", tuple(self.tt))
        object.__setattr__(self, "et", tuple(self.et))
        object.__setattr__(self, "lam", Fraction(self.lam))

    @property
    def tasks(self) -> Tuple[Task, ...]:
        return self.tt + self.et

    def with_et(self, et: Iterable[Task]) -> "TaskSet":
        return TaskSet(self.tt, tuple(et), self.microtick_ns, self.lam)


def lcm(values: Iterable[int]) -> int:
    return reduce(lambda a, b: a * b // math.gcd(a, b), values, 1)


def hyperperiod(tt: Sequence[Task]) -> int:
    """Least common multiple of the TT periods.

    >>> hyperperiod([tt_task("a", 1, 2000), tt_task("b", 1, 3000),
    ...              tt_task("c", 1, 4000)])
    12000
    """
    if not tt:
        raise ValueError("hyperperiod of an empty TT task set")
    return lcm(t.T for t in tt)


@dataclass(frozen=True)
class LevelAggregates:
    """Sums seen from ET priority level ``p``."""

    priority: int
    u_higher: Fraction      # U_{>p}, TT included
    u_et_equal: Fraction    # U^ET_{=p}
    u_et_higher: Fraction   # U^ET_{>p}
    c_et_higher: int        # C^ET_{>p}
    c_et_equal: int         # C^ET_{=p}
    c_et_at_least: int      # C^ET_{>=p}
    min_deadline: int       # min D_j over ET tasks at level p


@dataclass(frozen=True)
class Aggregates:
    u_tt: Fraction
    u_et: Fraction
    c_tt: int
    c_et: int
    levels: Dict[int, LevelAggregates] = field(default_factory=dict)


def utilization_aggregates(ts: TaskSet) -> Aggregates:
    """Exact utilization and computation sums, per ET priority level."""
    u_tt = sum((t.utilization for t in ts.tt), Fraction(0))
    u_et = sum((t.utilization for t in ts.et), Fraction(0))
    c_tt = sum(t.C for t in ts.tt)
    levels = {}
    for p in sorted({t.priority for t in ts.et}):
        eq = [t for t in ts.et if t.priority == p]
        hi = [t for t in ts.et if t.priority > p]
        u_et_hi = sum((t.utilization for t in hi), Fraction(0))
        c_hi = sum(t.C for t in hi)
        c_eq = sum(t.C for t in eq)
        levels[p] = LevelAggregates(
            priority=p,
            u_higher=u_tt + u_et_hi,
            u_et_equal=sum((t.utilization for t in eq), Fraction(0)),
            u_et_higher=u_et_hi,
            c_et_higher=c_hi,
            c_et_equal=c_eq,
            c_et_at_least=c_hi + c_eq,
            min_deadline=min(t.D for t in eq),
        )
    return Aggregates(u_tt, u_et, c_tt, sum(t.C for t in ts.et), levels)


@dataclass(frozen=True)
class Violation:
    task_id: Optional[str]
    rule: str

    def __str__(self):
        return f"{self.task_id}: {self.rule}" if self.task_id else self.rule


def validate(ts: TaskSet) -> List[Violation]:
    """Return every broken task/task-set rule; empty when the set is valid."""
    out: List[Violation] = []
    seen = set()
    for t in ts.tasks:
        if t.id in seen:
            out.append(Violation(t.id, "duplicate task id"))
        seen.add(t.id)
        bad = [name for name in ("C", "T", "D", "priority")
               if not isinstance(getattr(t, name), int) or isinstance(getattr(t, name), bool)]
        if bad:
            out.extend(Violation(t.id, f"{name} is not an integer") for name in bad)
            continue
        if t.C < 1:
            out.append(Violation(t.id, "computation time below one microtick"))
        if t.T < t.C:
            out.append(Violation(t.id, "period shorter than computation time"))
        if t.priority < 0:
            out.append(Violation(t.id, "negative priority"))
        if t.kind == TT:
            if t.D > t.T:
                out.append(Violation(t.id, "TT deadline exceeds period"))
            if t.D < t.C:
                out.append(Violation(t.id, "TT deadline shorter than computation time"))
        elif t.kind == ET:
            if t.D < t.C:
                out.append(Violation(t.id, "ET deadline shorter than computation time"))
        else:
            out.append(Violation(t.id, f"unknown task kind {t.kind!r}"))
    for t in ts.tt:
        if t.kind != TT:
            out.append(Violation(t.id, "non-TT task in the TT list"))
    for t in ts.et:
        if t.kind != ET:
            out.append(Violation(t.id, "non-ET task in the ET list"))
    tt_prios = {t.priority for t in ts.tt}
    if len(tt_prios) > 1:
        out.append(Violation(None, "TT tasks do not share one priority"))
    if tt_prios and ts.et and min(tt_prios) <= max(t.priority for t in ts.et):
        out.append(Violation(None, "TT priority not above every ET priority"))
    if ts.lam <= 0:
        out.append(Violation(None, "capacity must be positive"))
    if not any(v.rule.endswith("integer") for v in out):
        total = sum((Fraction(t.C, t.T) for t in ts.tasks if t.T > 0), Fraction(0))
        if total > ts.lam:
            out.append(Violation(None, f"overload: utilization {total} exceeds capacity {ts.lam}"))
    return out
