"""Burst limiting constraint (BLC) budget automaton and schedule conformance checks.

One slot is one time unit, so the per-slot budget change equals the rate:
``-i_tt`` for a TT slot and ``+i_idle`` (clamped at ``l_m``) for an idle slot.
The budget is linear inside a slot, so checking slot boundaries is exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Tuple

import numpy as np

IDLE = None


@dataclass(frozen=True)
class BlcParams:
    """BLC rates and ceiling. ``i_tt + i_idle`` is the capacity."""

    i_tt: Fraction
    i_idle: Fraction
    l_m: Fraction

    def __post_init__(self):
        for name in ("i_tt", "i_idle", "l_m"):
            object.__setattr__(self, name, Fraction(getattr(self, name)))
        if self.i_tt <= 0:
            raise ValueError("i_tt must be positive")
        if self.i_idle < 0 or self.l_m < 0:
            raise ValueError("i_idle and l_m must be non-negative")

    @classmethod
    def for_envelope(cls, u_tt, b_max, lam=1) -> "BlcParams":
        """Parameters enforcing the TT envelope ``u_tt * t + b_max``."""
        return cls(Fraction(lam) - Fraction(u_tt), Fraction(u_tt), Fraction(b_max))

    @property
    def capacity(self) -> Fraction:
        return self.i_tt + self.i_idle

    @property
    def admits_tt(self) -> bool:
        return self.l_m >= self.i_tt


@dataclass(frozen=True)
class ScheduleTable:
    """One schedule cycle: ``slots[t]`` is a task id or ``None`` (idle)."""

    slots: Tuple[Optional[str], ...]

    def __post_init__(self):
        object.__setattr__(self, "slots", tuple(self.slots))

    @property
    def cycle_length(self) -> int:
        return len(self.slots)

    def __len__(self):
        return len(self.slots)

    def busy_mask(self, tt_ids: Optional[Iterable[str]] = None) -> np.ndarray:
        """1 where a slot is taken by TT work; with ``tt_ids`` only those ids count."""
        if tt_ids is None:
            return np.fromiter((s is not None for s in self.slots), dtype=np.int8,
                               count=len(self.slots))
        ids = set(tt_ids)
        return np.fromiter((s in ids for s in self.slots), dtype=np.int8,
                           count=len(self.slots))

    def repeated(self, times: int) -> "ScheduleTable":
        return ScheduleTable(self.slots * times)

    @classmethod
    def from_indices(cls, indices: Sequence[int], ids: Sequence[str]) -> "ScheduleTable":
        return cls(tuple(ids[i] if i >= 0 else None for i in indices))

    @classmethod
    def from_pattern(cls, pattern: str, tt_id: str = "tt") -> "ScheduleTable":
        """Build a table from a string like ``".TTT.."`` (``.`` is idle)."""
        return cls(tuple(tt_id if ch != "." else None for ch in pattern))


def step_budget(bdg, tt_slot: bool, params: BlcParams) -> Fraction:
    if tt_slot:
        return Fraction(bdg) - params.i_tt
    return min(Fraction(bdg) + params.i_idle, params.l_m)


@dataclass(frozen=True)
class BudgetTrace:
    """Budget at every slot boundary ``0..cycle`` plus idle time spent saturated."""

    values: Tuple[Fraction, ...]
    saturated: Tuple[Fraction, ...]   # per slot, time spent pinned at l_m

    def __getitem__(self, t):
        return self.values[t]


@dataclass(frozen=True)
class Conformance:
    ok: bool
    violation: Optional[int] = None      # first violating slot
    trace: Optional[BudgetTrace] = None


def budget_trace(sched: ScheduleTable, params: BlcParams, initial_budget=None,
                 tt_ids=None) -> BudgetTrace:
    busy = sched.busy_mask(tt_ids)
    b = params.l_m if initial_budget is None else Fraction(initial_budget)
    values = [b]
    sat = []
    for tt in busy:
        if tt:
            b = b - params.i_tt
            sat.append(Fraction(0))
        else:
            nb = b + params.i_idle
            if nb > params.l_m:
                # time needed to reach the ceiling, rest of the slot is saturated
                reach = (params.l_m - b) / params.i_idle if params.i_idle else Fraction(0)
                sat.append(1 - max(Fraction(0), min(Fraction(1), reach)))
                nb = params.l_m
            else:
                sat.append(Fraction(0))
            b = nb
        values.append(b)
    return BudgetTrace(tuple(values), tuple(sat))


def check_blc(sched: ScheduleTable, params: BlcParams, initial_budget=None,
              tt_ids=None) -> Conformance:
    """A TT slot violates the BLC when the budget is negative at its end."""
    trace = budget_trace(sched, params, initial_budget, tt_ids)
    busy = sched.busy_mask(tt_ids)
    for t, tt in enumerate(busy):
        if tt and trace.values[t + 1] < 0:
            return Conformance(False, t, trace)
    return Conformance(True, None, trace)


def check_tb(sched: ScheduleTable, rate, burst, tt_ids=None) -> Conformance:
    """Token bucket: pay 1 at the start of each TT slot, refill at ``rate`` up to ``burst``."""
    rate, burst = Fraction(rate), Fraction(burst)
    balance = burst
    values = [balance]
    first = None
    for t, tt in enumerate(sched.busy_mask(tt_ids)):
        if t > 0:
            balance = min(burst, balance + rate)
        if tt:
            balance -= 1
            if balance < 0 and first is None:
                first = t
        values.append(balance)
    trace = BudgetTrace(tuple(values), tuple(Fraction(0) for _ in values[1:]))
    return Conformance(first is None, first, trace)


@dataclass(frozen=True)
class EnvelopeCheck:
    ok: bool
    window: Optional[Tuple[int, int]] = None   # [s, t) with more TT slots than allowed


def check_arrival_envelope(sched: ScheduleTable, r, b, tt_ids=None) -> EnvelopeCheck:
    """Check ``TT slots in [s, t) <= r * (t - s) + b`` for all windows.

    The table is laid out twice so windows crossing the cycle boundary are
    covered. Runs in linear time: a window violates the bound exactly when
    ``(P[t] - r t) - (P[s] - r s) > b`` for the prefix count ``P``.
    """
    r, b = Fraction(r), Fraction(b)
    busy = sched.busy_mask(tt_ids)
    if len(busy) == 0:
        return EnvelopeCheck(True)
    doubled = np.concatenate([busy, busy]).astype(np.int64)
    n = len(doubled)
    q = r.denominator * b.denominator
    rq, bq = r.numerator * b.denominator, b.numerator * r.denominator
    prefix = np.concatenate([[0], np.cumsum(doubled)])
    if (n + 1) * (q + rq + 1) < (1 << 60):
        score = prefix * q - rq * np.arange(n + 1, dtype=np.int64)
    else:
        score = np.array([int(p) * q - rq * k for k, p in enumerate(prefix)], dtype=object)
    run_min = np.minimum.accumulate(score)
    excess = score[1:] - run_min[:-1]
    bad = np.nonzero(excess > bq)[0]
    if len(bad) == 0:
        return EnvelopeCheck(True)
    t = int(bad[0]) + 1
    s = int(np.nonzero(score[:t] == run_min[t - 1])[0][0])
    return EnvelopeCheck(False, (s, t))


def count_window(sched: ScheduleTable, s: int, t: int, tt_ids=None) -> int:
    """TT slots in ``[s, t)`` of the table repeated cyclically."""
    busy = sched.busy_mask(tt_ids)
    c = len(busy)
    return int(sum(busy[k % c] for k in range(s, t)))
