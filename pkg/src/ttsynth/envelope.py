"""Maximal affine envelope for the TT schedule.

The TT tasks are abstracted as ``alpha(t) = U^TT * t + b``. Each ET priority
level tolerates a TT burst ``b`` up to the point where its response bound
``(b + C^ET_{>=p}) / (lambda - U_{>p})`` reaches its shortest deadline.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Optional

from . import rtc
from .taskmodel import TaskSet, utilization_aggregates

#: ``b_tt_max`` value when no non-negative burst satisfies every ET deadline.
INFEASIBLE = "infeasible"


@dataclass(frozen=True)
class LevelBound:
    priority: int
    rate: Fraction            # lambda - U_{>p}
    demand: int               # C^ET_{>=p}
    min_deadline: int
    admissible_burst: Optional[Fraction]   # None when the level is saturated

    def response_bound(self, b_tt) -> Fraction:
        return (Fraction(b_tt) + self.demand) / self.rate

    @property
    def slack(self):
        return self.admissible_burst


@dataclass(frozen=True)
class EnvelopeResult:
    b_tt_max: object                      # Fraction or INFEASIBLE
    c_tt: int
    per_priority: Dict[int, LevelBound] = field(default_factory=dict)
    binding: Optional[int] = None         # priority level that sets the min, None if C^TT binds

    @property
    def feasible(self) -> bool:
        return self.b_tt_max != INFEASIBLE


def worst_case_tt_burst_bound(ts: TaskSet) -> int:
    """Burst of the TT arrival curve obtained by summing per-task curves: C^TT."""
    return sum(t.C for t in ts.tt)


def et_response_time(ts: TaskSet, p: int, b_tt) -> Fraction:
    """Response bound of ET priority level ``p`` under a TT burst ``b_tt``."""
    agg = utilization_aggregates(ts)
    if p not in agg.levels:
        raise KeyError(f"no ET task at priority {p}")
    lv = agg.levels[p]
    alpha_tt = rtc.AffineCurve(agg.u_tt, b_tt)
    alpha_hi = rtc.AffineCurve(lv.u_et_higher, lv.c_et_higher)
    # raises SaturatedError when U_{>p} >= lambda
    beta = rtc.residual_service(ts.lam, rtc.sum_affine(alpha_hi, alpha_tt))
    d = rtc.hdev(rtc.AffineCurve(lv.u_et_equal, lv.c_et_equal), beta)
    if d == rtc.UNBOUNDED:
        raise rtc.SaturatedError(f"level {p} demand rate exceeds residual service")
    return d


def max_tt_burst(ts: TaskSet) -> EnvelopeResult:
    """Largest TT burst keeping every ET task within its deadline."""
    agg = utilization_aggregates(ts)
    c_tt = agg.c_tt
    best = Fraction(c_tt)
    binding = None
    infeasible = False
    levels = {}
    for p, lv in agg.levels.items():
        rate = ts.lam - lv.u_higher
        if rate <= 0 or lv.u_et_equal > rate:
            levels[p] = LevelBound(p, rate, lv.c_et_at_least, lv.min_deadline, None)
            if not infeasible:
                binding = p
            infeasible = True
            continue
        burst = rate * lv.min_deadline - lv.c_et_at_least
        levels[p] = LevelBound(p, rate, lv.c_et_at_least, lv.min_deadline, burst)
        if burst < best and not infeasible:
            best, binding = burst, p
    if infeasible or best < 0:
        return EnvelopeResult(INFEASIBLE, c_tt, levels, binding)
    return EnvelopeResult(best, c_tt, levels, binding)
