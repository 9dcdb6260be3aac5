"""Affine real-time calculus primitives.

Curves are kept symbolic as pairs of exact rationals. The only sampled
computation is :func:`numeric_hdev`, a grid cross-check for the closed forms.
"""

from __future__ import annotations

import math
from bisect import bisect_left
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

Number = Union[int, Fraction]

#: Tag returned by :func:`hdev` when the arrival rate exceeds the service rate.
UNBOUNDED = math.inf


class SaturatedError(ValueError):
    """Interfering demand uses the whole capacity; no residual service left."""


@dataclass(frozen=True)
class AffineCurve:
    """``t -> rate * t + burst`` for ``t > 0`` and ``0`` at ``t = 0``."""

    rate: Fraction = Fraction(0)
    burst: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "rate", Fraction(self.rate))
        object.__setattr__(self, "burst", Fraction(self.burst))
        if self.rate < 0 or self.burst < 0:
            raise ValueError("affine curve needs non-negative rate and burst")

    def __call__(self, t: Number) -> Fraction:
        return self.rate * t + self.burst if t > 0 else Fraction(0)

    def __add__(self, other: "AffineCurve") -> "AffineCurve":
        return sum_affine(self, other)

    @classmethod
    def of_task(cls, C: int, T: int) -> "AffineCurve":
        """Linear arrival curve of a periodic/sporadic task: rate C/T, burst C."""
        return cls(Fraction(C, T), Fraction(C))


@dataclass(frozen=True)
class RateLatencyCurve:
    """``t -> rate * max(0, t - latency)``."""

    rate: Fraction
    latency: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "rate", Fraction(self.rate))
        object.__setattr__(self, "latency", Fraction(self.latency))
        if self.rate <= 0 or self.latency < 0:
            raise ValueError("rate-latency curve needs rate > 0 and latency >= 0")

    def __call__(self, t: Number) -> Fraction:
        return self.rate * max(Fraction(0), t - self.latency)


@dataclass(frozen=True)
class MaxServiceCurve:
    """Upper bound ``t -> rate * t + burst`` on delivered service.

    With ``burst == 0`` this is the pure capacity bound ``lambda * t``.
    """

    rate: Fraction
    burst: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "rate", Fraction(self.rate))
        object.__setattr__(self, "burst", Fraction(self.burst))

    def __call__(self, t: Number) -> Fraction:
        return self.rate * t + self.burst if t > 0 else Fraction(0)


ZERO = AffineCurve()


def sum_affine(a: AffineCurve, b: AffineCurve) -> AffineCurve:
    return AffineCurve(a.rate + b.rate, a.burst + b.burst)


def hdev(alpha: AffineCurve, beta: RateLatencyCurve):
    """Maximum horizontal distance ``L + b/R``, or :data:`UNBOUNDED`."""
    if alpha.rate > beta.rate:
        return UNBOUNDED
    return beta.latency + alpha.burst / beta.rate


def residual_service(total_rate: Number, interferers: AffineCurve,
                     latency: Number = 0) -> RateLatencyCurve:
    """Service left by a capacity ``beta_{total_rate, latency}`` after higher-priority demand.

    >>> residual_service(1, AffineCurve(Fraction(1, 3), 2))
    RateLatencyCurve(rate=Fraction(2, 3), latency=Fraction(3, 1))
    """
    total_rate = Fraction(total_rate)
    if interferers.rate >= total_rate:
        raise SaturatedError(
            f"interfering rate {interferers.rate} >= capacity {total_rate}")
    left = total_rate - interferers.rate
    return RateLatencyCurve(left, (total_rate * latency + interferers.burst) / left)


def sample(curve, horizon: int) -> list:
    """Values of ``curve`` on the integer grid ``0..horizon``."""
    return [curve(t) for t in range(horizon + 1)]


def numeric_hdev(alpha: Sequence, beta: Sequence, horizon: int) -> int:
    """Grid horizontal deviation between two sampled non-decreasing curves.

    For each grid point ``t`` in ``0..horizon`` the distance is the least
    integer ``d`` with ``alpha[t] <= beta[t + d]``; the result is the largest
    such distance. ``beta`` may be sampled beyond ``horizon``. Raises
    ``ValueError`` when some ``alpha[t]`` is never reached by ``beta`` within
    its samples, i.e. the horizon is too small to witness the maximum.
    """
    if len(alpha) <= horizon or len(beta) <= horizon:
        raise ValueError("curves must be sampled on 0..horizon")
    worst = 0
    n = len(beta)
    for t in range(horizon + 1):
        s = bisect_left(beta, alpha[t], lo=t)
        if s >= n:
            raise ValueError(f"horizon too small: alpha({t}) not reached by beta")
        worst = max(worst, s - t)
    return worst
