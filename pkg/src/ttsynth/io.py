"""JSON formats for task sets and schedule tables.

Task set::

    {"microtick_ns": 10000, "lambda": [1, 1],
     "tasks": [{"id": "tt0", "kind": "TT", "C": 3, "T": 200, "D": 200, "priority": 7}, ...]}

Schedule::

    {"cycle_length": 6, "params": {"i_tt": [2, 3], "i_idle": [1, 3], "l_m": [2, 1]},
     "slots": ["IDLE", "tt0", ...]}

Rationals are ``[numerator, denominator]`` pairs; strings such as ``"2/3"`` are
accepted on input. ``params`` is ``null`` for tables built without a BLC.
Extra keys in a schedule file (``initial_budget``, ``l_m_min``, ``method``,
``tt_ids``) are carried in :attr:`ScheduleFile.extra`.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, Optional

from .blc import BlcParams, ScheduleTable
from .taskmodel import ET, TT, Task, TaskSet

IDLE_TOKEN = "IDLE"


class InputError(ValueError):
    """Malformed input file."""


def rational_to_json(x) -> list:
    x = Fraction(x)
    return [x.numerator, x.denominator]


def rational_from_json(v) -> Fraction:
    try:
        if isinstance(v, (list, tuple)) and len(v) == 2:
            return Fraction(int(v[0]), int(v[1]))
        if isinstance(v, bool):
            raise TypeError
        if isinstance(v, (int, str)):
            return Fraction(v)
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise InputError(f"bad rational {v!r}") from exc
    raise InputError(f"bad rational {v!r}")


def taskset_to_dict(ts: TaskSet) -> Dict[str, Any]:
    return {
        "microtick_ns": ts.microtick_ns,
        "lambda": rational_to_json(ts.lam),
        "tasks": [{"id": t.id, "kind": t.kind, "C": t.C, "T": t.T, "D": t.D,
                   "priority": t.priority} for t in ts.tasks],
    }


def taskset_from_dict(d: Dict[str, Any]) -> TaskSet:
    try:
        tasks = [Task(str(x["id"]), x["kind"], x["C"], x["T"], x["D"], x.get("priority", 0))
                 for x in d["tasks"]]
        lam = rational_from_json(d.get("lambda", [1, 1]))
        microtick = int(d.get("microtick_ns", 1))
    except (KeyError, TypeError) as exc:
        raise InputError(f"malformed task set: {exc}") from exc
    kinds = {t.kind for t in tasks}
    if not kinds <= {TT, ET}:
        raise InputError(f"unknown task kind in {sorted(kinds)}")
    return TaskSet(tuple(t for t in tasks if t.kind == TT),
                   tuple(t for t in tasks if t.kind == ET), microtick, lam)


@dataclass(frozen=True)
class ScheduleFile:
    table: ScheduleTable
    params: Optional[BlcParams] = None
    extra: Dict[str, Any] = field(default_factory=dict)


def schedule_to_dict(table: ScheduleTable, params: Optional[BlcParams] = None,
                     **extra) -> Dict[str, Any]:
    d = {
        "cycle_length": table.cycle_length,
        "params": None if params is None else {
            "i_tt": rational_to_json(params.i_tt),
            "i_idle": rational_to_json(params.i_idle),
            "l_m": rational_to_json(params.l_m),
        },
        "slots": [IDLE_TOKEN if s is None else s for s in table.slots],
    }
    for k, v in extra.items():
        d[k] = rational_to_json(v) if isinstance(v, Fraction) else v
    return d


def schedule_from_dict(d: Dict[str, Any]) -> ScheduleFile:
    try:
        slots = [None if s == IDLE_TOKEN else str(s) for s in d["slots"]]
        n = int(d.get("cycle_length", len(slots)))
        p = d.get("params")
        params = None
        if p is not None:
            params = BlcParams(rational_from_json(p["i_tt"]), rational_from_json(p["i_idle"]),
                               rational_from_json(p["l_m"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed schedule: {exc}") from exc
    if n != len(slots):
        raise InputError(f"cycle_length {n} does not match {len(slots)} slots")
    extra = {k: v for k, v in d.items() if k not in ("cycle_length", "params", "slots")}
    return ScheduleFile(ScheduleTable(slots), params, extra)


def _read_json(path) -> Any:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: {exc}") from exc


def _write_json(path, obj) -> None:
    Path(path).write_text(json.dumps(obj, indent=1) + "\n", encoding="utf-8")


def read_taskset(path) -> TaskSet:
    return taskset_from_dict(_read_json(path))


def write_taskset(path, ts: TaskSet) -> None:
    _write_json(path, taskset_to_dict(ts))


def read_schedule(path) -> ScheduleFile:
    return schedule_from_dict(_read_json(path))


def write_schedule(path, table: ScheduleTable, params: Optional[BlcParams] = None, **extra) -> None:
    _write_json(path, schedule_to_dict(table, params, **extra))
