"""Schedulability and runtime sweeps over generated task sets.

Every feasible verdict is re-checked by the brute-force oracle before it is
counted; a synthesis result that fails the oracle is recorded as infeasible
with ``oracle_ok = 0``. Wall time covers synthesis only.
"""

from __future__ import annotations

import csv
import hashlib
import json
import signal
import time
from contextlib import contextmanager
from dataclasses import asdict, dataclass
from fractions import Fraction
from pathlib import Path
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from .b3lf import InvariantBreach, admit_et_iteration, binary_b3lf, synthesize
from .envelope import max_tt_burst
from .oracle import full_report
from .polling import advpoll, spoll
from .taskgen import CONSTRAINED, QUINTILE, GenerationError, GenSpec, batch_seeds, generate
from .taskmodel import TaskSet, et_task, hyperperiod, tt_task

SCHEMA_VERSION = 1
METHODS = ("b3lf", "binary_b3lf", "spoll", "advpoll")
DESK_MICROTICK_NS = 100_000
DESK_PERIODS = (200, 300, 400)          # 20/30/40 ms at 100 us

INSTANCE_FIELDS = [
    "schema_version", "config_hash", "point", "u_tt", "u_et", "n_tt", "n_et",
    "deadline_mode", "quintile", "seed", "method", "feasible", "synth_feasible",
    "oracle_ok", "reason", "wall_time", "cycle_length", "b_tt_max", "l_m",
    "iterations", "iteration_bound", "server",
]
SUMMARY_FIELDS = [
    "schema_version", "config_hash", "point", "method", "instances", "feasible",
    "schedulability_pct", "oracle_failures", "timeouts", "generation_failures",
    "mean_wall_time",
]


@dataclass(frozen=True)
class SweepPoint:
    label: str
    u_tt: Fraction
    u_et: Fraction
    n_tt: int
    n_et: int
    period_set: Tuple[int, ...]
    deadline_mode: str = CONSTRAINED
    quintile: int = 1


@dataclass(frozen=True)
class ExperimentConfig:
    points: Tuple[SweepPoint, ...]
    methods: Tuple[str, ...] = ("b3lf", "binary_b3lf", "spoll")
    repetitions: int = 25
    seed: int = 0
    timeout: float = 60.0
    microtick_ns: int = DESK_MICROTICK_NS
    cycle_cap_factor: int = 4
    spoll_conservative: bool = False
    exhaustive_budget: bool = False

    def digest(self) -> str:
        blob = json.dumps(asdict(self), sort_keys=True, default=str)
        return hashlib.sha256(blob.encode()).hexdigest()[:12]


def utilization_tuples(step: Fraction = Fraction(1, 10), top: Fraction = Fraction(7, 10),
                       total: Fraction = Fraction(9, 10)) -> List[Tuple[Fraction, Fraction]]:
    """``(u_tt, u_et)`` pairs on the grid with ``u_tt + u_et <= total``.

    >>> len(utilization_tuples())
    34
    """
    grid = [k * step for k in range(1, int(top / step) + 1)]
    return [(a, b) for a in grid for b in grid if a + b <= total]


def utilization_axis(n_tt=30, n_et=20, period_set=DESK_PERIODS,
                     deadline_mode=CONSTRAINED) -> Tuple[SweepPoint, ...]:
    return tuple(SweepPoint(f"{float(a):.1f}/{float(b):.1f}", a, b, n_tt, n_et,
                            tuple(period_set), deadline_mode)
                 for a, b in utilization_tuples())


def task_count_axis(counts=(8, 16, 32, 64), period_set=(500, 1000)) -> Tuple[SweepPoint, ...]:
    """Equal TT/ET counts at 20% + 20% utilization and fixed hyperperiod."""
    return tuple(SweepPoint(f"n={n}", Fraction(1, 5), Fraction(1, 5), n // 2, n // 2,
                            tuple(period_set)) for n in counts)


def laxity_axis(n=8, period_set=(500, 1000)) -> Tuple[SweepPoint, ...]:
    """Deadlines drawn from the k-th quintile of ``[C, T]``, k = 1..5."""
    return tuple(SweepPoint(f"k={k}", Fraction(1, 5), Fraction(1, 5), n, n,
                            tuple(period_set), QUINTILE, k) for k in range(1, 6))


@contextmanager
def time_limit(seconds: float):
    """Raise :class:`TimeoutError` after ``seconds`` of wall time (main thread only)."""
    if not seconds or seconds <= 0:
        yield
        return

    def _fire(signum, frame):
        raise TimeoutError

    old = signal.signal(signal.SIGALRM, _fire)
    signal.setitimer(signal.ITIMER_REAL, seconds)
    try:
        yield
    finally:
        signal.setitimer(signal.ITIMER_REAL, 0)
        signal.signal(signal.SIGALRM, old)


@dataclass
class MethodResult:
    table: object = None
    params: object = None
    tt_ids: Optional[List[str]] = None
    reason: Optional[str] = None
    cycle_length: int = 0
    l_m: Optional[Fraction] = None
    iterations: Optional[int] = None
    iteration_bound: Optional[int] = None
    server: str = ""


def _iteration_bound(params) -> Optional[int]:
    if params is None:
        return None
    return int(params.l_m // params.i_tt) + 2


def run_method(ts: TaskSet, method: str, cfg: ExperimentConfig) -> MethodResult:
    T = hyperperiod(ts.tt)
    cap = cfg.cycle_cap_factor * T
    tt_ids = [t.id for t in ts.tt]
    if method == "b3lf":
        out = synthesize(ts, exhaustive=cfg.exhaustive_budget)
        return MethodResult(out.table, out.params, tt_ids, out.reason, T,
                            out.params.l_m if out.params else None, out.iterations,
                            _iteration_bound(out.params))
    if method == "binary_b3lf":
        design = binary_b3lf(ts.tt, T, ts.lam)
        if not design.feasible:
            return MethodResult(reason="tt-infeasible", cycle_length=T)
        out = design.outcome
        if not admit_et_iteration(design.l_m_min, ts):
            return MethodResult(reason="rejected", cycle_length=T, l_m=design.l_m_min,
                                iterations=out.iterations)
        return MethodResult(out.table, out.params, tt_ids, None, T, design.l_m_min,
                            out.iterations, _iteration_bound(out.params))
    if method == "spoll":
        out = spoll(ts, cap, cfg.spoll_conservative)
        server = ";".join(f"{p.C_p}/{p.T_p}" for p in out.polling)
        return MethodResult(out.table, None, tt_ids, out.reason, out.cycle, server=server)
    if method == "advpoll":
        if any(t.D > t.T for t in ts.et):
            return MethodResult(reason="arbitrary-deadline", cycle_length=T)
        out = advpoll(ts, cap)
        server = f"{out.server.C_p}/{out.server.T_p}" if out.server else ""
        return MethodResult(out.table, None, tt_ids, out.reason, out.cycle, server=server)
    raise ValueError(f"unknown method {method!r}")


def run_instance(ts: TaskSet, method: str, cfg: ExperimentConfig) -> Dict[str, object]:
    row: Dict[str, object] = {"method": method}
    t0 = time.perf_counter()
    try:
        with time_limit(cfg.timeout):
            res = run_method(ts, method, cfg)
    except TimeoutError:
        res = MethodResult(reason="timeout")
    except InvariantBreach as exc:
        res = MethodResult(reason=f"invariant-breach: {exc}")
    wall = time.perf_counter() - t0
    synth_ok = res.table is not None
    oracle_ok = ""
    feasible = False
    if synth_ok:
        rep = full_report(res.table, ts, res.params, res.tt_ids)
        oracle_ok = int(rep.ok)
        feasible = rep.ok
        if not rep.ok:
            res.reason = "oracle-rejected"
    env = max_tt_burst(ts)
    row.update(
        feasible=int(feasible), synth_feasible=int(synth_ok), oracle_ok=oracle_ok,
        reason=res.reason or "", wall_time=f"{wall:.6f}", cycle_length=res.cycle_length,
        b_tt_max=str(env.b_tt_max), l_m="" if res.l_m is None else str(res.l_m),
        iterations="" if res.iterations is None else res.iterations,
        iteration_bound="" if res.iteration_bound is None else res.iteration_bound,
        server=res.server,
    )
    return row


def iter_instances(cfg: ExperimentConfig) -> Iterator[Tuple[SweepPoint, int, Optional[TaskSet]]]:
    for key, pt in enumerate(cfg.points):
        for seed in batch_seeds(cfg.seed, cfg.repetitions, key):
            spec = GenSpec(pt.n_tt, pt.n_et, pt.u_tt, pt.u_et, pt.period_set,
                           pt.deadline_mode, seed, cfg.microtick_ns, pt.quintile)
            try:
                ts = generate(spec)
            except GenerationError:
                ts = None
            yield pt, seed, ts


def run_experiment(cfg: ExperimentConfig, progress=None) -> Tuple[List[dict], List[dict]]:
    """Run every method on every generated instance; returns (instances, summary) rows."""
    digest = cfg.digest()
    rows: List[dict] = []
    for pt, seed, ts in iter_instances(cfg):
        base = {"schema_version": SCHEMA_VERSION, "config_hash": digest, "point": pt.label,
                "u_tt": str(pt.u_tt), "u_et": str(pt.u_et), "n_tt": pt.n_tt, "n_et": pt.n_et,
                "deadline_mode": pt.deadline_mode, "quintile": pt.quintile, "seed": seed}
        for method in cfg.methods:
            if ts is None:
                row = {"method": method, "feasible": 0, "synth_feasible": 0, "oracle_ok": "",
                       "reason": "generation-failed"}
            else:
                row = run_instance(ts, method, cfg)
            rows.append({**{k: "" for k in INSTANCE_FIELDS}, **base, **row})
        if progress:
            progress(pt, seed)
    return rows, summarize(rows, cfg)


def summarize(rows: Sequence[dict], cfg: ExperimentConfig) -> List[dict]:
    digest = cfg.digest()
    out = []
    for pt in cfg.points:
        for method in cfg.methods:
            mine = [r for r in rows if r["point"] == pt.label and r["method"] == method]
            gen_fail = sum(r["reason"] == "generation-failed" for r in mine)
            counted = [r for r in mine if r["reason"] != "generation-failed"]
            n = len(counted)
            feas = sum(int(r["feasible"]) for r in counted)
            times = [float(r["wall_time"]) for r in counted if r["wall_time"] != ""]
            out.append({
                "schema_version": SCHEMA_VERSION, "config_hash": digest, "point": pt.label,
                "method": method, "instances": n, "feasible": feas,
                "schedulability_pct": f"{100.0 * feas / n:.2f}" if n else "",
                "oracle_failures": sum(r["oracle_ok"] == 0 for r in counted),
                "timeouts": sum(r["reason"] == "timeout" for r in counted),
                "generation_failures": gen_fail,
                "mean_wall_time": f"{sum(times) / len(times):.6f}" if times else "",
            })
    return out


def write_csv(path, rows: Sequence[dict], fields: Sequence[str], omit_timing: bool = False) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.DictWriter(fh, fieldnames=list(fields), lineterminator="\n")
        w.writeheader()
        for r in rows:
            if omit_timing:
                r = {**r, **{k: "" for k in ("wall_time", "mean_wall_time") if k in r}}
            w.writerow({k: r.get(k, "") for k in fields})


def write_results(out_dir, rows, summary, omit_timing: bool = False) -> Tuple[Path, Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    inst, summ = out / "instances.csv", out / "summary.csv"
    write_csv(inst, rows, INSTANCE_FIELDS, omit_timing)
    write_csv(summ, summary, SUMMARY_FIELDS, omit_timing)
    return inst, summ


# hyperperiod growth

GROWTH_FIELDS = ["factor", "cycle_length", "wall_time", "iterations", "feasible"]


def growth_taskset(factor: int) -> TaskSet:
    """Fixed small TT/ET mix whose hyperperiod is ``1200 * factor``.

    Six short TT tasks plus one long task of period ``400 * factor``; the ET
    set does not change, so the budget ceiling stays the same across factors.
    """
    tt = [tt_task(f"tt{i}", C, T) for i, (C, T) in
          enumerate([(10, 200), (12, 300), (16, 400), (8, 200), (9, 300), (12, 400)])]
    tt.append(tt_task("tt_long", 4 * factor, 400 * factor))
    et = [et_task("et0", 10, 200, 150, 6), et_task("et1", 12, 300, 250, 5),
          et_task("et2", 20, 400, 380, 4)]
    return TaskSet(tt, et, DESK_MICROTICK_NS)


def hyperperiod_growth(factors=(1, 10, 100, 1000), repeats: int = 3) -> List[dict]:
    """Best-of-``repeats`` B3LF wall time per hyperperiod."""
    rows = []
    for f in factors:
        ts = growth_taskset(f)
        best, out = None, None
        for _ in range(repeats):
            t0 = time.perf_counter()
            out = synthesize(ts)
            dt = time.perf_counter() - t0
            best = dt if best is None else min(best, dt)
        rows.append({"factor": f, "cycle_length": hyperperiod(ts.tt), "wall_time": best,
                     "iterations": out.iterations, "feasible": int(out.feasible)})
    return rows
