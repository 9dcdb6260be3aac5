"""Command-line front end.

Exit codes: 0 ok, 2 infeasible (or a failed check), 3 invalid input,
4 internal invariant breach. Status lines for synthesis commands are printed
as single-line JSON on stdout.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__
from .b3lf import InvariantBreach, admit_et_iteration, binary_b3lf, synthesize
from .blc import BlcParams, budget_trace, check_blc, check_tb
from .envelope import max_tt_burst
from .experiment import (DESK_PERIODS, ExperimentConfig, hyperperiod_growth, laxity_axis,
                         run_experiment, task_count_axis, utilization_axis, write_csv,
                         write_results, GROWTH_FIELDS)
from .io import (InputError, rational_from_json, read_schedule, read_taskset, taskset_to_dict,
                 write_schedule, write_taskset)
from .oracle import full_report
from .polling import advpoll, spoll
from .taskgen import CONSTRAINED, QUINTILE, ARBITRARY, GenerationError, GenSpec, batch_seeds, generate
from .taskmodel import hyperperiod, validate

EXIT_OK, EXIT_INFEASIBLE, EXIT_INVALID, EXIT_BREACH = 0, 2, 3, 4


class CliError(Exception):
    def __init__(self, code, message):
        super().__init__(message)
        self.code = code


def _status(**fields) -> None:
    print(json.dumps(fields, default=str, sort_keys=True))


def _cycle_cap(args, T: int) -> int:
    cap = args.cycle_cap
    if cap is None:
        return 4 * T
    if cap.upper().endswith("T"):
        return int(cap[:-1] or 1) * T
    return int(cap)


def _load_taskset(path):
    ts = read_taskset(path)
    problems = validate(ts)
    if problems:
        raise CliError(EXIT_INVALID, "; ".join(str(v) for v in problems))
    return ts


def _ms_to_ticks(ms_list, microtick_ns):
    out = []
    for ms in ms_list:
        ticks = Fraction(ms) * 1_000_000 / microtick_ns
        if ticks.denominator != 1:
            raise CliError(EXIT_INVALID, f"period {ms} ms is not a whole number of microticks")
        out.append(int(ticks))
    return out


def cmd_gen(args) -> int:
    periods = _ms_to_ticks(args.periods, args.microtick)
    seeds = [args.seed] if not args.batch else batch_seeds(args.seed, args.batch)
    if args.batch:
        Path(args.out).mkdir(parents=True, exist_ok=True)
    for k, seed in enumerate(seeds):
        spec = GenSpec(args.n_tt, args.n_et, Fraction(args.u_tt), Fraction(args.u_et), periods,
                       args.deadline_mode, seed, args.microtick, args.quintile)
        try:
            ts = generate(spec)
        except GenerationError as exc:
            raise CliError(EXIT_INFEASIBLE, str(exc))
        if args.batch:
            write_taskset(Path(args.out) / f"taskset_{k:04d}.json", ts)
        elif args.out == "-":
            print(json.dumps(taskset_to_dict(ts)))
        else:
            write_taskset(args.out, ts)
    return EXIT_OK


def cmd_envelope(args) -> int:
    ts = _load_taskset(args.taskset)
    env = max_tt_burst(ts)
    print(f"b_tt_max,{env.b_tt_max}")
    print(f"c_tt,{env.c_tt}")
    print(f"binding,{'C_TT' if env.binding is None else env.binding}")
    print("priority,rate,demand,min_deadline,admissible_burst")
    for p in sorted(env.per_priority, reverse=True):
        lb = env.per_priority[p]
        burst = "saturated" if lb.admissible_burst is None else lb.admissible_burst
        print(f"{p},{lb.rate},{lb.demand},{lb.min_deadline},{burst}")
    return EXIT_OK if env.feasible else EXIT_INFEASIBLE


def cmd_synth(args) -> int:
    ts = _load_taskset(args.taskset)
    out = synthesize(ts, exhaustive=args.exhaustive_budget)
    if not out.feasible:
        _status(status="infeasible", reason=out.reason, iterations=out.iterations)
        return EXIT_INFEASIBLE
    write_schedule(args.out, out.table, out.params, method="b3lf",
                   initial_budget=out.initial_budget, final_budget=out.final_budget,
                   iterations=out.iterations)
    _status(status="ok", cycle_length=out.table.cycle_length, l_m=out.params.l_m if out.params else None,
            initial_budget=out.initial_budget, iterations=out.iterations)
    return EXIT_OK


def cmd_design(args) -> int:
    ts = _load_taskset(args.taskset)
    if args.admit:
        sched = read_schedule(args.admit)
        if "l_m_min" not in sched.extra:
            raise CliError(EXIT_INVALID, f"{args.admit} carries no l_m_min")
        l_m_min = rational_from_json(sched.extra["l_m_min"])
        ok = admit_et_iteration(l_m_min, ts)
        _status(status="accepted" if ok else "rejected", l_m_min=l_m_min,
                b_tt_max=max_tt_burst(ts).b_tt_max)
        return EXIT_OK if ok else EXIT_INFEASIBLE
    design = binary_b3lf(ts.tt, hyperperiod(ts.tt), ts.lam)
    if not design.feasible:
        _status(status="infeasible", reason="tt-infeasible", probes=design.probes)
        return EXIT_INFEASIBLE
    out = design.outcome
    if args.out:
        write_schedule(args.out, out.table, out.params, method="binary_b3lf",
                       l_m_min=design.l_m_min, initial_budget=out.initial_budget)
    _status(status="ok", l_m_min=design.l_m_min, probes=design.probes,
            et_admitted=admit_et_iteration(design.l_m_min, ts) if ts.et else None)
    return EXIT_OK


def cmd_baseline(args) -> int:
    ts = _load_taskset(args.taskset)
    cap = _cycle_cap(args, hyperperiod(ts.tt))
    if args.method == "spoll":
        out = spoll(ts, cap, args.spoll_conservative, args.strict)
        extra = {"polling": [{"serves": list(p.serves), "T_p": p.T_p, "C_p": p.C_p,
                              "variant": p.variant} for p in out.polling]}
    else:
        try:
            out = advpoll(ts, cap)
        except ValueError as exc:
            raise CliError(EXIT_INVALID, str(exc))
        extra = {"server": None if out.server is None else
                 {"C_p": out.server.C_p, "T_p": out.server.T_p}}
    if not out.feasible:
        _status(status="infeasible", reason=out.reason, **extra)
        return EXIT_INFEASIBLE
    write_schedule(args.out, out.table, None, method=args.method,
                   tt_ids=[t.id for t in ts.tt], **extra)
    _status(status="ok", cycle_length=out.cycle, **extra)
    return EXIT_OK


def _params_from_args(args, sched):
    if args.rate is not None or args.burst is not None or args.i_tt is not None:
        if args.rate is None or args.burst is None:
            raise CliError(EXIT_INVALID, "--rate and --burst go together")
        rate = Fraction(args.rate)
        i_tt = Fraction(args.i_tt) if args.i_tt is not None else 1 - rate
        return BlcParams(i_tt, rate, Fraction(args.burst))
    if sched.params is None:
        raise CliError(EXIT_INVALID, "schedule has no BLC params; pass --rate and --burst")
    return sched.params


def cmd_check(args) -> int:
    sched = read_schedule(args.schedule)
    params = _params_from_args(args, sched)
    tt_ids = sched.extra.get("tt_ids")
    b0 = Fraction(args.initial_budget) if args.initial_budget is not None else None
    ok = True
    if args.semantics in ("blc", "both"):
        res = check_blc(sched.table, params, b0, tt_ids)
        ok &= res.ok
        print("blc," + ("conformant" if res.ok else f"violation,{res.violation}"))
    if args.semantics in ("tb", "both"):
        res_tb = check_tb(sched.table, params.i_idle, params.l_m, tt_ids)
        if args.semantics == "tb":
            ok &= res_tb.ok
        print("tb," + ("conformant" if res_tb.ok else f"violation,{res_tb.violation}"))
    if args.trace:
        trace = budget_trace(sched.table, params, b0, tt_ids)
        with open(args.trace, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["t", "bdg"])
            for t, v in enumerate(trace.values):
                w.writerow([t, v])
    return EXIT_OK if ok else EXIT_INFEASIBLE


def cmd_validate(args) -> int:
    ts = _load_taskset(args.taskset)
    sched = read_schedule(args.schedule)
    tt_ids = sched.extra.get("tt_ids")
    try:
        rep = full_report(sched.table, ts, sched.params, tt_ids)
    except ValueError as exc:
        raise CliError(EXIT_INVALID, str(exc))
    report = {
        "ok": rep.ok,
        "tt_ok": rep.tt_ok,
        "tt_violation": None if rep.tt_violation is None else str(rep.tt_violation),
        "et_ok": rep.et_ok,
        "backlog_unbounded": rep.et.unbounded,
        "envelope_ok": rep.envelope_ok,
        "deadline_misses": list(rep.deadline_misses),
        "bound_violations": list(rep.bound_violations),
        "et": {t.id: {"worst_response": rep.et.worst[t.id], "witness_offset": rep.et.witness[t.id],
                      "deadline": t.D,
                      "bound": None if t.id not in rep.bounds else str(rep.bounds[t.id])}
               for t in ts.et},
    }
    print(json.dumps(report, indent=1, sort_keys=True))
    if args.csv:
        with open(args.csv, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["offset"] + [t.id for t in ts.et])
            for phi, row in enumerate(rep.et.per_offset):
                w.writerow([phi] + [int(x) for x in row])
    return EXIT_OK if rep.ok else EXIT_INFEASIBLE


def cmd_experiment(args) -> int:
    if args.axis == "hyperperiod":
        rows = hyperperiod_growth(tuple(args.factors))
        Path(args.out_dir).mkdir(parents=True, exist_ok=True)
        write_csv(Path(args.out_dir) / "growth.csv", rows, GROWTH_FIELDS, args.omit_timing)
        return EXIT_OK
    periods = tuple(_ms_to_ticks(args.periods, args.microtick)) if args.periods else DESK_PERIODS
    if args.axis == "utilization":
        points = utilization_axis(args.n_tt, args.n_et, periods, args.deadline_mode)
    elif args.axis == "tasks":
        points = task_count_axis(tuple(args.counts))
    else:
        points = laxity_axis()
    reps = args.reps if args.reps is not None else (25 if args.quick else 100)
    cfg = ExperimentConfig(points, tuple(args.methods), reps, args.seed, args.timeout,
                           args.microtick, _cap_factor(args), args.spoll_conservative,
                           args.exhaustive_budget)

    def progress(pt, seed):
        if args.verbose:
            print(f"{pt.label} {seed}", file=sys.stderr)

    rows, summary = run_experiment(cfg, progress)
    inst, summ = write_results(args.out_dir, rows, summary, args.omit_timing)
    print(f"{inst}\n{summ}")
    return EXIT_OK


def _cap_factor(args) -> int:
    cap = args.cycle_cap
    if cap is None:
        return 4
    if not cap.upper().endswith("T"):
        raise CliError(EXIT_INVALID, "experiment needs --cycle-cap as a multiple of T, e.g. 4T")
    return int(cap[:-1] or 1)


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    s = argparse.SUPPRESS
    p.add_argument("--seed", type=int, default=s, help="master random seed")
    p.add_argument("--microtick", type=int, default=s, help="microtick length in ns")
    p.add_argument("--cycle-cap", default=s,
                   help="schedule cycle cap in microticks, or a multiple of T such as 4T")
    p.add_argument("--spoll-conservative", action="store_true", default=s,
                   help="SPoll period floor((D-C)/2) instead of floor((D+C)/2)")
    p.add_argument("--exhaustive-budget", action="store_true", default=s,
                   help="restart B3LF from the exact final budget instead of the I^TT grid")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="ttsynth", parents=[common],
                                     description="TT schedule synthesis under a burst limiting constraint")
    parser.set_defaults(seed=0, microtick=100_000, cycle_cap=None, spoll_conservative=False,
                        exhaustive_budget=False)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", parents=[common], help="generate random task sets")
    g.add_argument("--n-tt", type=int, default=30)
    g.add_argument("--n-et", type=int, default=20)
    g.add_argument("--u-tt", default="0.3")
    g.add_argument("--u-et", default="0.2")
    g.add_argument("--periods", type=Fraction, nargs="+", default=[20, 30, 40], help="periods in ms")
    g.add_argument("--deadline-mode", choices=[CONSTRAINED, ARBITRARY, QUINTILE], default=CONSTRAINED)
    g.add_argument("--quintile", type=int, default=1)
    g.add_argument("--batch", type=int, default=0, help="write N sets into the --out directory")
    g.add_argument("-o", "--out", default="-")
    g.set_defaults(func=cmd_gen)

    e = sub.add_parser("envelope", parents=[common], help="maximal TT burst and per-level slack")
    e.add_argument("taskset")
    e.set_defaults(func=cmd_envelope)

    s = sub.add_parser("synth", parents=[common], help="B3LF schedule synthesis")
    s.add_argument("taskset")
    s.add_argument("-o", "--out", required=True)
    s.set_defaults(func=cmd_synth)

    d = sub.add_parser("design", parents=[common],
                       help="BinaryB3LF design, or --admit an ET iteration against a saved design")
    d.add_argument("taskset")
    d.add_argument("-o", "--out")
    d.add_argument("--admit", metavar="SCHEDULE", help="design file holding l_m_min")
    d.set_defaults(func=cmd_design)

    b = sub.add_parser("baseline", parents=[common], help="polling baselines")
    b.add_argument("taskset")
    b.add_argument("--method", choices=["spoll", "advpoll"], default="spoll")
    b.add_argument("--strict", action="store_true", help="strictly periodic SPoll (needs D = T)")
    b.add_argument("-o", "--out", required=True)
    b.set_defaults(func=cmd_baseline)

    c = sub.add_parser("check", parents=[common], help="BLC / token bucket conformance of a schedule")
    c.add_argument("schedule")
    c.add_argument("--rate", help="replenishment rate I^idle (default: from the schedule file)")
    c.add_argument("--burst", help="ceiling L_M / bucket size")
    c.add_argument("--i-tt", help="TT drain rate (default 1 - rate)")
    c.add_argument("--initial-budget")
    c.add_argument("--semantics", choices=["blc", "tb", "both"], default="both")
    c.add_argument("--trace", help="write the BLC budget trace as CSV (t,bdg)")
    c.set_defaults(func=cmd_check)

    v = sub.add_parser("validate", parents=[common], help="brute-force oracle report")
    v.add_argument("schedule")
    v.add_argument("taskset")
    v.add_argument("--csv", help="per-offset worst responses")
    v.set_defaults(func=cmd_validate)

    x = sub.add_parser("experiment", parents=[common], help="schedulability / runtime sweeps")
    x.add_argument("--axis", choices=["utilization", "tasks", "laxity", "hyperperiod"],
                   default="utilization")
    x.add_argument("--methods", nargs="+", default=["b3lf", "binary_b3lf", "spoll"],
                   choices=["b3lf", "binary_b3lf", "spoll", "advpoll"])
    x.add_argument("--quick", action="store_true", help="25 task sets per point instead of 100")
    x.add_argument("--reps", type=int)
    x.add_argument("--timeout", type=float, default=60.0, help="seconds per instance")
    x.add_argument("--n-tt", type=int, default=30)
    x.add_argument("--n-et", type=int, default=20)
    x.add_argument("--periods", type=Fraction, nargs="+", help="periods in ms")
    x.add_argument("--deadline-mode", choices=[CONSTRAINED, ARBITRARY], default=CONSTRAINED)
    x.add_argument("--counts", type=int, nargs="+", default=[8, 16, 32, 64])
    x.add_argument("--factors", type=int, nargs="+", default=[1, 10, 100, 1000])
    x.add_argument("--omit-timing", action="store_true", help="blank wall-time columns")
    x.add_argument("--out-dir", default="results")
    x.add_argument("-v", "--verbose", action="store_true")
    x.set_defaults(func=cmd_experiment)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except (InputError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except InvariantBreach as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_BREACH


if __name__ == "__main__":
    sys.exit(main())
