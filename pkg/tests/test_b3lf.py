import json
import math
import random
from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import given, settings, strategies as st

from ttsynth import kernels
from ttsynth.b3lf import (EXHAUSTED, MISS_AT_LM, OVERLOAD, admit_et_iteration,
                          b3lf, binary_b3lf, ceiling_grid, last_deadline, llf_under_blc,
                          mllf_schedule, search_llf_counterexample, synthesize)
from ttsynth.blc import BlcParams, ScheduleTable, check_arrival_envelope, check_blc
from ttsynth.envelope import max_tt_burst
from ttsynth.io import rational_from_json, taskset_from_dict
from ttsynth.oracle import validate_tt
from ttsynth.taskmodel import TaskSet, et_task, hyperperiod, tt_task

from reference import blc_completion_exists, tt_tables

F = Fraction
FIXTURES = Path(__file__).parent / "fixtures"


def small_tt_sets(max_cycle=12, seed=0, count=300):
    rng = random.Random(seed)
    periods = [p for p in (2, 3, 4, 6, 8, 12) if p <= max_cycle]
    out = []
    while len(out) < count:
        tasks = []
        for i in range(rng.randint(1, 3)):
            T = rng.choice(periods)
            D = rng.randint(1, T)
            tasks.append(tt_task(f"t{i}", rng.randint(1, D), T, D))
        if hyperperiod(tasks) <= max_cycle and sum(t.utilization for t in tasks) < 1:
            out.append(tasks)
    return out


def test_mllf_example_no_pressure():
    tt = [tt_task("a", 1, 2), tt_task("b", 1, 4)]
    params = BlcParams.for_envelope(F(3, 4), 2)
    run = mllf_schedule(2, tt, 4, params)
    assert run.ok and validate_tt(run.table, tt) is None
    assert run.table.slots in set(tt_tables(tt, 4))


def test_mllf_rejects_bad_initial_budget():
    params = BlcParams.for_envelope(F(1, 3), 1)
    with pytest.raises(ValueError):
        mllf_schedule(2, [tt_task("a", 1, 3)], 3, params)


def test_b3lf_envelope_example():
    tt = [tt_task("a", 1, 3)]
    out = b3lf(tt, 1, 3)
    assert out.feasible
    assert (out.params.i_tt, out.params.i_idle, out.params.l_m) == (F(2, 3), F(1, 3), 1)
    assert out.table.slots.count("a") == 1 and len(out.table) == 3
    tables = set(tt_tables(tt, 3))
    conformant = {s for s in tables if check_blc(ScheduleTable(s), out.params).ok}
    assert out.table.slots in conformant
    assert out.initial_budget <= out.final_budget


def test_b3lf_empty_et_matches_plain_feasibility():
    for tt in small_tt_sets(count=120, seed=4):
        ts = TaskSet(tt)
        out = synthesize(ts)
        T = hyperperiod(tt)
        exists = any(True for _ in tt_tables(tt, T)) if T <= 8 else None
        if out.feasible:
            assert validate_tt(out.table, tt) is None
        elif exists is not None:
            # with L_M = C^TT the budget never binds before a deadline does
            assert not exists, tt


def test_overload():
    out = b3lf([tt_task("a", 2, 3), tt_task("b", 1, 2)], 3)
    assert not out.feasible and out.reason == OVERLOAD


def test_full_utilization_uses_every_slot():
    tt = [tt_task("a", 1, 2), tt_task("b", 2, 4)]
    out = b3lf(tt, 3)
    assert out.feasible and None not in out.table.slots


def test_last_deadline():
    assert last_deadline([tt_task("a", 1, 4, 2), tt_task("b", 1, 6, 3)], 12) == 10
    assert last_deadline([tt_task("a", 1, 4)], 12) == 12


def _check_outcome(tt, out):
    p = out.params
    assert validate_tt(out.table, tt) is None
    assert out.initial_budget <= out.final_budget
    assert check_blc(out.table, p, out.initial_budget).ok
    assert check_blc(out.table.repeated(3), p, out.initial_budget).ok
    u = sum(t.utilization for t in tt)
    assert check_arrival_envelope(out.table, u, p.l_m).ok
    assert out.iterations <= math.floor(p.l_m / p.i_tt) + 2


@pytest.mark.parametrize("seed", range(3))
def test_b3lf_invariants(seed):
    seen = 0
    for tt in small_tt_sets(seed=seed, count=200):
        u = sum(t.utilization for t in tt)
        c_tt = sum(t.C for t in tt)
        for b_max in {F(1 - u), F(1 - u) * 2, F(c_tt, 2), F(c_tt)}:
            if b_max <= 0:
                continue
            out = b3lf(tt, b_max)
            if out.feasible:
                seen += 1
                _check_outcome(tt, out)
            else:
                assert out.reason in (MISS_AT_LM, EXHAUSTED)
    assert seen > 100


@settings(max_examples=100, deadline=None)
@given(st.lists(st.sampled_from([(1, 2), (1, 4), (2, 4), (1, 3), (2, 6), (3, 6), (1, 6)]),
                min_size=1, max_size=4))
def test_full_capacity_all_tt(specs):
    # U^TT = 1 and a ceiling at C^TT: every slot is TT
    u = sum(F(c, t) for c, t in specs)
    if u > 1:
        return
    tt = [tt_task(f"t{i}", c, t) for i, (c, t) in enumerate(specs)]
    gap = 1 - u
    if gap:
        tt.append(tt_task("fill", int(gap * 12), 12))
    out = b3lf(tt, sum(t.C for t in tt))
    assert out.feasible and None not in out.table.slots


def test_miss_detection_is_sound():
    checked = 0
    for tt in small_tt_sets(max_cycle=16, seed=11, count=400):
        T = hyperperiod(tt)
        u = sum(t.utilization for t in tt)
        for l_m in ceiling_grid(tt):
            params = BlcParams.for_envelope(u, l_m)
            status, fail, b, slots = kernels.llf_run(
                [t.C for t in tt], [t.T for t in tt], [t.D for t in tt], T, mode=kernels.MLLF,
                budget0=l_m, itt=params.i_tt, iidle=params.i_idle, lm=params.l_m)
            if status != kernels.MISS:
                continue
            checked += 1
            prefix = [int(x) for x in slots[:fail]]
            assert not blc_completion_exists(tt, T, params, prefix, b), (tt, l_m, fail)
    assert checked >= 20


def test_llf_witness_fixture_replays():
    d = json.loads((FIXTURES / "llf_witness.json").read_text())
    tt = list(taskset_from_dict(d).tt)
    l_m, cycle = rational_from_json(d["l_m"]), d["cycle"]
    assert cycle <= 16 and len(tt) <= 3
    params = BlcParams.for_envelope(sum(t.utilization for t in tt), l_m)
    assert not llf_under_blc(l_m, tt, cycle, params).ok
    run = mllf_schedule(l_m, tt, cycle, params)
    assert run.ok and check_blc(run.table, params, l_m).ok
    assert None in run.table.slots


@pytest.mark.slow
def test_llf_witness_search_reproduces_fixture():
    w = search_llf_counterexample()
    d = json.loads((FIXTURES / "llf_witness.json").read_text())
    assert [(t.C, t.T, t.D) for t in w.tasks] == [(t["C"], t["T"], t["D"]) for t in d["tasks"]]


def test_binary_single_task():
    res = binary_b3lf([tt_task("a", 1, 3)])
    assert res.l_m_min == F(2, 3)


def test_binary_overload():
    assert not binary_b3lf([tt_task("a", 2, 3), tt_task("b", 1, 2)]).feasible


def test_binary_full_utilization_scan():
    tt = [tt_task("a", 1, 2), tt_task("b", 1, 2)]
    res = binary_b3lf(tt)
    scan = next(b for b in ceiling_grid(tt) if b3lf(tt, b).feasible)
    assert res.l_m_min == scan


def test_binary_matches_linear_scan():
    agree = total = 0
    for tt in small_tt_sets(seed=21, count=200):
        res = binary_b3lf(tt)
        scan = next((b for b in ceiling_grid(tt) if b3lf(tt, b).feasible), None)
        total += 1
        agree += res.l_m_min == scan
        if res.feasible:
            assert b3lf(tt, res.l_m_min).feasible
    assert agree / total >= 0.98


def test_admit_et_iteration():
    tt = [tt_task("a", 1, 3)]
    assert admit_et_iteration(F(2, 3), TaskSet(tt, [et_task("e", 1, 30, 30)]))
    assert not admit_et_iteration(F(2, 3), TaskSet(tt, [et_task("e", 3, 4, 3)]))
    # b_tt_max of this set is exactly 1
    ts = TaskSet(tt, [et_task("e", 1, 3, 3)])
    assert max_tt_burst(ts).b_tt_max == 1
    assert admit_et_iteration(1, ts)
    assert not admit_et_iteration(F(4, 3), ts)
