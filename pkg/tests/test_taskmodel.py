from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from ttsynth.taskmodel import (ET, TT, Task, TaskSet, et_task, hyperperiod, lcm, tt_task,
                               utilization_aggregates, validate)


def rules(ts):
    return [v.rule for v in validate(ts)]


def test_hyperperiod_desk_periods_at_10us():
    tt = [tt_task(f"t{p}", 1, p * 100) for p in (20, 30, 40)]
    assert hyperperiod(tt) == 12000


def test_hyperperiod_single_and_harmonic():
    assert hyperperiod([tt_task("a", 1, 5)]) == 5
    assert hyperperiod([tt_task("a", 1, 5000), tt_task("b", 1, 10000)]) == 10000


def test_hyperperiod_empty_is_error():
    with pytest.raises(ValueError):
        hyperperiod([])


@given(st.lists(st.integers(1, 60), min_size=1, max_size=6))
def test_hyperperiod_divisible_by_every_period(periods):
    tt = [tt_task(f"t{i}", 1, p) for i, p in enumerate(periods)]
    T = hyperperiod(tt)
    assert all(T % p == 0 for p in periods)
    assert T == lcm(periods)


def test_aggregates_single_tt():
    agg = utilization_aggregates(TaskSet([tt_task("a", 1, 3)]))
    assert agg.u_tt == Fraction(1, 3)
    assert agg.c_tt == 1
    assert agg.u_et == 0 and agg.c_et == 0 and agg.levels == {}


def test_aggregates_levels():
    ts = TaskSet([tt_task("a", 1, 4)],
                 [et_task("x", 1, 10, priority=2), et_task("y", 2, 10, priority=2),
                  et_task("z", 3, 12, priority=5)])
    agg = utilization_aggregates(ts)
    lv2, lv5 = agg.levels[2], agg.levels[5]
    assert lv2.c_et_at_least == 6
    assert lv2.c_et_higher + lv2.c_et_equal == lv2.c_et_at_least
    assert lv2.u_higher == Fraction(1, 4) + Fraction(3, 12)
    assert lv5.u_higher == agg.u_tt
    assert lv5.c_et_higher == 0


@given(st.lists(st.tuples(st.integers(1, 5), st.integers(5, 40), st.integers(0, 6)),
                min_size=1, max_size=8))
def test_utilization_identity(specs):
    et = [et_task(f"e{i}", C, T, priority=p) for i, (C, T, p) in enumerate(specs)]
    ts = TaskSet([tt_task("a", 1, 7)], et)
    agg = utilization_aggregates(ts)
    assert agg.u_tt + agg.u_et == sum(Fraction(t.C, t.T) for t in ts.tasks)
    for p, lv in agg.levels.items():
        assert lv.c_et_higher + lv.c_et_equal == lv.c_et_at_least
        assert lv.u_higher == agg.u_tt + lv.u_et_higher


def test_validate_ok():
    ts = TaskSet([tt_task("a", 1, 3)], [et_task("e", 1, 3, 3)])
    assert validate(ts) == []


def test_validate_tt_deadline_exceeds_period():
    ts = TaskSet([Task("a", TT, 1, 3, 4, 7)])
    assert "TT deadline exceeds period" in rules(ts)


def test_validate_overload_against_capacity():
    ts = TaskSet([tt_task("a", 50, 100)], [et_task("e", 45, 100)], lam=Fraction(9, 10))
    assert any(r.startswith("overload") for r in rules(ts))


def test_validate_other_rules():
    bad = TaskSet([tt_task("a", 1, 3, priority=1), tt_task("a", 1, 3, priority=2)],
                  [Task("e", ET, 0, 3, 3, 5), Task("f", ET, 3, 3, 2, 1)])
    r = rules(bad)
    assert "duplicate task id" in r
    assert "TT tasks do not share one priority" in r
    assert "TT priority not above every ET priority" in r
    assert "computation time below one microtick" in r
    assert "ET deadline shorter than computation time" in r


def test_validate_non_integer_field():
    assert "C is not an integer" in rules(TaskSet([Task("a", TT, 1.5, 3, 3, 7)]))


def test_et_arbitrary_deadline_is_valid():
    assert validate(TaskSet([], [et_task("e", 1, 3, 15)])) == []
