from fractions import Fraction

from hypothesis import given, settings, strategies as st

from ttsynth.blc import (BlcParams, ScheduleTable, check_arrival_envelope, check_blc,
                         check_tb, count_window, step_budget)

F = Fraction
DEMO = BlcParams(F(2, 3), F(1, 3), 2)


def test_step_budget():
    assert step_budget(2, False, DEMO) == 2
    assert step_budget(2, True, DEMO) == F(4, 3)
    assert step_budget(0, False, DEMO) == F(1, 3)


def test_burst_demo_three_slots_from_t1():
    # TB rejects the third TT slot, the BLC accepts all three
    table = ScheduleTable.from_pattern(".TTT")
    tb = check_tb(table, F(1, 3), 2)
    assert not tb.ok and tb.violation == 3
    assert check_blc(table, DEMO).ok


def test_burst_demo_saturation_limits_window():
    table = ScheduleTable.from_pattern(".TTT..")
    res = check_blc(table, DEMO)
    assert res.ok
    assert res.trace.values == (2, 2, F(4, 3), F(2, 3), 0, F(1, 3), F(2, 3))
    assert res.trace.saturated[0] == 1
    # no fourth TT slot fits anywhere in [0, 6] once slot 0 is idle
    for k in (4, 5):
        slots = list(".TTT..")
        slots[k] = "T"
        assert not check_blc(ScheduleTable.from_pattern("".join(slots)), DEMO).ok


def test_all_idle_pinned_at_ceiling():
    res = check_blc(ScheduleTable.from_pattern("....."), DEMO)
    assert res.ok and set(res.trace.values) == {2}


def test_single_slot_tb():
    assert check_tb(ScheduleTable.from_pattern("T"), F(1, 3), 1).ok


def test_envelope_witness_window():
    # L_M / I^TT + 1 back-to-back TT slots from a full budget break the envelope
    p = BlcParams(F(1, 2), F(1, 2), 1)
    table = ScheduleTable.from_pattern("TTT" + "." * 9)
    res = check_arrival_envelope(table, p.i_idle, p.l_m)
    assert not res.ok
    s, t = res.window
    assert count_window(table, s, t) > p.i_idle * (t - s) + p.l_m


def test_envelope_empty_schedule():
    assert check_arrival_envelope(ScheduleTable(()), 0, 0).ok
    assert check_arrival_envelope(ScheduleTable.from_pattern("...."), 0, 0).ok


def brute_envelope(table, r, b):
    n = len(table)
    for s in range(2 * n):
        for t in range(s + 1, 2 * n + 1):
            if count_window(table, s, t) > r * (t - s) + b:
                return False
    return True


patterns = st.text(alphabet=".T", min_size=1, max_size=14)
rates = st.fractions(min_value=F(1, 10), max_value=F(9, 10), max_denominator=10)


@settings(max_examples=300)
@given(patterns, rates, st.fractions(min_value=0, max_value=4, max_denominator=6))
def test_envelope_check_matches_brute_force(pat, r, b):
    table = ScheduleTable.from_pattern(pat)
    res = check_arrival_envelope(table, r, b)
    assert res.ok == brute_envelope(table, r, b)
    if not res.ok:
        s, t = res.window
        assert count_window(table, s, t) > r * (t - s) + b


@settings(max_examples=300)
@given(patterns, rates, st.fractions(min_value=F(1, 6), max_value=4, max_denominator=6))
def test_blc_properties(pat, r, l_m):
    params = BlcParams(1 - r, r, l_m)
    table = ScheduleTable.from_pattern(pat)
    res = check_blc(table, params)
    tb = check_tb(table, r, l_m)
    if tb.ok:
        assert res.ok                   # the BLC dominates the token bucket
    if not res.ok:
        return
    v = res.trace.values
    assert all(0 <= x <= l_m for x in v)
    # budget at zero forces an idle slot next
    for t in range(len(pat) - 1):
        if v[t + 1] == 0:
            assert pat[t + 1] == "."
    # slot-count envelope, from a full budget only one cycle is certain
    for s in range(len(pat)):
        for t in range(s + 1, len(pat) + 1):
            n_tt = pat[s:t].count("T")
            assert n_tt <= r * (t - s) + l_m
            sat = sum(res.trace.saturated[s:t])
            inner = -n_tt + (t - s - sat) * r
            assert -l_m <= inner <= l_m
