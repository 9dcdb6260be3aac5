from fractions import Fraction

import numpy as np
import pytest

from ttsynth.taskgen import (ARBITRARY, CONSTRAINED, QUINTILE, TT_PRIORITY, GenSpec,
                             GenerationError, batch_seeds, dm_levels, draw_deadline, generate,
                             schedulable_as_tt)
from ttsynth.taskmodel import TaskSet, et_task, hyperperiod, tt_task, validate

F = Fraction


def test_full_scale_hyperperiod():
    ts = generate(GenSpec(30, 20, F(3, 10), F(3, 10), (200, 300, 400), seed=1, microtick_ns=100_000))
    assert len(ts.tt) == 30 and len(ts.et) == 20
    assert hyperperiod(ts.tt) == 1200
    assert hyperperiod(ts.tt) * ts.microtick_ns == 120_000_000   # 120 ms


def test_twenty_twenty_example():
    ts = generate(GenSpec(10, 10, F(1, 5), F(1, 5), (500, 1000), seed=3))
    assert validate(ts) == [] and hyperperiod(ts.tt) == 1000


def test_determinism():
    spec = GenSpec(8, 6, F(1, 4), F(1, 4), (20, 30, 40), seed=99)
    assert generate(spec) == generate(spec)
    assert generate(spec) != generate(GenSpec(8, 6, F(1, 4), F(1, 4), (20, 30, 40), seed=100))


@pytest.mark.parametrize("mode", [CONSTRAINED, ARBITRARY, QUINTILE])
def test_validity_and_utilization(mode):
    for seed in batch_seeds(5, 30):
        spec = GenSpec(6, 5, F(3, 10), F(1, 5), (200, 300, 400), mode, seed, quintile=2)
        ts = generate(spec)
        assert validate(ts) == []
        tol = F(len(ts.tt), 200)
        assert abs(sum(t.utilization for t in ts.tt) - spec.u_tt) <= tol
        assert abs(sum(t.utilization for t in ts.et) - spec.u_et) <= F(len(ts.et), 200)
        assert all(t.priority == TT_PRIORITY and t.D == t.T for t in ts.tt)
        assert all(0 <= t.priority <= 6 for t in ts.et)
        assert schedulable_as_tt(ts)


def test_deadline_ranges():
    rng = np.random.default_rng(0)
    for _ in range(200):
        d = draw_deadline(rng, 10, 100, CONSTRAINED)
        assert 55 <= d <= 100
        d = draw_deadline(rng, 10, 100, ARBITRARY)
        assert 100 <= d <= 500
        for k in range(1, 6):
            d = draw_deadline(rng, 10, 100, QUINTILE, k)
            assert 100 - k * 18 <= d <= 100 - (k - 1) * 18


def test_dm_levels():
    assert dm_levels([40, 10, 20, 30, 50, 60, 70]) == [3, 6, 5, 4, 2, 1, 0]
    lv = dm_levels(list(range(1, 15)))
    assert lv == sorted(lv, reverse=True) and lv[0] == 6 and lv[-1] == 0


def test_schedulable_as_tt():
    assert schedulable_as_tt(TaskSet([tt_task("a", 1, 2)], [et_task("e", 1, 4, 8)]))
    assert not schedulable_as_tt(TaskSet([tt_task("a", 2, 3)], [et_task("e", 1, 2)]))
    # U <= 1 but the constrained deadlines collide
    assert not schedulable_as_tt(TaskSet([tt_task("a", 1, 4)], [et_task("e", 1, 4, 1),
                                                                et_task("f", 1, 4, 1)]))


def test_bad_specs():
    with pytest.raises(ValueError):
        GenSpec(1, 1, F(1, 2), F(1, 2), (10,))
    with pytest.raises(ValueError):
        GenSpec(1, 1, F(1, 5), F(1, 5), (10,), "weird")
    with pytest.raises(ValueError):
        GenSpec(1, 1, F(1, 5), F(1, 5), (10,), QUINTILE, quintile=6)


def test_generation_failure_is_bounded():
    # a single period-2 task cannot carry 0.9 of utilization in whole slots and a deadline
    spec = GenSpec(0, 3, 0, F(9, 10), (2,), CONSTRAINED, 1, max_retries=5)
    with pytest.raises(GenerationError):
        generate(spec)


def test_batch_seeds():
    a = batch_seeds(1, 10)
    assert a == batch_seeds(1, 10) and len(set(a)) == 10
    assert a != batch_seeds(1, 10, key=1)
    assert all(0 <= s < 2**63 for s in a)
