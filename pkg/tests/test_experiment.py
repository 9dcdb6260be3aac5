import csv
import time
from fractions import Fraction

import pytest

from ttsynth.experiment import (INSTANCE_FIELDS, SUMMARY_FIELDS, ExperimentConfig, SweepPoint,
                                growth_taskset, hyperperiod_growth, laxity_axis, run_experiment,
                                task_count_axis, time_limit, utilization_axis,
                                utilization_tuples, write_results)
from ttsynth.taskmodel import hyperperiod

F = Fraction


def small_config(**kw):
    pt = SweepPoint("p", F(3, 10), F(1, 5), 4, 3, (20, 30, 40))
    return ExperimentConfig((pt,), repetitions=kw.pop("reps", 4), seed=kw.pop("seed", 1),
                            microtick_ns=1, **kw)


def test_axes():
    assert len(utilization_tuples()) == 34
    assert all(a + b <= F(9, 10) for a, b in utilization_tuples())
    assert len(utilization_axis()) == 34
    assert [p.n_tt + p.n_et for p in task_count_axis()] == [8, 16, 32, 64]
    assert [p.quintile for p in laxity_axis()] == [1, 2, 3, 4, 5]


def test_digest_tracks_config():
    assert small_config().digest() == small_config().digest()
    assert small_config().digest() != small_config(seed=2).digest()


def test_run_experiment_rows(tmp_path):
    cfg = small_config(methods=("b3lf", "binary_b3lf", "spoll", "advpoll"))
    rows, summary = run_experiment(cfg)
    assert len(rows) == 4 * 4 and len(summary) == 4
    for r in rows:
        assert set(INSTANCE_FIELDS) <= set(r)
        if r["synth_feasible"]:
            assert r["oracle_ok"] == 1 and r["feasible"] == 1
    inst, summ = write_results(tmp_path, rows, summary)
    assert next(csv.reader(summ.open())) == SUMMARY_FIELDS
    assert len(list(csv.DictReader(inst.open()))) == 16


def test_replay_identical(tmp_path):
    cfg = small_config()
    for d in ("a", "b"):
        rows, summary = run_experiment(cfg)
        write_results(tmp_path / d, rows, summary, omit_timing=True)
    for f in ("instances.csv", "summary.csv"):
        assert (tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes()


def test_unknown_method():
    cfg = small_config(methods=("nope",), reps=1)
    with pytest.raises(ValueError):
        run_experiment(cfg)


def test_time_limit():
    with pytest.raises(TimeoutError):
        with time_limit(0.05):
            while True:
                time.sleep(0.01)
    with time_limit(0):
        pass


def test_timeout_is_recorded(monkeypatch):
    from ttsynth import experiment

    def slow(*a, **k):
        raise TimeoutError
    monkeypatch.setattr(experiment, "run_method", slow)
    cfg = small_config(reps=1)
    rows, summary = run_experiment(cfg)
    assert rows[0]["reason"] == "timeout" and summary[0]["timeouts"] == 1


def test_growth():
    assert [hyperperiod(growth_taskset(f).tt) for f in (1, 10)] == [1200, 12000]
    rows = hyperperiod_growth((1, 3), repeats=1)
    assert all(r["feasible"] == 1 for r in rows)
