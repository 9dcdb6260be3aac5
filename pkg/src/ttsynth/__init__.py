"""Time-triggered schedule synthesis with guaranteed sporadic event-triggered tasks.

The TT schedule is constrained by an affine envelope derived from the ET
deadlines, enforced as a burst limiting constraint while a modified
least-laxity-first scheduler builds the table.
"""

__version__ = "0.1.0"

from .taskmodel import TaskSet, Task, tt_task, et_task, hyperperiod, validate  # noqa: E402
from .envelope import max_tt_burst, et_response_time  # noqa: E402
from .blc import BlcParams, ScheduleTable, check_blc, check_tb, check_arrival_envelope  # noqa: E402
from .b3lf import b3lf, binary_b3lf, mllf_schedule, synthesize, admit_et_iteration  # noqa: E402
from .polling import spoll, advpoll  # noqa: E402
from .oracle import full_report, measure_et_worst, validate_tt  # noqa: E402
from .kernels import BACKEND  # noqa: E402

__all__ = [
    "Task", "TaskSet", "tt_task", "et_task", "hyperperiod", "validate",
    "max_tt_burst", "et_response_time",
    "BlcParams", "ScheduleTable", "check_blc", "check_tb", "check_arrival_envelope",
    "b3lf", "binary_b3lf", "mllf_schedule", "synthesize", "admit_et_iteration",
    "spoll", "advpoll", "full_report", "measure_et_worst", "validate_tt", "BACKEND",
]
