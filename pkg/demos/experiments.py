"""
A small version of the sweeps
=============================

Normalized bounds against the parallelism factor, and federated acceptance
ratios against normalized utilization, at a size that runs in about a
minute.  The CLI runs the same code at desk scale:

    dagbound bench-bounds --csv bounds.csv
    dagbound bench-sched --csv sched.csv
"""

from dagbound.experiments import (
    BOUNDS_COLUMNS,
    SCHED_COLUMNS,
    BoundsConfig,
    SchedConfig,
    bench_bounds,
    bench_sched,
    rows_to_csv,
    sweep,
    validate_task,
)
from dagbound.gen import GenConfig, generate

rows = bench_bounds(BoundsConfig(cores=(8,), pf=tuple(sweep("0.1", "0.6", "0.1")), tasks_per_point=10))
print(rows_to_csv(rows, BOUNDS_COLUMNS))

rows = bench_sched(SchedConfig(cores=(16,), sets_per_point=10, methods=("optimal", "graham")))
print(rows_to_csv(rows, SCHED_COLUMNS))

# the simulator as a safety oracle on one generated task
task = generate(GenConfig(vertices=(40, 60), pf=0.15), 1)
report = validate_task(task, 4, trials=500)
print("max observed response", report.max_response, "tightest bound", report.tightest)
print("violations:", len(report.violations))
