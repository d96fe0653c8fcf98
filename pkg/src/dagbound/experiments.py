"""Experiment drivers: normalized-bound sweeps, federated schedulability
sweeps and simulation-based soundness checks.

Seeding: bench_bounds draws task i of pf point p from (seed, p, i) and
reuses it for every core count; bench_sched draws set s for core-count
index c from (seed, c, s) and reuses the same task stream at every nu, so
curves along nu are compared on common random numbers.
"""

from __future__ import annotations

import statistics
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .bounds import METHODS, TaskAnalysis, federated_core_count, normalized_bound
from .gen import GenConfig, Seed, build_taskset, generate, rng_for
from .sim import (
    POLICIES,
    ExecutionScenario,
    SeededRandom,
    simulate,
    verify_work_conserving,
)
from .taskgraph import DagTask


def sweep(start, stop, step) -> list[Fraction]:
    """start, start+step, ... up to stop (inclusive within half a step)."""
    start, stop, step = (Fraction(str(x)) for x in (start, stop, step))
    if step <= 0:
        raise ValueError("sweep step must be positive")
    out = []
    x = start
    while x <= stop + step / 2:
        out.append(x)
        x += step
    return out


def fmt(x) -> str:
    return f"{float(x):.6f}"


@dataclass(frozen=True)
class BoundsConfig:
    cores: tuple[int, ...] = (4, 8, 12)
    pf: tuple[Fraction, ...] = tuple(sweep("0.05", "0.6", "0.05"))
    tasks_per_point: int = 50
    methods: tuple[str, ...] = METHODS
    seed: int = 42
    gen: GenConfig = field(default_factory=GenConfig)

    def __post_init__(self):
        _check_common(self.cores, self.tasks_per_point, self.methods)
        if not self.pf:
            raise ValueError("empty pf sweep")


@dataclass(frozen=True)
class SchedConfig:
    cores: tuple[int, ...] = (16, 32)
    nu: tuple[Fraction, ...] = tuple(sweep("0.1", "1.0", "0.1"))
    sets_per_point: int = 100
    methods: tuple[str, ...] = METHODS
    seed: int = 42
    df: tuple[Fraction, Fraction] = (Fraction(0), Fraction(1, 2))
    gen: GenConfig = field(default_factory=lambda: GenConfig(pf=(0.1, 0.6)))

    def __post_init__(self):
        _check_common(self.cores, self.sets_per_point, self.methods)
        if not self.nu or any(not 0 < x <= 1 for x in self.nu):
            raise ValueError("nu values must lie in (0, 1]")


def _check_common(cores, count, methods):
    if not cores or any(m < 1 for m in cores):
        raise ValueError("core counts must be positive")
    if count < 1:
        raise ValueError("need at least one task or set per point")
    bad = [m for m in methods if m not in METHODS]
    if bad or not methods:
        raise ValueError(f"unknown methods {bad}")


def bench_bounds(config: BoundsConfig) -> list[dict]:
    """Mean and standard deviation of each method's normalized bound per
    (m, pf) point."""
    samples: dict[tuple[int, Fraction, str], list[float]] = {}
    for p, pf in enumerate(config.pf):
        gen = replace(config.gen, pf=float(pf))
        for i in range(config.tasks_per_point):
            task = generate(gen, (config.seed, p, i))
            analysis = TaskAnalysis(task)
            for m in config.cores:
                for method in config.methods:
                    value = analysis.value(method, m)
                    norm = normalized_bound(task, m, value)
                    samples.setdefault((m, pf, method), []).append(float(norm))
    rows = []
    for m in config.cores:
        for pf in config.pf:
            for method in config.methods:
                xs = samples[m, pf, method]
                rows.append(
                    {
                        "m": m,
                        "pf": pf,
                        "tasks": len(xs),
                        "method": method,
                        "mean_norm_bound": statistics.fmean(xs),
                        "std_norm_bound": statistics.pstdev(xs),
                    }
                )
    return rows


def bench_sched(config: SchedConfig) -> list[dict]:
    """Federated acceptance ratio per (m, nu) point: a set is accepted when
    the dedicated core counts of its tasks sum to at most m."""
    rows = []
    for c, m in enumerate(config.cores):
        accepted = {(nu, meth): 0 for nu in config.nu for meth in config.methods}
        for s in range(config.sets_per_point):
            cache: dict = {}
            tasks: dict = {}
            for nu in config.nu:
                ts = build_taskset(
                    m, nu, config.gen, config.df, seed=(config.seed, c, s), memo=tasks
                )
                for method in config.methods:
                    if _accepts(ts, method, cache):
                        accepted[nu, method] += 1
        for nu in config.nu:
            for method in config.methods:
                a = accepted[nu, method]
                rows.append(
                    {
                        "m": m,
                        "nu": nu,
                        "sets": config.sets_per_point,
                        "method": method,
                        "accepted": a,
                        "total": config.sets_per_point,
                        "ratio": Fraction(a, config.sets_per_point),
                    }
                )
    return rows


def _accepts(ts, method: str, cache: dict) -> bool:
    used = 0
    for i, (task, deadline) in enumerate(zip(ts.tasks, ts.deadlines)):
        key = (i, method, deadline)
        if key not in cache:
            analysis = cache.setdefault((i, "analysis"), TaskAnalysis(task))
            cache[key] = federated_core_count(task, method, deadline, analysis)
        need = cache[key]
        if need is None:
            return False
        used += need
        if used > ts.cores:
            return False
    return True


@dataclass
class ValidationReport:
    trials: int
    max_response: int
    bounds: dict[str, Fraction]
    violations: list[tuple[int, str, int, Fraction]]

    @property
    def tightest(self) -> tuple[str, Fraction]:
        return min(self.bounds.items(), key=lambda kv: (kv[1], kv[0]))

    @property
    def ok(self) -> bool:
        return not self.violations


def random_policy(rng: np.random.Generator):
    k = int(rng.integers(0, len(POLICIES) + 1))
    if k == len(POLICIES):
        return SeededRandom(int(rng.integers(0, 2**32)))
    return POLICIES[k]()


def validate_task(
    task: DagTask,
    m: int,
    trials: int,
    seed: Seed = 42,
    methods: Sequence[str] = METHODS,
) -> ValidationReport:
    """Simulate ``trials`` work-conserving runs with random execution times
    and tie-breaking; every response time must stay within every bound."""
    if trials < 1:
        raise ValueError("trials must be at least 1")
    analysis = TaskAnalysis(task)
    bounds = {meth: analysis.value(meth, m) for meth in methods}
    rng = rng_for(seed)
    worst = 0
    violations = []
    for trial in range(trials):
        scenario = (
            ExecutionScenario.worst_case(task)
            if trial % 4 == 0
            else ExecutionScenario.sample(task, rng)
        )
        seq = simulate(task, m, scenario, random_policy(rng))
        if verify_work_conserving(task, m, seq) is not None:
            raise AssertionError("simulator produced a non-work-conserving schedule")
        r = seq.response_time
        worst = max(worst, r)
        for meth, b in bounds.items():
            if r > b:
                violations.append((trial, meth, r, b))
    return ValidationReport(trials, worst, bounds, violations)


def rows_to_csv(rows: Iterable[dict], columns: Sequence[str]) -> str:
    lines = [",".join(columns)]
    for row in rows:
        cells = []
        for col in columns:
            v = row[col]
            cells.append(fmt(v) if isinstance(v, (float, Fraction)) else str(v))
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


BOUNDS_COLUMNS = ("m", "pf", "tasks", "method", "mean_norm_bound", "std_norm_bound")
SCHED_COLUMNS = ("m", "nu", "sets", "method", "accepted", "total", "ratio")
