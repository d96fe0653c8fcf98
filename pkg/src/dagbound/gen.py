"""Random DAG tasks and federated task sets.

Randomness comes from numpy ``Generator`` objects seeded through
``SeedSequence``; a seed is either an int or a tuple of ints such as
(master seed, point index, trial index), so every task can be regenerated
on its own regardless of the order work is done in.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Union

import numpy as np

from .taskgraph import DagTask, validate_and_normalize

Seed = Union[int, tuple]
Range = tuple[int, int]


def rng_for(seed: Seed) -> np.random.Generator:
    if isinstance(seed, (tuple, list)):
        head, *rest = seed
        ss = np.random.SeedSequence(head, spawn_key=tuple(rest))
    else:
        ss = np.random.SeedSequence(seed)
    return np.random.default_rng(ss)


def rational(x) -> Fraction:
    """Exact rational from an int, Fraction, or decimal string/float (0.1 -> 1/10)."""
    if isinstance(x, float):
        return Fraction(repr(x))
    return Fraction(x)


@dataclass(frozen=True)
class GenConfig:
    kind: str = "erdos-renyi"
    vertices: Range = (150, 250)
    pf: float | tuple[float, float] = 0.1
    wcet: Range = (5, 100)
    layers: Range = (5, 15)
    layer_width: Range = (2, 10)
    edge_prob: float = 0.5

    def __post_init__(self):
        if self.kind not in ("erdos-renyi", "layered"):
            raise ValueError(f"unknown generator kind {self.kind!r}")
        for name in ("vertices", "wcet", "layers", "layer_width"):
            lo, hi = getattr(self, name)
            if lo > hi or lo < 0:
                raise ValueError(f"{name} range {lo}..{hi} is empty")
        if self.vertices[0] < 1 or self.layers[0] < 1 or self.layer_width[0] < 1:
            raise ValueError("generated tasks need at least one vertex")
        lo, hi = self.pf if isinstance(self.pf, tuple) else (self.pf, self.pf)
        if not 0 <= lo <= hi <= 1:
            raise ValueError("pf must lie in [0, 1]")
        if not 0 <= self.edge_prob <= 1:
            raise ValueError("edge_prob must lie in [0, 1]")


def _draw(rng: np.random.Generator, r: Range) -> int:
    return int(rng.integers(r[0], r[1] + 1))


def erdos_renyi(config: GenConfig, seed: Seed) -> DagTask:
    """Each pair i < j gets an edge when a uniform draw falls below pf."""
    rng = rng_for(seed)
    n = _draw(rng, config.vertices)
    pf = config.pf
    if isinstance(pf, tuple):
        pf = float(rng.uniform(pf[0], pf[1]))
    draws = rng.random((n, n))
    i, j = np.nonzero(np.triu(draws < pf, k=1))
    wcet = rng.integers(config.wcet[0], config.wcet[1] + 1, size=n)
    return validate_and_normalize(wcet.tolist(), zip(i.tolist(), j.tolist()), name=f"er{_tag(seed)}")


def layer_by_layer(config: GenConfig, seed: Seed) -> DagTask:
    """Vertices arranged in layers; each pair in adjacent layers is joined
    with probability edge_prob."""
    rng = rng_for(seed)
    n_layers = _draw(rng, config.layers)
    sizes = [_draw(rng, config.layer_width) for _ in range(n_layers)]
    bounds = np.concatenate([[0], np.cumsum(sizes)])
    edges = []
    for k in range(n_layers - 1):
        upper = range(bounds[k], bounds[k + 1])
        lower = range(bounds[k + 1], bounds[k + 2])
        hits = rng.random((len(upper), len(lower))) < config.edge_prob
        for a, b in zip(*np.nonzero(hits)):
            edges.append((upper[a], lower[b]))
    wcet = rng.integers(config.wcet[0], config.wcet[1] + 1, size=int(bounds[-1]))
    return validate_and_normalize(wcet.tolist(), edges, name=f"layered{_tag(seed)}")


def _tag(seed: Seed) -> str:
    parts = seed if isinstance(seed, (tuple, list)) else (seed,)
    return "-" + "-".join(str(p) for p in parts)


def generate(config: GenConfig, seed: Seed) -> DagTask:
    if config.kind == "layered":
        return layer_by_layer(config, seed)
    return erdos_renyi(config, seed)


def assign_period(task: DagTask, df) -> int:
    """ceil(len(G) + df * (vol(G) - len(G)))."""
    df = rational(df)
    if not 0 <= df <= 1:
        raise ValueError("df must lie in [0, 1]")
    period = task.length + df * (task.volume - task.length)
    return -(-period.numerator // period.denominator)


@dataclass(frozen=True)
class TaskSet:
    tasks: tuple[DagTask, ...]
    periods: tuple[Fraction, ...]
    cores: int

    @property
    def deadlines(self) -> tuple[Fraction, ...]:
        return self.periods

    @property
    def utilization(self) -> Fraction:
        return sum((Fraction(t.volume) / p for t, p in zip(self.tasks, self.periods)), Fraction(0))

    @property
    def normalized_utilization(self) -> Fraction:
        return self.utilization / self.cores


def build_taskset(
    m: int,
    nu,
    config: GenConfig,
    df_range=(Fraction(0), Fraction(1, 2)),
    seed: Seed = 0,
    max_tasks: int = 10_000,
    memo: dict | None = None,
) -> TaskSet:
    """Add random tasks until the utilization reaches nu * m; the last
    task's period is stretched so the total hits nu * m exactly.

    ``memo`` caches generated tasks by seed, for callers that rebuild sets
    from the same seed at several utilization targets.
    """
    if m < 1:
        raise ValueError("m must be at least 1")
    nu = rational(nu)
    if not 0 < nu <= 1:
        raise ValueError("nu must lie in (0, 1]")
    df_lo, df_hi = (rational(x) for x in df_range)
    if not 0 <= df_lo <= df_hi <= 1:
        raise ValueError("df range must lie in [0, 1]")
    base = tuple(seed) if isinstance(seed, (tuple, list)) else (seed,)
    rng = rng_for(base + (0,))
    target = nu * m
    total = Fraction(0)
    tasks, periods = [], []
    for i in range(max_tasks):
        task_seed = base + (1, i)
        if memo is None:
            task = generate(config, task_seed)
        else:
            if task_seed not in memo:
                memo[task_seed] = generate(config, task_seed)
            task = memo[task_seed]
        df = df_lo + (df_hi - df_lo) * Fraction(int(rng.integers(0, 10**6 + 1)), 10**6)
        period = Fraction(assign_period(task, df))
        u = task.volume / period
        if total + u >= target:
            period = task.volume / (target - total)
            if period < task.length:
                continue
            tasks.append(task)
            periods.append(period)
            return TaskSet(tuple(tasks), tuple(periods), m)
        tasks.append(task)
        periods.append(period)
        total += u
    raise RuntimeError("task set did not reach its target utilization")
