"""Non-preemptive work-conserving list scheduling of one DAG task on m cores.

The simulator is a safety oracle: any work-conserving schedule must finish
within every bound in :mod:`dagbound.bounds`, so one observed response time
above a bound is a soundness bug.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .taskgraph import DagTask


@dataclass(frozen=True)
class ExecutionScenario:
    """Actual execution time of each vertex, 0 <= exec(v) <= c(v)."""

    exec_time: tuple[int, ...]

    @classmethod
    def worst_case(cls, task: DagTask) -> ExecutionScenario:
        return cls(task.wcet)

    @classmethod
    def sample(cls, task: DagTask, rng: np.random.Generator) -> ExecutionScenario:
        return cls(tuple(int(rng.integers(0, c + 1)) for c in task.wcet))

    def check(self, task: DagTask) -> None:
        if len(self.exec_time) != task.vertex_count:
            raise ValueError("scenario length does not match vertex count")
        for v, (e, c) in enumerate(zip(self.exec_time, task.wcet)):
            if not 0 <= e <= c:
                raise ValueError(f"vertex {v}: execution time {e} outside [0, {c}]")


class SmallestId:
    def key(self, task: DagTask, v: int, ready_seq: int):
        return v


class Fifo:
    def key(self, task: DagTask, v: int, ready_seq: int):
        return (ready_seq, v)


class LargestWcetFirst:
    def key(self, task: DagTask, v: int, ready_seq: int):
        return (-task.wcet[v], v)


class SeededRandom:
    """Fixed random priority per vertex, drawn from ``seed``."""

    def __init__(self, seed: int):
        self.seed = seed
        self._prio: dict[int, np.ndarray] = {}

    def key(self, task: DagTask, v: int, ready_seq: int):
        n = task.vertex_count
        if n not in self._prio:
            self._prio[n] = np.random.default_rng(self.seed).permutation(n)
        return (int(self._prio[n][v]), v)

    def __repr__(self):
        return f"SeededRandom({self.seed})"


POLICIES = (SmallestId, Fifo, LargestWcetFirst)


@dataclass(frozen=True)
class ExecutionSequence:
    start: tuple[int, ...]
    finish: tuple[int, ...]
    core: tuple[int, ...]
    cores: int
    sinks: tuple[int, ...]

    @property
    def response_time(self) -> int:
        return max(self.finish[v] for v in self.sinks)

    def timeline(self) -> list[list[tuple[int, int, int]]]:
        """Per core, the (vertex, start, finish) triples in start order."""
        lanes: list[list[tuple[int, int, int]]] = [[] for _ in range(self.cores)]
        for v, (s, f, c) in enumerate(zip(self.start, self.finish, self.core)):
            lanes[c].append((v, s, f))
        for lane in lanes:
            lane.sort(key=lambda x: (x[1], x[2], x[0]))
        return lanes


def simulate(
    task: DagTask,
    m: int,
    scenario: ExecutionScenario | None = None,
    policy=None,
) -> ExecutionSequence:
    """Event-driven run: at every event time all finishes are processed
    first, then eligible vertices fill the idle cores (lowest core first)
    in the policy's order and run to completion."""
    if m < 1:
        raise ValueError("m must be at least 1")
    scenario = scenario or ExecutionScenario.worst_case(task)
    scenario.check(task)
    policy = policy or SmallestId()
    exec_time = scenario.exec_time
    n = task.vertex_count

    missing = [len(task.predecessors(v)) for v in range(n)]
    start = [0] * n
    finish = [0] * n
    core = [0] * n
    idle = list(range(m))
    running: list[tuple[int, int, int]] = []
    ready: list = []
    seq = 0
    for v in task.sources:
        heapq.heappush(ready, (policy.key(task, v, seq), v))
        seq += 1

    t = 0
    done = 0
    while done < n:
        while idle and ready:
            _, v = heapq.heappop(ready)
            c = heapq.heappop(idle)
            start[v], finish[v], core[v] = t, t + exec_time[v], c
            heapq.heappush(running, (finish[v], c, v))
        t = running[0][0]
        while running and running[0][0] == t:
            _, c, v = heapq.heappop(running)
            heapq.heappush(idle, c)
            done += 1
            for w in task.successors(v):
                missing[w] -= 1
                if missing[w] == 0:
                    heapq.heappush(ready, (policy.key(task, w, seq), w))
                    seq += 1
    return ExecutionSequence(tuple(start), tuple(finish), tuple(core), m, task.sinks)


def response_time(seq: ExecutionSequence) -> int:
    return seq.response_time


class Violation(NamedTuple):
    time: int
    vertex: int
    idle_core: int


def verify_work_conserving(
    task: DagTask, m: int, seq: ExecutionSequence
) -> Violation | None:
    """None if no core is ever idle while an eligible vertex waits;
    otherwise the first offending (time, vertex, idle core)."""
    s = np.asarray(seq.start)
    f = np.asarray(seq.finish)
    core = np.asarray(seq.core)
    eligible = np.zeros(task.vertex_count, dtype=np.int64)
    for v in range(task.vertex_count):
        preds = task.predecessors(v)
        if preds:
            eligible[v] = f[list(preds)].max()
    times = np.unique(np.concatenate([s, f, eligible]))
    for t in times:
        waiting = (eligible <= t) & (s > t)
        if not waiting.any():
            continue
        busy = (s <= t) & (t < f)
        if busy.sum() < m:
            idle = sorted(set(range(m)) - set(core[busy].tolist()))
            return Violation(int(t), int(np.flatnonzero(waiting)[0]), idle[0])
    return None


def check_sequence(task: DagTask, scenario: ExecutionScenario, seq: ExecutionSequence) -> None:
    """Structural checks: durations, precedence, no overlap on a core,
    sources start at 0."""
    for v in range(task.vertex_count):
        if seq.finish[v] - seq.start[v] != scenario.exec_time[v]:
            raise AssertionError(f"vertex {v} ran for the wrong duration")
        for u in task.predecessors(v):
            if seq.start[v] < seq.finish[u]:
                raise AssertionError(f"vertex {v} started before predecessor {u} finished")
    for v in task.sources:
        if seq.start[v] != 0:
            raise AssertionError(f"source {v} did not start at time 0")
    for lane in seq.timeline():
        for (_, _, f0), (w, s1, _) in zip(lane, lane[1:]):
            if s1 < f0:
                raise AssertionError(f"vertex {w} overlaps on its core")


def workload_reduction(
    task: DagTask, scenario: ExecutionScenario, vertices: Iterable[int]
) -> int:
    """vol(U) minus the time U actually executed."""
    vs = set(vertices)
    return sum(task.wcet[v] - scenario.exec_time[v] for v in vs)


def longest_executed_path(task: DagTask, exec_time: Sequence[int]) -> int:
    """Critical path length under the actual execution times."""
    best = [0] * task.vertex_count
    for v in task.topological_order:
        head = max((best[u] for u in task.predecessors(v)), default=0)
        best[v] = head + exec_time[v]
    return max(best)
