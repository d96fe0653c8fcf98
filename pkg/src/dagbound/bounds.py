"""Response-time bounds for a DAG task on m identical cores.

Every multi-path bound here has the shape

    min over j of  len(G) + (vol(G) - S_j) / (m - j)

where S_j is the total WCET of the first j+1 chains of some disjoint chain
family.  The methods differ only in how the chains are picked:

``optimal``      maximum-volume family of each cardinality (min-cost flow)
``graham``       the longest path alone (j = 0)
``para``         no division by m - j, evaluated on the optimal family
``path-proxy``   longest path first, remaining chains flow-optimal
``uete-greedy``  repeatedly peel off the heaviest remaining chain

All arithmetic is exact (``fractions.Fraction``).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_bipartite_matching

from .flow import SuccessiveShortestPath, extract_path_list, reduction_network
from .taskgraph import (
    DagTask,
    InvalidPathList,
    PathList,
    check_generalized_path_list,
    longest_complete_path,
    path_length,
)

METHODS = ("optimal", "graham", "para", "path-proxy", "uete-greedy")


class TooManyPaths(InvalidPathList):
    pass


@dataclass(frozen=True)
class BoundReport:
    method: str
    cores: int | None
    terms: tuple[tuple[int, int, Fraction], ...]
    chosen: int
    bound: Fraction
    paths: PathList

    @property
    def cardinality(self) -> int:
        return self.chosen + 1


def lower_bound(task: DagTask, m: int) -> Fraction:
    """max{len(G), vol(G)/m}; no work-conserving schedule can beat it."""
    return max(Fraction(task.length), Fraction(task.volume, m))


def _check_floor(task: DagTask, m: int | None, bound: Fraction) -> None:
    floor = Fraction(task.length) if m is None else lower_bound(task, m)
    assert bound >= floor, f"bound {bound} below the lower bound {floor}"


def _terms(
    task: DagTask, m: int, prefix_volumes: Sequence[int], first_j: int = 0
) -> list[tuple[int, int, Fraction]]:
    L, vol = task.length, task.volume
    return [
        (j, s, L + Fraction(vol - s, m - j))
        for j, s in enumerate(prefix_volumes, start=first_j)
        if j < m
    ]


def _report(method, task, m, terms, paths) -> BoundReport:
    j, _, bound = min(terms, key=lambda t: (t[2], t[0]))
    _check_floor(task, m, bound)
    return BoundReport(method, m, tuple(terms), j, bound, tuple(paths))


def _prefix_sums(task: DagTask, paths: PathList) -> list[int]:
    out, acc = [], 0
    for p in paths:
        acc += path_length(task, p)
        out.append(acc)
    return out


def multipath_bound_with_list(task: DagTask, m: int, paths) -> BoundReport:
    """min over j in [0, k] of len(G) + (vol(G) - sum_{i<=j} len(pi_i)) / (m - j)
    for a given generalized path list of cardinality k + 1 <= m."""
    if m < 1:
        raise ValueError("m must be at least 1")
    paths = check_generalized_path_list(task, task.reachability, paths)
    if not paths:
        raise InvalidPathList("path list is empty")
    if len(paths) > m:
        raise TooManyPaths(f"{len(paths)} paths for {m} cores")
    terms = _terms(task, m, _prefix_sums(task, paths))
    return _report("explicit", task, m, terms, paths)


def graham_bound(task: DagTask, m: int) -> BoundReport:
    if m < 1:
        raise ValueError("m must be at least 1")
    terms = _terms(task, m, [task.length])
    return _report("graham", task, m, terms, (longest_complete_path(task),))


def para_bound_with_list(task: DagTask, paths, cores: int | None = None) -> BoundReport:
    """len(G) + vol(G) - sum of the chain lengths, minimized over prefixes.

    The terms never increase with j, so the minimum is the full-list value.
    ``cores`` only enables the cardinality and lower-bound checks.
    """
    paths = check_generalized_path_list(task, task.reachability, paths)
    if not paths:
        raise InvalidPathList("path list is empty")
    if cores is not None and len(paths) > cores:
        raise TooManyPaths(f"{len(paths)} paths for {cores} cores")
    L, vol = task.length, task.volume
    terms = [(j, s, Fraction(L + vol - s)) for j, s in enumerate(_prefix_sums(task, paths))]
    j, _, bound = min(terms, key=lambda t: (t[2], t[0]))
    _check_floor(task, cores, bound)
    return BoundReport("para", cores, tuple(terms), j, bound, paths)


def _order_width(matrix: np.ndarray) -> int:
    n = matrix.shape[0]
    if n == 0:
        return 0
    match = maximum_bipartite_matching(csr_matrix(matrix.astype(np.int8)), perm_type="column")
    return n - int(np.count_nonzero(match >= 0))


class _FlowProfile:
    """Lazily extended max-volume profile W(1), W(2), ... of a weighted order,
    with the flow kept per amount so witnesses can be extracted."""

    def __init__(self, weights, reach, vertices=None):
        self.net, self.rmap = reduction_network(weights, reach, vertices)
        self.limit = _order_width(reach.matrix)
        self._solver = SuccessiveShortestPath(self.net) if self.limit else None
        self._volumes: list[int] = []
        self._flows: list[np.ndarray] = []

    def volume(self, k: int) -> int:
        """W(k); constant once k reaches the width."""
        k = min(k, self.limit)
        if k <= 0:
            return 0
        while len(self._volumes) < k:
            self._volumes.append(-self._solver.augment())
            self._flows.append(self._solver.solution())
        return self._volumes[k - 1]

    def paths(self, k: int) -> PathList:
        k = min(k, self.limit)
        if k <= 0:
            return ()
        self.volume(k)
        return extract_path_list(self.net, self.rmap, self._flows[k - 1])


def _by_length(task: DagTask, paths: PathList) -> PathList:
    return tuple(sorted(paths, key=lambda p: (-path_length(task, p), p[0])))


class TaskAnalysis:
    """Per-task cache so one task can be bounded for many core counts
    (federated core assignment) without recomputing flows or chains."""

    def __init__(self, task: DagTask):
        self.task = task
        self._optimal: _FlowProfile | None = None
        self._rest: _FlowProfile | None = None
        self._greedy: _GreedyChains | None = None

    @property
    def optimal_profile(self) -> _FlowProfile:
        if self._optimal is None:
            t = self.task
            self._optimal = _FlowProfile(t.wcet, t.reachability)
        return self._optimal

    @property
    def constrained_profile(self) -> _FlowProfile:
        if self._rest is None:
            t = self.task
            first = set(longest_complete_path(t))
            keep = [v for v in range(t.vertex_count) if v not in first]
            self._rest = _FlowProfile(
                [t.wcet[v] for v in keep], t.reachability.restrict(keep), keep
            )
        return self._rest

    @property
    def greedy(self) -> _GreedyChains:
        if self._greedy is None:
            self._greedy = _GreedyChains(self.task)
        return self._greedy

    def prefix_volumes(self, method: str, m: int) -> list[int]:
        """S_0, S_1, ... usable with m cores for a method."""
        t = self.task
        if method == "graham":
            return [t.length]
        if method == "optimal":
            n = min(self.optimal_profile.limit, m)
            return [self.optimal_profile.volume(k) for k in range(1, n + 1)]
        if method == "path-proxy":
            rest = self.constrained_profile
            extra = min(rest.limit, m - 1)
            return [t.length + rest.volume(k) for k in range(0, extra + 1)]
        if method == "uete-greedy":
            return self.greedy.prefix_volumes(m)
        raise ValueError(f"unknown method {method!r}")

    def value(self, method: str, m: int) -> Fraction:
        if m < 1:
            raise ValueError("m must be at least 1")
        t = self.task
        if method == "para":
            s = self.optimal_profile.volume(min(self.optimal_profile.limit, m))
            return Fraction(t.length + t.volume - s)
        return min(term for _, _, term in _terms(t, m, self.prefix_volumes(method, m)))

    def report(self, method: str, m: int) -> BoundReport:
        if method == "para":
            prof = self.optimal_profile
            paths = _by_length(self.task, prof.paths(min(prof.limit, m)))
            return para_bound_with_list(self.task, paths, cores=m)
        if method == "graham":
            return graham_bound(self.task, m)
        terms = _terms(self.task, m, self.prefix_volumes(method, m))
        j, _, _ = min(terms, key=lambda t: (t[2], t[0]))
        if method == "optimal":
            paths = _by_length(self.task, self.optimal_profile.paths(j + 1))
        elif method == "path-proxy":
            head = longest_complete_path(self.task)
            paths = (head,) + _by_length(self.task, self.constrained_profile.paths(j))
        else:
            paths = self.greedy.chains(j + 1)
        return _report(method, self.task, m, terms, paths)


def optimal_bound(task: DagTask, m: int) -> BoundReport:
    """Minimum over cardinalities j+1 <= min(width, m) of
    len(G) + (vol(G) - W(j+1)) / (m - j), W from the min-cost-flow profile."""
    return TaskAnalysis(task).report("optimal", m)


def bound(task: DagTask, m: int, method: str) -> BoundReport:
    return TaskAnalysis(task).report(method, m)


class _GreedyChains:
    """Heaviest-chain-first decomposition, computed one chain at a time.

    Ties between equally heavy chains go to the one with more vertices,
    then to the lexicographically smallest vertex sequence.
    """

    def __init__(self, task: DagTask):
        self.task = task
        self._reach = task.reachability.matrix
        self._rev_order = list(reversed(task.topological_order))
        self._unused = np.ones(task.vertex_count, dtype=bool)
        self._chains: list[tuple[int, ...]] = []
        self._volumes: list[int] = []

    def _next_chain(self) -> tuple[int, ...] | None:
        if not self._unused.any():
            return None
        c = np.asarray(self.task.wcet, dtype=np.int64)
        base = self.task.vertex_count + 1
        own = c * base + 1
        key = np.zeros(len(c), dtype=np.int64)
        unused = self._unused
        for v in self._rev_order:
            if unused[v]:
                below = key[self._reach[v] & unused]
                key[v] = own[v] + (below.max() if below.size else 0)
        best = key[unused].max()
        v = int(np.flatnonzero(unused & (key == best))[0])
        chain = [v]
        rest = best - own[v]
        while rest:
            v = int(np.flatnonzero(self._reach[v] & unused & (key == rest))[0])
            chain.append(v)
            rest -= own[v]
        unused[chain] = False
        return tuple(chain)

    def chains(self, n: int) -> PathList:
        while len(self._chains) < n:
            chain = self._next_chain()
            if chain is None:
                break
            self._chains.append(chain)
            prev = self._volumes[-1] if self._volumes else 0
            self._volumes.append(prev + path_length(self.task, chain))
        return tuple(self._chains[:n])

    def prefix_volumes(self, n: int) -> list[int]:
        self.chains(n)
        return self._volumes[:n]


def greedy_path_list(task: DagTask, n: int) -> PathList:
    """Up to n chains, each the heaviest chain among still-unused vertices."""
    if n < 1:
        raise ValueError("n must be at least 1")
    return _GreedyChains(task).chains(n)


def longest_constrained_path_list(
    task: DagTask, m: int, first: Sequence[int] | None = None
) -> PathList:
    """The longest complete path (or ``first``) followed by the
    maximum-volume family of min(width', m - 1) chains on the vertices left
    over, width' being the width of that leftover order."""
    if m < 1:
        raise ValueError("m must be at least 1")
    head = tuple(first) if first is not None else longest_complete_path(task)
    check_generalized_path_list(task, task.reachability, (head,))
    taken = set(head)
    keep = [v for v in range(task.vertex_count) if v not in taken]
    if not keep or m == 1:
        return (head,)
    rest = _FlowProfile([task.wcet[v] for v in keep], task.reachability.restrict(keep), keep)
    return (head,) + _by_length(task, rest.paths(min(rest.limit, m - 1)))


def normalized_bound(task: DagTask, m: int, value: Fraction) -> Fraction:
    """bound / max{len(G), vol(G)/m}."""
    return Fraction(value) / lower_bound(task, m)


def federated_core_count(
    task: DagTask, method: str, deadline, analysis: TaskAnalysis | None = None
) -> int | None:
    """Smallest m >= 1 whose bound meets the deadline, or None when no core
    count can (deadline below len(G), or Graham's bound never reaching it)."""
    deadline = Fraction(deadline)
    if deadline <= 0:
        raise ValueError("deadline must be positive")
    L, vol = task.length, task.volume
    if deadline < L:
        return None
    if method == "graham":
        if vol == L:
            return 1
        if deadline == L:
            return None
        need = Fraction(vol - L) / (deadline - L)
        return max(1, -(-need.numerator // need.denominator))
    analysis = analysis or TaskAnalysis(task)
    # Every other method reaches len(G) once m exceeds the number of chains
    # it can use, which is at most |V|.
    for m in range(1, task.vertex_count + 2):
        if analysis.value(method, m) <= deadline:
            return m
    raise AssertionError(f"{method} never reached len(G)")
