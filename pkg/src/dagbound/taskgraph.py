"""DAG task model: validation, normalization and the basic graph quantities
(reachability, longest path, volume, width) the bounds are built from.

WCETs are non-negative integers in abstract time units.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_bipartite_matching

Path = tuple[int, ...]
PathList = tuple[Path, ...]


class MalformedInput(ValueError):
    pass


class CycleDetected(ValueError):
    pass


class InvalidPathList(ValueError):
    pass


class NotAChain(InvalidPathList):
    def __init__(self, path_index: int, pair: tuple[int, int]):
        self.path_index = path_index
        self.pair = pair
        super().__init__(
            f"path {path_index}: vertex {pair[0]} is not an ancestor of {pair[1]}"
        )


class Overlap(InvalidPathList):
    def __init__(self, vertex: int, path_indices: tuple[int, int]):
        self.vertex = vertex
        self.path_indices = path_indices
        super().__init__(f"vertex {vertex} appears in paths {path_indices}")


def _as_int(x, what: str) -> int:
    if isinstance(x, bool) or int(x) != x:
        raise MalformedInput(f"{what} {x!r} is not an integer")
    return int(x)


@dataclass(frozen=True)
class DagTask:
    """A DAG task: per-vertex WCETs and precedence edges over ids 0..n-1.

    Construction checks ranges and acyclicity but does not add dummy
    vertices; use :func:`validate_and_normalize` for a single-source,
    single-sink task.
    """

    wcet: tuple[int, ...]
    edges: tuple[tuple[int, int], ...]
    name: str = ""
    _succ: tuple[tuple[int, ...], ...] = field(init=False, repr=False, compare=False)
    _pred: tuple[tuple[int, ...], ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        wcet = tuple(_as_int(c, "WCET") for c in self.wcet)
        n = len(wcet)
        if n == 0:
            raise MalformedInput("task has no vertices")
        for v, c in enumerate(wcet):
            if c < 0:
                raise MalformedInput(f"vertex {v} has negative WCET {c}")
        edges = set()
        for e in self.edges:
            u, v = (_as_int(x, "edge endpoint") for x in e)
            if not (0 <= u < n and 0 <= v < n):
                raise MalformedInput(f"edge ({u}, {v}) has an endpoint out of range")
            if u == v:
                raise MalformedInput(f"self-loop on vertex {u}")
            edges.add((u, v))
        edges = tuple(sorted(edges))
        succ = [[] for _ in range(n)]
        pred = [[] for _ in range(n)]
        for u, v in edges:
            succ[u].append(v)
            pred[v].append(u)
        object.__setattr__(self, "wcet", wcet)
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "_succ", tuple(map(tuple, succ)))
        object.__setattr__(self, "_pred", tuple(map(tuple, pred)))
        if len(self.topological_order) != n:
            raise CycleDetected("edge relation contains a cycle")

    @property
    def vertex_count(self) -> int:
        return len(self.wcet)

    def successors(self, v: int) -> tuple[int, ...]:
        return self._succ[v]

    def predecessors(self, v: int) -> tuple[int, ...]:
        return self._pred[v]

    @cached_property
    def sources(self) -> tuple[int, ...]:
        return tuple(v for v in range(self.vertex_count) if not self._pred[v])

    @cached_property
    def sinks(self) -> tuple[int, ...]:
        return tuple(v for v in range(self.vertex_count) if not self._succ[v])

    @property
    def is_normalized(self) -> bool:
        return len(self.sources) == 1 and len(self.sinks) == 1

    @property
    def source_id(self) -> int:
        if len(self.sources) != 1:
            raise MalformedInput("task has no unique source; normalize it first")
        return self.sources[0]

    @property
    def sink_id(self) -> int:
        if len(self.sinks) != 1:
            raise MalformedInput("task has no unique sink; normalize it first")
        return self.sinks[0]

    @cached_property
    def topological_order(self) -> tuple[int, ...]:
        # Kahn's algorithm, smallest id first among ready vertices; a short
        # result means a cycle.
        indeg = [len(p) for p in self._pred]
        ready = [v for v in range(self.vertex_count) if indeg[v] == 0]
        heapq.heapify(ready)
        order = []
        while ready:
            u = heapq.heappop(ready)
            order.append(u)
            for v in self._succ[u]:
                indeg[v] -= 1
                if indeg[v] == 0:
                    heapq.heappush(ready, v)
        return tuple(order)

    @cached_property
    def reachability(self) -> Reachability:
        return Reachability.of(self)

    @cached_property
    def length(self) -> int:
        return longest_path_length(self)

    @cached_property
    def volume(self) -> int:
        return sum(self.wcet)

    @cached_property
    def width(self) -> int:
        return width(self)

    def with_wcet(self, wcet: Sequence[int]) -> DagTask:
        """Same graph with different WCETs."""
        if len(wcet) != self.vertex_count:
            raise MalformedInput("WCET vector length does not match vertex count")
        return DagTask(tuple(wcet), self.edges, self.name)


def validate_and_normalize(
    wcet: Sequence[int], edges: Iterable[Sequence[int]], name: str = ""
) -> DagTask:
    """Build a task and give it exactly one source and one sink.

    A zero-WCET dummy source is appended when there are several sources,
    then a zero-WCET dummy sink when there are several sinks.
    """
    return normalize(DagTask(tuple(wcet), tuple(tuple(e) for e in edges), name))


def normalize(task: DagTask) -> DagTask:
    if task.is_normalized:
        return task
    wcet = list(task.wcet)
    edges = list(task.edges)
    sources, sinks = task.sources, task.sinks
    if len(sources) > 1:
        s = len(wcet)
        wcet.append(0)
        edges.extend((s, v) for v in sources)
    if len(sinks) > 1:
        t = len(wcet)
        wcet.append(0)
        edges.extend((v, t) for v in sinks)
    return DagTask(tuple(wcet), tuple(edges), task.name)


def topological_order(task: DagTask) -> tuple[int, ...]:
    return task.topological_order


class Reachability:
    """Strict ancestor relation stored as one descendant bitmask per vertex."""

    def __init__(self, desc: Sequence[int]):
        self._desc = tuple(desc)
        n = len(self._desc)
        anc = [0] * n
        for u, bits in enumerate(self._desc):
            b = bits
            while b:
                low = b & -b
                anc[low.bit_length() - 1] |= 1 << u
                b ^= low
        self._anc = tuple(anc)

    @classmethod
    def of(cls, task: DagTask) -> Reachability:
        desc = [0] * task.vertex_count
        for u in reversed(task.topological_order):
            bits = 0
            for v in task.successors(u):
                bits |= (1 << v) | desc[v]
            desc[u] = bits
        return cls(desc)

    def __len__(self) -> int:
        return len(self._desc)

    def is_ancestor(self, u: int, v: int) -> bool:
        return bool(self._desc[u] >> v & 1)

    def comparable(self, u: int, v: int) -> bool:
        return self.is_ancestor(u, v) or self.is_ancestor(v, u)

    def descendant_bits(self, v: int) -> int:
        return self._desc[v]

    def ancestor_bits(self, v: int) -> int:
        return self._anc[v]

    def descendants(self, v: int) -> frozenset[int]:
        return _bits_to_set(self._desc[v])

    def ancestors(self, v: int) -> frozenset[int]:
        return _bits_to_set(self._anc[v])

    @cached_property
    def matrix(self) -> np.ndarray:
        """Dense boolean matrix, ``matrix[u, v]`` iff u is a strict ancestor of v."""
        n = len(self._desc)
        m = np.zeros((n, n), dtype=bool)
        for u, bits in enumerate(self._desc):
            if bits:
                raw = np.frombuffer(bits.to_bytes((n + 7) // 8, "little"), np.uint8)
                m[u] = np.unpackbits(raw, bitorder="little")[:n].astype(bool)
        return m

    def restrict(self, keep: Sequence[int]) -> Reachability:
        """Relation induced on ``keep``, relabelled to 0..len(keep)-1."""
        idx = {v: i for i, v in enumerate(keep)}
        desc = []
        for v in keep:
            bits = 0
            for w in _bits_to_set(self._desc[v]):
                if w in idx:
                    bits |= 1 << idx[w]
            desc.append(bits)
        return Reachability(desc)


def _bits_to_set(bits: int) -> frozenset[int]:
    out = []
    while bits:
        low = bits & -bits
        out.append(low.bit_length() - 1)
        bits ^= low
    return frozenset(out)


def reachability(task: DagTask) -> Reachability:
    return task.reachability


def _longest_to_sink(task: DagTask) -> list[int]:
    best = [0] * task.vertex_count
    for v in reversed(task.topological_order):
        tail = max((best[s] for s in task.successors(v)), default=0)
        best[v] = task.wcet[v] + tail
    return best


def longest_path_length(task: DagTask) -> int:
    """len(G): the largest summed WCET over all source-to-sink edge paths."""
    best = _longest_to_sink(task)
    return max(best[v] for v in task.sources)


def longest_complete_path(task: DagTask) -> Path:
    """A longest complete path; ties go to the lexicographically smallest
    vertex-id sequence."""
    best = _longest_to_sink(task)
    target = max(best[v] for v in task.sources)
    v = min(s for s in task.sources if best[s] == target)
    path = [v]
    while task.successors(v):
        rest = best[v] - task.wcet[v]
        v = min(s for s in task.successors(v) if best[s] == rest)
        path.append(v)
    return tuple(path)


def volume(task: DagTask) -> int:
    return task.volume


def volume_of(task: DagTask, vertices: Iterable[int]) -> int:
    return sum(task.wcet[v] for v in set(vertices))


def path_length(task: DagTask, path: Iterable[int]) -> int:
    return sum(task.wcet[v] for v in path)


def width(task: DagTask) -> int:
    """Maximum antichain size, via Dilworth: |V| minus a maximum matching in
    the bipartite graph of ancestor pairs."""
    reach = task.reachability.matrix
    n = reach.shape[0]
    match = maximum_bipartite_matching(csr_matrix(reach.astype(np.int8)), perm_type="column")
    return n - int(np.count_nonzero(match >= 0))


def check_generalized_path_list(
    task: DagTask, reach: Reachability, paths: Sequence[Sequence[int]]
) -> PathList:
    """Validate a generalized path list and return it as a tuple of tuples.

    Raises NotAChain, Overlap, or InvalidPathList for empty paths and
    out-of-range vertices.
    """
    seen: dict[int, int] = {}
    out = []
    for i, path in enumerate(paths):
        path = tuple(int(v) for v in path)
        if not path:
            raise InvalidPathList(f"path {i} is empty")
        for v in path:
            if not 0 <= v < task.vertex_count:
                raise InvalidPathList(f"path {i}: vertex {v} out of range")
            if v in seen:
                raise Overlap(v, (seen[v], i))
            seen[v] = i
        for a, b in zip(path, path[1:]):
            if not reach.is_ancestor(a, b):
                raise NotAChain(i, (a, b))
        out.append(path)
    return tuple(out)
