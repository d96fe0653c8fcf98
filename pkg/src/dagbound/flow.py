"""Maximum-volume disjoint chain packing via minimum-cost flow.

A DAG task is turned into a unit-capacity flow network in which every unit
of flow from the new source to the new sink traces a chain of the ancestor
order, and the split arc of vertex v costs -c(v). A minimum-cost flow of
amount n therefore encodes a set of n disjoint chains of maximum total WCET.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .taskgraph import (
    DagTask,
    PathList,
    Reachability,
    check_generalized_path_list,
)

_INF = 1 << 60


class AmountInfeasible(ValueError):
    def __init__(self, amount: int):
        self.amount = amount
        super().__init__(f"no flow of amount {amount} exists")


class NotIntegral(ValueError):
    pass


class NotReductionNetwork(ValueError):
    pass


class TooLarge(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class FlowNetwork:
    """Arcs are parallel arrays: ``tail[i] -> head[i]`` with ``cap[i]``, ``cost[i]``."""

    node_count: int
    tail: np.ndarray
    head: np.ndarray
    cap: np.ndarray
    cost: np.ndarray
    source: int
    sink: int

    @property
    def arc_count(self) -> int:
        return len(self.tail)

    @property
    def arcs(self) -> list[tuple[int, int, int, int]]:
        return list(
            zip(
                self.tail.tolist(),
                self.head.tolist(),
                self.cap.tolist(),
                self.cost.tolist(),
            )
        )

    def arc_index(self, u: int, v: int) -> int:
        hits = np.flatnonzero((self.tail == u) & (self.head == v))
        if len(hits) == 0:
            raise KeyError((u, v))
        return int(hits[0])


@dataclass(frozen=True)
class ReductionMap:
    """Node ids of each DAG vertex's in/out copies in the reduction network."""

    in_node: tuple[int, ...]
    out_node: tuple[int, ...]
    vertices: tuple[int, ...]

    def vertex_of(self, node: int) -> tuple[int, str] | None:
        """(DAG vertex, 'in' | 'out') for a split node, None for source/sink."""
        if node <= 0 or node > 2 * len(self.in_node):
            return None
        i, side = divmod(node - 1, 2)
        return self.vertices[i], ("in", "out")[side]


@dataclass(frozen=True, eq=False)
class FlowSolution:
    flow: np.ndarray
    amount: int
    cost: int


def build_reduction_network(
    task: DagTask, reach: Reachability | None = None
) -> tuple[FlowNetwork, ReductionMap]:
    if reach is None:
        reach = task.reachability
    return reduction_network(task.wcet, reach)


def reduction_network(
    weights: Sequence[int],
    reach: Reachability,
    vertices: Sequence[int] | None = None,
) -> tuple[FlowNetwork, ReductionMap]:
    """Reduction network for a weighted order given by ``reach``.

    ``vertices`` relabels local index i to an outside vertex id (used when
    the order is a restriction of a larger task).  Node 0 is the source,
    nodes 2i+1 / 2i+2 are the in / out copies of local vertex i, and the
    last node is the sink.
    """
    n = len(weights)
    if len(reach) != n:
        raise ValueError("reachability size does not match weights")
    if vertices is None:
        vertices = range(n)
    source, sink = 0, 2 * n + 1
    in_node = 1 + 2 * np.arange(n)
    out_node = in_node + 1

    anc_u, anc_v = np.nonzero(reach.matrix)
    tails = [out_node[anc_u], in_node, np.zeros(n, dtype=int), out_node]
    heads = [in_node[anc_v], out_node, in_node, np.full(n, sink)]
    costs = [
        np.zeros(len(anc_u), dtype=np.int64),
        -np.asarray(weights, dtype=np.int64),
        np.zeros(n, dtype=np.int64),
        np.zeros(n, dtype=np.int64),
    ]
    tail = np.concatenate(tails).astype(np.int64)
    net = FlowNetwork(
        node_count=2 * n + 2,
        tail=tail,
        head=np.concatenate(heads).astype(np.int64),
        cap=np.ones(len(tail), dtype=np.int64),
        cost=np.concatenate(costs),
        source=source,
        sink=sink,
    )
    rmap = ReductionMap(
        in_node=tuple(in_node.tolist()),
        out_node=tuple(out_node.tolist()),
        vertices=tuple(int(v) for v in vertices),
    )
    return net, rmap


class SuccessiveShortestPath:
    """Incremental min-cost flow on an acyclic network, one unit per step.

    Initial potentials come from one shortest-path pass in topological
    order, so every later search runs on non-negative reduced costs.
    """

    def __init__(self, net: FlowNetwork):
        n = net.node_count
        self.net = net
        self.resid = np.zeros((n, n), dtype=np.int64)
        self.cost = np.zeros((n, n), dtype=np.int64)
        pairs = net.tail * n + net.head
        if len(np.unique(pairs)) != len(pairs):
            raise NotReductionNetwork("parallel arcs are not supported")
        if np.any(net.tail == net.head):
            raise NotReductionNetwork("self-loop in flow network")
        self.resid[net.tail, net.head] = net.cap
        if np.any(self.resid[net.head, net.tail] > 0):
            raise NotReductionNetwork("antiparallel arcs are not supported")
        self.cost[net.tail, net.head] = net.cost
        self.cost[net.head, net.tail] = -net.cost
        self.pot = self._initial_potentials()
        self.amount = 0
        self.total_cost = 0

    def _initial_potentials(self) -> np.ndarray:
        net = self.net
        n = net.node_count
        adj = self.resid > 0
        indeg = adj.sum(axis=0)
        order = []
        ready = list(np.flatnonzero(indeg == 0))
        while ready:
            u = ready.pop()
            order.append(u)
            for v in np.flatnonzero(adj[u]):
                indeg[v] -= 1
                if indeg[v] == 0:
                    ready.append(v)
        if len(order) != n:
            raise NotReductionNetwork("flow network has a cycle")
        dist = np.full(n, _INF, dtype=np.int64)
        dist[net.source] = 0
        for v in order:
            into = adj[:, v]
            if v != net.source and into.any():
                cand = dist[into]
                ok = cand < _INF
                if ok.any():
                    dist[v] = int((cand[ok] + self.cost[into, v][ok]).min())
        # Every node of a reduction network is reachable; anything else gets a
        # finite placeholder.
        reachable = dist < _INF
        big = int(dist[reachable].max()) if reachable.any() else 0
        dist[~reachable] = big
        return dist

    def reduced_costs(self) -> np.ndarray:
        return self.cost + self.pot[:, None] - self.pot[None, :]

    def augment(self) -> int:
        """Push one more unit along a cheapest augmenting path; returns the
        new total cost.  Raises AmountInfeasible if the sink is cut off."""
        net = self.net
        n = net.node_count
        rc = self.reduced_costs()
        assert np.all(rc[self.resid > 0] >= 0), "negative reduced cost"
        dist = np.full(n, _INF, dtype=np.int64)
        parent = np.full(n, -1, dtype=np.int64)
        done = np.zeros(n, dtype=bool)
        dist[net.source] = 0
        for _ in range(n):
            cand = np.where(done, _INF, dist)
            u = int(np.argmin(cand))
            if cand[u] >= _INF:
                break
            done[u] = True
            if u == net.sink:
                break
            nd = dist[u] + rc[u]
            upd = (self.resid[u] > 0) & ~done & (nd < dist)
            dist[upd] = nd[upd]
            parent[upd] = u
        if not done[net.sink]:
            raise AmountInfeasible(self.amount + 1)
        d_sink = dist[net.sink]
        self.pot += np.where(done, dist, d_sink)
        v = net.sink
        while v != net.source:
            u = int(parent[v])
            self.resid[u, v] -= 1
            self.resid[v, u] += 1
            self.total_cost += int(self.cost[u, v])
            v = u
        self.amount += 1
        return self.total_cost

    def solution(self) -> FlowSolution:
        net = self.net
        flow = net.cap - self.resid[net.tail, net.head]
        return FlowSolution(flow=flow, amount=self.amount, cost=self.total_cost)


def min_cost_profile(net: FlowNetwork, n_max: int) -> list[tuple[int, int]]:
    """[(k, minimum cost of a flow of amount k)] for k = 1..n_max."""
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    solver = SuccessiveShortestPath(net)
    return [(k, solver.augment()) for k in range(1, n_max + 1)]


def validate_flow(net: FlowNetwork, sol: FlowSolution) -> None:
    """Check capacity, conservation, amount and cost bookkeeping."""
    flow = np.asarray(sol.flow)
    if flow.shape != (net.arc_count,):
        raise NotIntegral("flow vector does not match the arc list")
    if not np.all(np.equal(np.mod(flow, 1), 0)):
        raise NotIntegral("flow has fractional values")
    flow = flow.astype(np.int64)
    if np.any(flow < 0) or np.any(flow > net.cap):
        raise ValueError("flow violates arc capacity")
    balance = np.zeros(net.node_count, dtype=np.int64)
    np.add.at(balance, net.tail, -flow)
    np.add.at(balance, net.head, flow)
    inner = np.ones(net.node_count, dtype=bool)
    inner[[net.source, net.sink]] = False
    if np.any(balance[inner] != 0):
        raise ValueError("flow violates conservation")
    if -balance[net.source] != sol.amount:
        raise ValueError("amount does not match source outflow")
    if int(flow @ net.cost) != sol.cost:
        raise ValueError("cost does not match arc flows")


def _check_reduction(net: FlowNetwork, rmap: ReductionMap) -> None:
    n = len(rmap.in_node)
    if net.node_count != 2 * n + 2 or net.source != 0 or net.sink != 2 * n + 1:
        raise NotReductionNetwork("node layout does not match the reduction map")
    if np.any(net.cap != 1):
        raise NotReductionNetwork("reduction networks have unit capacities")


def extract_path_list(
    net: FlowNetwork, rmap: ReductionMap, sol: FlowSolution
) -> PathList:
    """Follow each unit of flow out of the source and collect the vertices
    whose split arc it crosses.  Paths are sorted by first vertex id."""
    _check_reduction(net, rmap)
    validate_flow(net, sol)
    flow = np.asarray(sol.flow).astype(np.int64)
    used = flow > 0
    nxt: dict[int, int] = {}
    for t, h in zip(net.tail[used].tolist(), net.head[used].tolist()):
        if t != net.source:
            nxt[t] = h
    starts = sorted(net.head[used & (net.tail == net.source)].tolist())
    paths = []
    for node in starts:
        path = []
        while node != net.sink:
            info = rmap.vertex_of(node)
            if info is None:
                raise NotReductionNetwork(f"unexpected node {node} on a flow path")
            v, side = info
            following = nxt[node]
            if side == "in" and following == node + 1:
                path.append(v)
            node = following
        if path:
            paths.append(tuple(path))
    paths.sort(key=lambda p: p[0])
    return tuple(paths)


def flow_from_path_list(
    net: FlowNetwork, rmap: ReductionMap, paths: Sequence[Sequence[int]]
) -> FlowSolution:
    """The flow that routes one unit through each path, in path order."""
    _check_reduction(net, rmap)
    local = {v: i for i, v in enumerate(rmap.vertices)}
    index = {(t, h): i for i, (t, h) in enumerate(zip(net.tail.tolist(), net.head.tolist()))}
    flow = np.zeros(net.arc_count, dtype=np.int64)
    for path in paths:
        nodes = [net.source]
        for v in path:
            i = local[v]
            nodes += [rmap.in_node[i], rmap.out_node[i]]
        nodes.append(net.sink)
        for a, b in zip(nodes, nodes[1:]):
            if (a, b) not in index:
                raise ValueError(f"path {tuple(path)} is not a chain of the network")
            flow[index[a, b]] += 1
    sol = FlowSolution(flow=flow, amount=len(paths), cost=int(flow @ net.cost))
    validate_flow(net, sol)
    return sol


MAX_BRUTE_FORCE_VERTICES = 12


def brute_force_max_volume(
    task: DagTask, reach: Reachability, n: int
) -> tuple[int, PathList]:
    """Exhaustive search over families of at most n disjoint chains.

    Vertices are visited in topological order and each is either skipped,
    appended to an open chain whose last vertex is its ancestor, or opens a
    new chain.  Branches that cannot beat the incumbent are cut.
    """
    if task.vertex_count > MAX_BRUTE_FORCE_VERTICES:
        raise TooLarge(f"brute force is limited to {MAX_BRUTE_FORCE_VERTICES} vertices")
    order = task.topological_order
    c = task.wcet
    suffix = [0] * (len(order) + 1)
    for i in range(len(order) - 1, -1, -1):
        suffix[i] = suffix[i + 1] + c[order[i]]
    best_vol = -1
    best: list[list[int]] = []
    chains: list[list[int]] = []

    def search(i: int, vol: int) -> None:
        nonlocal best_vol, best
        if vol + suffix[i] <= best_vol:
            return
        if i == len(order):
            best_vol = vol
            best = [list(ch) for ch in chains]
            return
        v = order[i]
        for ch in chains:
            if reach.is_ancestor(ch[-1], v):
                ch.append(v)
                search(i + 1, vol + c[v])
                ch.pop()
        if len(chains) < n:
            chains.append([v])
            search(i + 1, vol + c[v])
            chains.pop()
        search(i + 1, vol)

    search(0, 0)
    paths = tuple(sorted((tuple(ch) for ch in best), key=lambda p: p[0]))
    check_generalized_path_list(task, reach, paths)
    return best_vol, paths
