import numpy as np
import pytest
from hypothesis import given, settings

from dagbound.taskgraph import (
    CycleDetected,
    DagTask,
    InvalidPathList,
    MalformedInput,
    NotAChain,
    Overlap,
    check_generalized_path_list,
    longest_complete_path,
    longest_path_length,
    normalize,
    path_length,
    validate_and_normalize,
    volume_of,
    width,
)

from conftest import (
    all_complete_paths,
    brute_width,
    chain,
    dags,
    dfs_descendants,
    random_dag,
)


def test_chain_is_already_normalized():
    t = chain([1, 2, 3])
    assert t.vertex_count == 3
    assert (t.source_id, t.sink_id) == (0, 2)
    assert t.topological_order == (0, 1, 2)


def test_crossed_gains_dummy_source_and_sink(crossed):
    assert crossed.vertex_count == 6
    assert crossed.wcet[4:] == (0, 0)
    assert crossed.source_id == 4 and crossed.sink_id == 5
    assert set(crossed.successors(4)) == {0, 2}
    assert set(crossed.predecessors(5)) == {1, 3}


def test_cycle_rejected():
    with pytest.raises(CycleDetected):
        validate_and_normalize([1, 1], [(0, 1), (1, 0)])


@pytest.mark.parametrize(
    "wcet, edges",
    [
        ([1, -1], [(0, 1)]),
        ([1, 1], [(0, 2)]),
        ([1], [(0, 0)]),
        ([], []),
        ([1.5], []),
    ],
)
def test_malformed(wcet, edges):
    with pytest.raises(MalformedInput):
        validate_and_normalize(wcet, edges)


def test_topological_order_tie_break():
    # two parallel vertices under one source: source, then ascending ids
    t = validate_and_normalize([1, 1, 1], [(2, 1), (2, 0)])
    assert t.topological_order[:3] == (2, 0, 1)


def test_forkjoin_order_and_ancestors(forkjoin):
    order = forkjoin.topological_order
    assert order[0] == 0 and order[-1] == 5
    assert forkjoin.reachability.ancestors(4) == {0, 1, 2}


def test_crossed_reachability(crossed):
    r = crossed.reachability
    assert r.is_ancestor(2, 3)
    assert not r.comparable(1, 3)


def test_fixture_lengths_and_volumes(forkjoin, star, skewed):
    assert (forkjoin.length, forkjoin.volume) == (60, 100)
    assert (star.length, star.volume) == (30, 90)
    assert (skewed.length, skewed.volume) == (40, 60)
    assert volume_of(forkjoin, [1, 2]) == 40
    assert volume_of(forkjoin, []) == 0


def test_single_vertex():
    t = validate_and_normalize([7], [])
    assert (t.length, t.volume, t.width) == (7, 7, 1)


def test_longest_complete_paths(forkjoin, crossed, skewed):
    assert longest_complete_path(forkjoin) == (0, 1, 4, 5)
    assert longest_complete_path(skewed) == (5, 0, 2, 4, 6)
    # (s,v0,v1,t) and (s,v0,v3,t) both have length 40
    assert longest_complete_path(crossed) == (4, 0, 1, 5)


def test_widths(star, skewed):
    assert star.width == 4 == brute_width(star)
    assert skewed.width == 3 == brute_width(skewed)
    assert chain([4, 5, 6, 7]).width == 1


def test_generalized_path_lists(forkjoin, crossed):
    check_generalized_path_list(forkjoin, forkjoin.reachability, [(0, 2, 5)])
    check_generalized_path_list(crossed, crossed.reachability, [(0, 1), (2, 3)])
    with pytest.raises(Overlap) as err:
        check_generalized_path_list(crossed, crossed.reachability, [(0, 1), (1, 3)])
    assert err.value.vertex == 1
    with pytest.raises(NotAChain):
        check_generalized_path_list(crossed, crossed.reachability, [(1, 3)])
    with pytest.raises(InvalidPathList):
        check_generalized_path_list(crossed, crossed.reachability, [()])


def test_with_wcet_keeps_edges(skewed):
    t = skewed.with_wcet([21] + list(skewed.wcet[1:]))
    assert t.edges == skewed.edges and t.wcet[0] == 21
    with pytest.raises(MalformedInput):
        skewed.with_wcet([1])


@settings(max_examples=150, deadline=None)
@given(dags())
def test_properties_against_oracles(task):
    n = task.vertex_count
    assert len(task.sources) == 1 and len(task.sinks) == 1
    assert normalize(task) is task
    # topological order is edge-forward
    pos = {v: i for i, v in enumerate(task.topological_order)}
    assert all(pos[u] < pos[v] for u, v in task.edges)
    # reachability equals DFS closure, matrix agrees with bitsets
    for v in range(n):
        assert task.reachability.descendants(v) == dfs_descendants(task, v)
    m = task.reachability.matrix
    assert m.shape == (n, n) and not m.diagonal().any()
    assert all(m[u, v] == task.reachability.is_ancestor(u, v) for u in range(n) for v in range(n))
    # longest path equals the best enumerated complete path
    paths = all_complete_paths(task)
    assert task.length == max(path_length(task, p) for p in paths)
    best = longest_complete_path(task)
    assert best in paths and path_length(task, best) == task.length
    assert best == min(p for p in paths if path_length(task, p) == task.length)
    assert task.width == brute_width(task)


def test_random_relabelled_dags_match_oracles():
    rng = np.random.default_rng(7)
    for _ in range(60):
        t = random_dag(rng, int(rng.integers(1, 9)), float(rng.random()))
        assert t.width == brute_width(t)
        assert t.length == longest_path_length(t)


def test_frozen_and_hashable_edges():
    t = DagTask((1, 2), ((0, 1), (0, 1)))
    assert t.edges == ((0, 1),)
    with pytest.raises(Exception):
        t.wcet = (3, 4)
