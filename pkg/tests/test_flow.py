import numpy as np
import pytest
from hypothesis import given, settings

from dagbound.flow import (
    AmountInfeasible,
    NotReductionNetwork,
    SuccessiveShortestPath,
    TooLarge,
    brute_force_max_volume,
    build_reduction_network,
    extract_path_list,
    flow_from_path_list,
    min_cost_profile,
    reduction_network,
    validate_flow,
)
from dagbound.taskgraph import DagTask, path_length

from conftest import RAW, brute_chains_volume, chain, dags, random_dag


def raw_crossed():
    c, e = RAW["crossed"]
    return DagTask(c, tuple(e))


def test_raw_crossed_network_shape():
    net, rmap = build_reduction_network(raw_crossed())
    assert net.node_count == 10
    assert net.arc_count == 15
    ancestor = [(t, h) for t, h, _, c in net.arcs if t not in (0,) and h != 9 and c == 0]
    split = [a for a in net.arcs if a[3] < 0]
    assert len(ancestor) == 3 and len(split) == 4
    assert all(cap == 1 for _, _, cap, _ in net.arcs)
    assert sorted(-a[3] for a in split) == [10, 10, 10, 30]
    assert rmap.vertex_of(1) == (0, "in") and rmap.vertex_of(2) == (0, "out")
    assert rmap.vertex_of(0) is None


def test_profiles(crossed, skewed):
    net, _ = build_reduction_network(raw_crossed())
    assert min_cost_profile(net, 2) == [(1, -40), (2, -60)]
    net, _ = build_reduction_network(skewed)
    assert min_cost_profile(net, 2) == [(1, -40), (2, -59)]


def test_amount_infeasible(crossed):
    net, _ = build_reduction_network(crossed)
    with pytest.raises(AmountInfeasible) as err:
        min_cost_profile(net, crossed.vertex_count + 1)
    assert err.value.amount == crossed.vertex_count + 1


def test_example_flow_round_trip(crossed):
    net, rmap = build_reduction_network(crossed)
    sol = flow_from_path_list(net, rmap, [(0, 3), (1,)])
    assert sol.amount == 2 and sol.cost == -50
    assert extract_path_list(net, rmap, sol) == ((0, 3), (1,))


def test_min_cost_amount_two_covers_everything(crossed):
    net, rmap = build_reduction_network(crossed)
    solver = SuccessiveShortestPath(net)
    solver.augment()
    solver.augment()
    sol = solver.solution()
    validate_flow(net, sol)
    paths = extract_path_list(net, rmap, sol)
    assert sum(path_length(crossed, p) for p in paths) == 60
    assert {v for p in paths for v in p if crossed.wcet[v]} == {0, 1, 2, 3}


def test_brute_force_fixture_values(crossed, star):
    assert brute_force_max_volume(crossed, crossed.reachability, 2)[0] == 60
    assert brute_force_max_volume(crossed, crossed.reachability, 1)[0] == 40
    assert brute_force_max_volume(star, star.reachability, 2)[0] == 50


def test_brute_force_size_limit():
    big = chain([1] * 13)
    with pytest.raises(TooLarge):
        brute_force_max_volume(big, big.reachability, 1)


def test_brute_force_agrees_with_label_oracle():
    rng = np.random.default_rng(11)
    for _ in range(40):
        t = random_dag(rng, int(rng.integers(1, 6)), float(rng.random()), wmax=9)
        for k in (1, 2):
            assert brute_force_max_volume(t, t.reachability, k)[0] == brute_chains_volume(t, k)


def test_restricted_network_uses_outside_ids(forkjoin):
    keep = [2, 3, 5]
    net, rmap = reduction_network([forkjoin.wcet[v] for v in keep], forkjoin.reachability.restrict(keep), keep)
    solver = SuccessiveShortestPath(net)
    solver.augment()
    paths = extract_path_list(net, rmap, solver.solution())
    assert paths == ((3, 5),)


def test_rejects_foreign_network(crossed):
    net, rmap = build_reduction_network(crossed)
    _, other = build_reduction_network(chain([1, 2]))
    sol = SuccessiveShortestPath(net).solution()
    with pytest.raises(NotReductionNetwork):
        extract_path_list(net, other, sol)


def test_reduced_costs_stay_nonnegative(skewed):
    net, _ = build_reduction_network(skewed)
    solver = SuccessiveShortestPath(net)
    for _ in range(skewed.width):
        rc = solver.reduced_costs()
        assert np.all(rc[solver.resid > 0] >= 0)
        solver.augment()


@settings(max_examples=120, deadline=None)
@given(dags(max_vertices=8))
def test_flow_properties(task):
    net, rmap = build_reduction_network(task)
    w = task.width
    profile = min_cost_profile(net, w)
    vols = [0] + [-c for _, c in profile]
    assert vols[1] == task.length
    assert vols[w] == task.volume
    gains = np.diff(vols)
    assert np.all(gains >= 0)
    assert np.all(np.diff(gains) <= 0)
    for k in range(1, min(w, 3) + 1):
        assert vols[k] == brute_force_max_volume(task, task.reachability, k)[0]
    # sufficiency and necessity: every optimal flow decodes to a valid list of
    # equal volume, and that list re-encodes to a flow of equal cost
    solver = SuccessiveShortestPath(net)
    for k in range(1, w + 1):
        solver.augment()
        sol = solver.solution()
        paths = extract_path_list(net, rmap, sol)
        assert len(paths) <= k
        assert sum(path_length(task, p) for p in paths) == vols[k]
        back = flow_from_path_list(net, rmap, paths)
        assert back.cost == sol.cost
