import math
from fractions import Fraction

import numpy as np
import pytest

from dagbound.gen import GenConfig, TaskSet, assign_period, build_taskset, generate, rational

from conftest import fixture_task

SMALL = GenConfig(vertices=(10, 20))


def test_pf_one_is_a_chain():
    t = generate(GenConfig(vertices=(12, 12), pf=1.0), 1)
    assert t.width == 1 and t.length == t.volume
    assert t.vertex_count == 12


def test_pf_zero_is_fully_parallel():
    t = generate(GenConfig(vertices=(12, 12), pf=0.0), 1)
    assert t.vertex_count == 14
    assert t.width == 12


def test_wcets_in_range():
    t = generate(GenConfig(vertices=(50, 50), pf=0.2, wcet=(5, 100)), 4)
    real = [c for c in t.wcet[:50]]
    assert min(real) >= 5 and max(real) <= 100


def test_deterministic_per_seed():
    assert generate(SMALL, (1, 2, 3)) == generate(SMALL, (1, 2, 3))
    assert generate(SMALL, (1, 2, 3)) != generate(SMALL, (1, 2, 4))
    lay = GenConfig(kind="layered")
    assert generate(lay, 5) == generate(lay, 5)


def test_edge_count_within_three_sigma():
    n, pf, draws = 20, 0.3, 1000
    cfg = GenConfig(vertices=(n, n), pf=pf, wcet=(1, 1))
    pairs = n * (n - 1) // 2
    counts = []
    for i in range(draws):
        t = generate(cfg, (9, i))
        counts.append(sum(1 for u, v in t.edges if u < n and v < n))
    mean = np.mean(counts)
    sigma = math.sqrt(pairs * pf * (1 - pf) / draws)
    assert abs(mean - pf * pairs) <= 3 * sigma


def test_single_layer_is_parallel():
    cfg = GenConfig(kind="layered", layers=(1, 1), layer_width=(6, 6))
    t = generate(cfg, 0)
    assert t.width == 6 and t.vertex_count == 8


def test_full_layer_edges_give_max_layer_width():
    cfg = GenConfig(kind="layered", layers=(4, 4), layer_width=(2, 7), edge_prob=1.0)
    for seed in range(10):
        t = generate(cfg, seed)
        real = sum(1 for c in t.wcet if c > 0)  # generated WCETs are >= 5
        widths = _layer_sizes(t, real)
        assert t.width == max(widths)


def _layer_sizes(task, real):
    depth = {}
    for v in task.topological_order:
        if v >= real:
            continue
        preds = [u for u in task.predecessors(v) if u < real]
        depth[v] = 1 + max((depth[u] for u in preds), default=-1)
    return np.bincount(list(depth.values())).tolist()


def test_assign_period(forkjoin):
    assert assign_period(forkjoin, 0) == 60
    assert assign_period(forkjoin, 1) == 100
    assert assign_period(forkjoin, Fraction(1, 2)) == 80
    assert assign_period(forkjoin, "0.33") == 74  # 60 + 13.2, rounded up
    with pytest.raises(ValueError):
        assign_period(forkjoin, 2)


def test_taskset_exact_utilization():
    for nu in ("0.1", "0.5", "1"):
        ts = build_taskset(8, nu, SMALL, seed=3)
        assert ts.utilization == rational(nu) * 8
        assert ts.normalized_utilization == rational(nu)
        assert all(p >= t.length for t, p in zip(ts.tasks, ts.periods))
        assert ts.deadlines == ts.periods


def test_taskset_deterministic_and_memo_transparent():
    a = build_taskset(4, "0.7", SMALL, seed=(1, 2))
    memo = {}
    b = build_taskset(4, "0.7", SMALL, seed=(1, 2), memo=memo)
    assert a == b and memo


@pytest.mark.parametrize(
    "kwargs",
    [dict(vertices=(5, 4)), dict(pf=1.5), dict(kind="grid"), dict(vertices=(0, 3)), dict(edge_prob=-0.1)],
)
def test_bad_config(kwargs):
    with pytest.raises(ValueError):
        GenConfig(**kwargs)


def test_bad_taskset_args():
    with pytest.raises(ValueError):
        build_taskset(0, "0.5", SMALL)
    with pytest.raises(ValueError):
        build_taskset(4, "0", SMALL)
    with pytest.raises(ValueError):
        build_taskset(4, "0.5", SMALL, df_range=("0.6", "0.2"))
