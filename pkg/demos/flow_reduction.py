"""
From chain families to min-cost flow
====================================

Every vertex is split into an in-node and an out-node joined by an arc of
cost -c(v); ancestor pairs get zero-cost arcs.  A flow of amount k then
corresponds to k disjoint chains, and its cost is minus their volume.
"""

from dagbound.flow import (
    SuccessiveShortestPath,
    brute_force_max_volume,
    build_reduction_network,
    extract_path_list,
    flow_from_path_list,
)
from dagbound.taskgraph import DagTask, validate_and_normalize

# the raw 4-vertex graph: 10 nodes, 15 arcs
raw = DagTask((30, 10, 10, 10), ((0, 1), (0, 3), (2, 3)))
net, rmap = build_reduction_network(raw)
print("nodes", net.node_count, "arcs", net.arc_count)
for tail, head, cap, cost in net.arcs:
    print(f"  {tail:2d} -> {head:2d}  cap {cap}  cost {cost}")

# one augmentation per unit of flow; each step reports the total cost
task = validate_and_normalize(raw.wcet, raw.edges)
net, rmap = build_reduction_network(task)
solver = SuccessiveShortestPath(net)
for k in range(1, task.width + 1):
    cost = solver.augment()
    paths = extract_path_list(net, rmap, solver.solution())
    oracle = brute_force_max_volume(task, task.reachability, k)[0]
    print(f"k={k}: cost {cost}, chains {paths}, exhaustive search says {oracle}")

# and back: a hand-picked chain list becomes a flow of matching cost
sol = flow_from_path_list(net, rmap, [(0, 3), (1,)])
print("((v0,v3),(v1)) as a flow: amount", sol.amount, "cost", sol.cost)
