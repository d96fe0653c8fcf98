"""
Bounds on the small hand-made tasks
===================================

Four tiny DAG tasks with WCETs scaled by 10 (so 0.1 becomes 1).  For each
one we print the basic quantities and every bound at m = 2.
"""

from dagbound import TaskAnalysis, validate_and_normalize, multipath_bound_with_list
from dagbound.bounds import METHODS, greedy_path_list
from dagbound.taskgraph import longest_complete_path

tasks = {
    "forkjoin": validate_and_normalize(
        [10, 30, 10, 30, 10, 10], [(0, 1), (0, 2), (0, 3), (1, 4), (2, 4), (3, 5), (4, 5)], "forkjoin"
    ),
    "crossed": validate_and_normalize([30, 10, 10, 10], [(0, 1), (0, 3), (2, 3)], "crossed"),
    "star": validate_and_normalize(
        [0, 30, 20, 20, 20, 0], [(0, i) for i in range(1, 5)] + [(i, 5) for i in range(1, 5)], "star"
    ),
    "skewed": validate_and_normalize([20, 10, 1, 10, 19], [(0, 1), (0, 2), (2, 4), (3, 4)], "skewed"),
}

for name, task in tasks.items():
    print(f"{name}: len={task.length} vol={task.volume} width={task.width} "
          f"longest path={longest_complete_path(task)}")
    analysis = TaskAnalysis(task)
    for method in METHODS:
        rep = analysis.report(method, 2)
        print(f"  {method:12s} {str(rep.bound):>6s}  via {rep.paths}")

# crossed: which of the two longest paths goes first matters for a
# longest-path-first list.  v3 first leaves only v1, v1 first leaves (v2, v3).
crossed = tasks["crossed"]
print("crossed ((v0,v3),(v1)):", multipath_bound_with_list(crossed, 2, [(0, 3), (1,)]).bound)
print("crossed ((v0,v1),(v2,v3)):", multipath_bound_with_list(crossed, 2, [(0, 1), (2, 3)]).bound)

# Greedy chain peeling is not self-sustainable: shrinking c(v1) from 21 to
# 10 changes which chain is peeled first, and the bound goes *up*.
for c1 in (21, 10):
    t = tasks["skewed"].with_wcet([20, c1, 1, 10, 19, 0, 0])
    a = TaskAnalysis(t)
    print(f"skewed c(v1)={c1}: greedy list {greedy_path_list(t, 2)} "
          f"greedy {a.value('uete-greedy', 2)}, optimal {a.value('optimal', 2)}")
