"""Naive, occurrence, random and MCTS operation counts on small resultants.

Usage: python demos/resultants.py [expansions]
"""

import sys
import time

from mctshorner import Workspace, naive_op_count, resultant
from mctshorner.cost import CostEvaluator
from mctshorner.search import MctsConfig, mcts_optimize, occurrence_order, random_order_search

n = int(sys.argv[1]) if len(sys.argv) > 1 else 1000
print(f"{'case':<9}{'terms':>7}{'naive':>8}{'occ':>7}{'random':>8}{'mcts':>7}{'sec':>7}")
for m, k in [(3, 2), (4, 3), (5, 4), (6, 4)]:
    t = time.perf_counter()
    p = resultant(m, k, Workspace())
    ev = CostEvaluator(p)
    occ = ev.cost(occurrence_order(p)).total
    rnd = random_order_search(p, n, seed=0, evaluator=ev)[0].best_cost.total
    best = mcts_optimize(p, MctsConfig(n, 0.3, "front", 0), evaluator=ev).best_cost.total
    print(f"res({m},{k})".ljust(9) + f"{len(p):>7}{naive_op_count(p).total:>8}{occ:>7}{rnd:>8}{best:>7}"
          f"{time.perf_counter() - t:>7.1f}")
