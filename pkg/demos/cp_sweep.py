"""Mean and spread of the best total over seeds, for a grid of cp and N.

Small cp exploits too early and large cp spreads the budget thin. More
expansions help at every cp.
"""

import statistics

from mctshorner import Workspace, resultant
from mctshorner.cost import CostEvaluator
from mctshorner.search import MctsConfig, mcts_optimize

p = resultant(4, 3, Workspace())
ev = CostEvaluator(p)
seeds = range(10)
print(f"res(4,3): {len(p)} terms, {len(p.variables)} variables\n")
print(f"{'N':>6}{'cp':>7}{'mean':>9}{'std':>7}{'min':>6}")
for n in (100, 1000):
    for cp in (0.01, 0.1, 0.3, 1.0, 10.0):
        totals = [mcts_optimize(p, MctsConfig(n, cp, "front", s), evaluator=ev).best_cost.total for s in seeds]
        print(f"{n:>6}{cp:>7}{statistics.mean(totals):>9.1f}{statistics.pstdev(totals):>7.1f}{min(totals):>6}")
