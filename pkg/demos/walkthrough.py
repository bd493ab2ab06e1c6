"""One small polynomial through every stage of the pipeline."""

from mctshorner import (
    Workspace, cse, emit_c_like, emit_tac, format_polynomial, horner_transform, instruction_count,
    naive_op_count, parse_polynomial,
)
from mctshorner.horner import to_string, tree_op_count
from mctshorner.search import exhaustive_search, occurrence_order

ws = Workspace("xyz")
p = parse_polynomial("y - 3*x + 5*x*z + 2*x^2*y*z - 3*x^2*y^2*z + 5*x^2*y^2*z^2", ws)
print("polynomial:", format_polynomial(p))
print("naive:     ", naive_op_count(p))

tree = horner_transform(p, ws.variables)
print("\nHorner in x, y, z:", to_string(tree))
print("tree count:       ", tree_op_count(tree))

code = cse(tree)
print("after CSE:        ", instruction_count(code))
print("\nthree-address code:")
print(emit_tac(code))
print(emit_c_like(code, "sample", ws.variables))

occ = occurrence_order(p)
print("occurrence order:", [v.name for v in occ], instruction_count(cse(horner_transform(p, occ))))
best = exhaustive_search(p)
print("best of all 3! orders:", [v.name for v in best.best_order], best.best_cost)
