"""Horner-scheme optimization of sparse multivariate polynomials.

Pipeline: :func:`parse_polynomial` -> :func:`horner_transform` for a chosen
variable order -> :func:`cse` -> :func:`emit_tac` / :func:`emit_c_like`.
The order comes from :func:`occurrence_order`, :func:`exhaustive_search`,
:func:`random_order_search` or :func:`mcts_optimize`.
"""

from .cse import Instruction, InstructionSeq, Temp, cse, instruction_count, replay, to_dag
from .emit import StatsReport, emit_c_like, emit_stats, emit_tac, parse_tac, sweep_csv
from .expr import (
    OpCount,
    ParseError,
    Polynomial,
    Term,
    Variable,
    Workspace,
    evaluate,
    format_polynomial,
    naive_op_count,
    occurrence_counts,
    parse_polynomial,
)
from .gen import ResourceLimitError, cached_resultant, resultant, structured_random, sylvester_matrix
from .horner import Add, Const, Mul, Var, evaluate_dag, horner_transform, to_string, tree_op_count
from .search import (
    CostEvaluator,
    Direction,
    MctsConfig,
    SearchResult,
    evaluate_order,
    exhaustive_search,
    mcts_optimize,
    occurrence_order,
    random_order_search,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
