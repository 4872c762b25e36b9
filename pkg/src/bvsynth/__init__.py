"""PBE synthesizer for fixed-width bitvector functions.

Finds per-example terminal expressions by size-ordered enumeration with
signature pruning, then unifies them into a decision tree of enumerated
if0 conditions.
"""

from .semantics import App, BitVecValue, Const, Expr, OPERATORS, Var, eval_expr, expr_to_sexpr
from .frontend import (
    Example,
    Grammar,
    Problem,
    emit_solution,
    parse_problem,
    parse_solution,
)
from .enumeration import EnumerationState, Signature, signature_of
from .solver import RunStats, SearchLimits, SolveResult, solve_problem

__all__ = [
    "App",
    "BitVecValue",
    "Const",
    "EnumerationState",
    "Example",
    "Expr",
    "Grammar",
    "OPERATORS",
    "Problem",
    "RunStats",
    "SearchLimits",
    "Signature",
    "SolveResult",
    "Var",
    "emit_solution",
    "eval_expr",
    "expr_to_sexpr",
    "parse_problem",
    "parse_solution",
    "signature_of",
    "solve_problem",
]
