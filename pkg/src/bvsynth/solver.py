"""End-to-end solving pipeline with budgets, statistics, and verification."""

from __future__ import annotations

import time
from dataclasses import dataclass

from .errors import VerificationFailed
from .enumeration import EnumerationState
from .frontend import Problem
from .semantics import Expr, eval_expr
from .unify import TerminalMap, Tree, build_tree, internal_node_count, map_terminals, tree_to_expr


@dataclass(frozen=True)
class SearchLimits:
    max_size: int = 12
    max_candidates: int = 5_000_000
    timeout: float | None = None  # seconds of wall clock for the whole solve


@dataclass
class RunStats:
    candidates: int  # candidates inspected by acceptance predicates
    signatures_stored: int
    pruned_duplicates: int
    evaluations: int  # constructed subexpressions; stored + pruned
    phase1_ms: float
    phase2_ms: float
    internal_nodes: int
    solution_size: int
    examples: int

    def lines(self) -> list[str]:
        return [
            f"examples:          {self.examples}",
            f"candidates:        {self.candidates}",
            f"signatures stored: {self.signatures_stored}",
            f"pruned duplicates: {self.pruned_duplicates}",
            f"evaluations:       {self.evaluations}",
            f"phase 1:           {self.phase1_ms:.1f} ms",
            f"phase 2:           {self.phase2_ms:.1f} ms",
            f"internal nodes:    {self.internal_nodes}",
            f"solution size:     {self.solution_size}",
        ]


@dataclass
class SolveResult:
    solution: Expr
    stats: RunStats
    tree: Tree | None
    terminal_map: TerminalMap


def verify_solution(problem: Problem, solution: Expr) -> None:
    """Concrete verification oracle: re-evaluate the solution on every example."""
    for example in problem.examples:
        env = dict(zip(problem.params, example.inputs))
        if eval_expr(solution, env, problem.width) != example.output:
            raise VerificationFailed(example.index)


def solve_problem(problem: Problem, limits: SearchLimits | None = None) -> SolveResult:
    """Run both phases, verify, and collect statistics.

    Terminal and condition enumeration both exclude the if0 production; all
    branching in the solution comes from the decision tree.
    """
    limits = limits or SearchLimits()
    deadline = time.monotonic() + limits.timeout if limits.timeout is not None else None
    engine = EnumerationState.for_problem(problem, exclude_ops={"if0"}, deadline=deadline)

    t0 = time.perf_counter()
    tmap = map_terminals(problem, engine, limits)
    t1 = time.perf_counter()

    tree: Tree | None = None
    if tmap.distinct() == 1:
        solution = next(iter(tmap.registry))
    else:
        tree = build_tree(problem, engine, tmap, limits)
        solution = tree_to_expr(tree, problem.grammar)
    t2 = time.perf_counter()

    verify_solution(problem, solution)

    stats = RunStats(
        candidates=engine.inspected,
        signatures_stored=engine.stored,
        pruned_duplicates=engine.pruned,
        evaluations=engine.evaluations,
        phase1_ms=(t1 - t0) * 1000.0,
        phase2_ms=(t2 - t1) * 1000.0,
        internal_nodes=internal_node_count(tree) if tree is not None else 0,
        solution_size=solution.size,
        examples=len(problem.examples),
    )
    return SolveResult(solution=solution, stats=stats, tree=tree, terminal_map=tmap)
