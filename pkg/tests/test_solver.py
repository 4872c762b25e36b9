"""The end-to-end pipeline: budgets, verification, and statistics."""

from __future__ import annotations

import pytest

from bvsynth.errors import TimeoutExceeded, UnsolvableExample, VerificationFailed
from bvsynth.semantics import App, Var, app, contains_op, eval_expr, subexpressions
from bvsynth.solver import SearchLimits, solve_problem, verify_solution
from bvsynth.unify import internal_node_count

import bruteforce
from helpers import grammar_of, problem_of, rows_of

BASE_OPS = ["bvand", "bvor", "bvnot", "bvadd"]


def test_conflict_free_identity_instance():
    p = problem_of(grammar_of(BASE_OPS), [(1, 1), (9, 9), (42, 42), (7, 7)])
    result = solve_problem(p)
    assert result.solution == Var("x")
    assert result.tree is None
    assert result.stats.internal_nodes == 0
    assert result.stats.solution_size == 1
    assert result.stats.examples == 4
    assert not contains_op(result.solution, "if0")


def test_parity_instance_builds_two_nodes():
    # Derived with the brute-force condition oracle: the first conflicting
    # pair (0x0, 0x1) is separated by the size-1 condition x, which leaves
    # 0x3 to be split off later by bvand(x, #x01); hence two if0 nodes.
    p = problem_of(grammar_of(BASE_OPS, width=8), [(0x0, 0x0), (0x2, 0x2), (0x1, 0xFE), (0x3, 0xFC)], width=8)
    oracle_root = bruteforce.min_condition(p.grammar, ("x",), rows_of(p), 8, 0, 2, 6)
    assert oracle_root is not None and oracle_root[1] == Var("x")
    result = solve_problem(p)
    assert result.tree is not None
    assert internal_node_count(result.tree) == 2
    assert result.stats.internal_nodes == 2
    if0_nodes = sum(
        1 for e in subexpressions(result.solution) if isinstance(e, App) and e.op == "if0"
    )
    assert if0_nodes == 2
    for ex in p.examples:
        env = dict(zip(p.params, ex.inputs))
        assert eval_expr(result.solution, env, p.width) == ex.output


def test_solution_size_and_node_bound_on_mixed_instance():
    pairs = [(0x04, 0x04), (0x12, 0x12), (0x05, 0xFA), (0x14, 0xEB)]
    p = problem_of(
        grammar_of(
            ["bvnot", "shl1", "shr1", "shr4", "shr16", "bvand", "bvor", "bvxor", "bvadd"],
            width=8,
        ),
        pairs,
        width=8,
    )
    result = solve_problem(p)
    assert result.stats.internal_nodes <= len(pairs) - 1
    verify_solution(p, result.solution)


def test_stats_counters_are_consistent():
    p = problem_of(grammar_of(BASE_OPS, width=8), [(3, 1), (12, 9), (7, 2)], width=8)
    stats = solve_problem(p).stats
    assert stats.pruned_duplicates + stats.signatures_stored == stats.evaluations
    assert stats.candidates > 0
    assert stats.solution_size >= 1
    assert stats.phase1_ms >= 0 and stats.phase2_ms >= 0


def test_verify_solution_raises_on_wrong_program():
    p = problem_of(grammar_of(BASE_OPS), [(3, 6)])
    with pytest.raises(VerificationFailed) as info:
        verify_solution(p, Var("x"))
    assert info.value.index == 0


def test_size_budget_maps_to_unsolvable_example():
    p = problem_of(grammar_of(["bvadd"]), [(3, 6)])  # needs bvadd(x, x), size 3
    with pytest.raises(UnsolvableExample):
        solve_problem(p, SearchLimits(max_size=2))
    result = solve_problem(p, SearchLimits(max_size=3))
    assert result.solution == app("bvadd", Var("x"), Var("x"))


def test_candidate_budget_maps_to_unsolvable_example():
    p = problem_of(grammar_of(BASE_OPS), [(0x1234, 0xDEADBEEF)])
    with pytest.raises(UnsolvableExample):
        solve_problem(p, SearchLimits(max_size=30, max_candidates=2_000))


def test_grammar_violation_surfaces_from_solve():
    # Terminal search draws from Start, but the if0 branch nonterminal can
    # only derive the zero constant, so the assembled tree leaves the grammar.
    from bvsynth.errors import GrammarViolation
    from bvsynth.frontend import ConstTerminal, Example, Grammar, OpRule, Problem, VarTerminal
    from bvsynth.semantics import BitVecValue

    w = 8
    grammar = Grammar(
        ("Start", "Cond", "Term"),
        {
            "Start": (
                VarTerminal("x"),
                ConstTerminal(BitVecValue(w, 1)),
                OpRule("if0", ("Cond", "Term", "Term")),
            ),
            "Cond": (
                VarTerminal("x"),
                ConstTerminal(BitVecValue(w, 1)),
                OpRule("bvand", ("Cond", "Cond")),
            ),
            "Term": (ConstTerminal(BitVecValue(w, 0)),),
        },
        "Start",
    )
    examples = (
        Example((BitVecValue(w, 4),), BitVecValue(w, 4), 0),
        Example((BitVecValue(w, 3),), BitVecValue(w, 1), 1),
    )
    problem = Problem("f", ("x",), w, grammar, examples)
    with pytest.raises(GrammarViolation):
        solve_problem(problem)


def test_timeout_raises_between_batches():
    # An unreachable output forces a long search; a zero budget must stop it
    # at the first 4096-evaluation checkpoint.
    p = problem_of(grammar_of(BASE_OPS), [(0x1234, 0xDEADBEEF)])
    with pytest.raises(TimeoutExceeded):
        solve_problem(p, SearchLimits(max_size=30, timeout=0.0))


def test_run_stats_lines_render():
    p = problem_of(grammar_of(BASE_OPS), [(5, 5)])
    lines = solve_problem(p).stats.lines()
    assert any(line.startswith("candidates:") for line in lines)
    assert any(line.startswith("solution size:") for line in lines)
