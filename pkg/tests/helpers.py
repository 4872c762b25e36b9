"""Small builders shared across the test suite."""

from __future__ import annotations

from bvsynth.enumeration import EnumerationState
from bvsynth.frontend import ConstTerminal, Example, Grammar, OpRule, Problem, VarTerminal
from bvsynth.semantics import OPERATORS, BitVecValue
from bvsynth.solver import SearchLimits

LIMITS = SearchLimits()


def grammar_of(ops, width=64, consts=(0, 1), with_if0=True) -> Grammar:
    """Single-nonterminal grammar: x, the given constants, then ``ops`` in order."""
    prods = [VarTerminal("x")]
    prods += [ConstTerminal(BitVecValue(width, c)) for c in consts]
    for name in ops:
        prods.append(OpRule(name, ("Start",) * OPERATORS[name].arity))
    if with_if0 and "if0" not in ops:
        prods.append(OpRule("if0", ("Start", "Start", "Start")))
    return Grammar(("Start",), {"Start": tuple(prods)}, "Start")


def problem_of(grammar, pairs, width=64, name="f") -> Problem:
    examples = tuple(
        Example((BitVecValue(width, i),), BitVecValue(width, o), k)
        for k, (i, o) in enumerate(pairs)
    )
    return Problem(name=name, params=("x",), width=width, grammar=grammar, examples=examples)


def engine_for(problem, exclude=("if0",), deadline=None) -> EnumerationState:
    return EnumerationState.for_problem(
        problem, exclude_ops=frozenset(exclude), deadline=deadline
    )


def rows_of(problem) -> list[tuple[int, ...]]:
    return [tuple(v.bits for v in ex.inputs) for ex in problem.examples]
