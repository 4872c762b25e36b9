"""Two-phase unification: per-example terminal search, then an if0 decision tree.

Phase 1 maps every example to a branch-free (if0-free) expression that is
consistent with that example alone; one shared enumeration stream serves
all searches.  Phase 2 inserts examples into a decision tree in rank order,
enumerating a separating condition for each pair of conflicting examples.
Conditions are drawn from the first operand nonterminal of the grammar's
if0 production and are themselves if0-free.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterator, Union

from .errors import (
    Exhausted,
    GrammarViolation,
    MissingIf0Rule,
    NotFound,
    UnsolvableExample,
    UnunifiablePair,
)
from .enumeration import EnumerationState, signature_of
from .frontend import ConstTerminal, Example, Grammar, Problem, VarTerminal
from .semantics import App, Const, Expr, Var


@dataclass
class TerminalMap:
    """Per-example terminal assignments plus the distinct-expression registry."""

    assignment: dict[int, Expr] = field(default_factory=dict)
    registry: dict[Expr, set[int]] = field(default_factory=dict)

    def distinct(self) -> int:
        return len(self.registry)


@dataclass
class Leaf:
    expr: Expr
    bucket: set[int]


@dataclass
class Internal:
    condition: Expr
    then_child: "Tree"
    else_child: "Tree"


Tree = Union[Leaf, Internal]


def condition_nonterminal(grammar: Grammar) -> str:
    """Nonterminal conditions are enumerated from: the if0 rule's first operand."""
    rule = grammar.first_if0()
    if rule is None:
        raise MissingIf0Rule("grammar has no if0 production")
    return rule.operands[0]


def map_terminals(problem: Problem, engine: EnumerationState, limits) -> TerminalMap:
    """Assign a consistent terminal expression to every example.

    Examples are visited in index order; each found expression is also
    assigned to every other still-unmapped example it happens to satisfy.
    Enumeration resumes across searches instead of restarting.
    """
    outs = [ex.output.bits for ex in problem.examples]
    tmap = TerminalMap()
    for k in range(len(outs)):
        if k in tmap.assignment:
            continue
        target = outs[k]

        def accept(sig, _k=k, _t=target):
            return sig[_k] == _t

        try:
            expr, sig = engine.enumerate_until(
                accept, max_size=limits.max_size, max_candidates=limits.max_candidates
            )
        except (NotFound, Exhausted) as exc:
            raise UnsolvableExample(k, str(exc)) from exc
        bucket = tmap.registry.setdefault(expr, set())
        for j in range(len(outs)):
            if j not in tmap.assignment and sig[j] == outs[j]:
                tmap.assignment[j] = expr
                bucket.add(j)
    return tmap


def rank_examples(tmap: TerminalMap) -> list[int]:
    """Example indices sorted by ascending popularity of their assigned
    expression (unique expressions first), ties by ascending index."""
    popularity = {i: len(tmap.registry[e]) for i, e in tmap.assignment.items()}
    return sorted(tmap.assignment, key=lambda i: (popularity[i], i))


def find_condition(
    problem: Problem, engine: EnumerationState, a: int, b: int, limits
) -> tuple[Expr, int]:
    """Smallest condition that is non-constant over all example inputs and
    evaluates to 1 on exactly one of examples ``a`` and ``b``.

    Returns the condition and the index of the example whose inputs made it
    evaluate to 1; that example occupies the then-branch.
    """
    nt = condition_nonterminal(problem.grammar)

    def accept(sig):
        if (sig[a] == 1) == (sig[b] == 1):
            return False
        first = sig[0]
        return any(v != first for v in sig)

    try:
        expr, sig = engine.enumerate_until(
            accept, max_size=limits.max_size, max_candidates=limits.max_candidates, nt=nt
        )
    except (NotFound, Exhausted) as exc:
        raise UnunifiablePair(a, b, str(exc)) from exc
    return expr, (a if sig[a] == 1 else b)


def _value_on(problem: Problem, expr: Expr, example: Example) -> int:
    row = tuple(v.bits for v in example.inputs)
    return signature_of(expr, problem.params, [row], problem.width)[0]


def route(problem: Problem, tree: Tree, example: Example) -> tuple[Leaf, tuple[bool, ...]]:
    """Follow the tree for one example.  Path entries are True for then-branches."""
    node = tree
    path: list[bool] = []
    while isinstance(node, Internal):
        taken = _value_on(problem, node.condition, example) == 1
        path.append(taken)
        node = node.then_child if taken else node.else_child
    return node, tuple(path)


def insert_example(
    problem: Problem,
    engine: EnumerationState,
    tmap: TerminalMap,
    limits,
    tree: Tree,
    index: int,
) -> Tree:
    """Insert one example, preserving routing soundness for every bucket.

    An example landing on a leaf with its own terminal expression just joins
    the bucket (lazy expansion).  Otherwise the leaf is split on a condition
    separating the example from the leaf's lowest-index representative; any
    bucket member the new condition routes away is re-inserted.
    """
    work: deque[tuple[int, Expr]] = deque([(index, tmap.assignment[index])])
    while work:
        i, expr_i = work.popleft()
        tree = _insert_one(problem, engine, tmap, limits, tree, i, expr_i, work)
    return tree


def _insert_one(
    problem: Problem,
    engine: EnumerationState,
    tmap: TerminalMap,
    limits,
    node: Tree,
    i: int,
    expr_i: Expr,
    work: deque,
) -> Tree:
    if isinstance(node, Internal):
        if _value_on(problem, node.condition, problem.examples[i]) == 1:
            node.then_child = _insert_one(
                problem, engine, tmap, limits, node.then_child, i, expr_i, work
            )
        else:
            node.else_child = _insert_one(
                problem, engine, tmap, limits, node.else_child, i, expr_i, work
            )
        return node

    if node.expr == expr_i:
        node.bucket.add(i)
        return node

    representative = min(node.bucket)
    condition, then_index = find_condition(problem, engine, i, representative, limits)
    incoming = Leaf(expr_i, {i})
    if then_index == i:
        replacement = Internal(condition, incoming, node)
        old_on_then = False
    else:
        replacement = Internal(condition, node, incoming)
        old_on_then = True
    # The pairwise condition constrains only the representative; any other
    # bucket member it routes to the incoming side must be re-inserted to
    # keep every bucket sound under route().
    displaced = [
        m
        for m in sorted(node.bucket)
        if m != representative
        and (_value_on(problem, condition, problem.examples[m]) == 1) != old_on_then
    ]
    for m in displaced:
        node.bucket.discard(m)
        work.append((m, node.expr))
    return replacement


def build_tree(problem: Problem, engine: EnumerationState, tmap: TerminalMap, limits) -> Tree:
    """Unify a terminal map with at least two distinct expressions."""
    if tmap.distinct() < 2:
        raise ValueError("build_tree needs at least two distinct terminal expressions")
    order = rank_examples(tmap)
    first = order[0]
    second = next(j for j in order if tmap.assignment[j] != tmap.assignment[first])
    condition, then_index = find_condition(problem, engine, first, second, limits)
    leaf_first = Leaf(tmap.assignment[first], {first})
    leaf_second = Leaf(tmap.assignment[second], {second})
    if then_index == first:
        tree: Tree = Internal(condition, leaf_first, leaf_second)
    else:
        tree = Internal(condition, leaf_second, leaf_first)
    for index in order:
        if index == first or index == second:
            continue
        tree = insert_example(problem, engine, tmap, limits, tree, index)
    return tree


def tree_to_expr(tree: Tree, grammar: Grammar) -> Expr:
    """Materialise the tree as nested if0 applications; must stay in-grammar."""

    def compose(node: Tree) -> Expr:
        if isinstance(node, Leaf):
            return node.expr
        return App("if0", (node.condition, compose(node.then_child), compose(node.else_child)))

    expr = compose(tree)
    if not derives(grammar, grammar.start, expr):
        raise GrammarViolation("assembled solution is not derivable from the grammar")
    return expr


def derives(grammar: Grammar, nt: str, expr: Expr, _memo: dict | None = None) -> bool:
    """Whether ``nt`` derives ``expr`` under the grammar."""
    if _memo is None:
        _memo = {}
    key = (nt, expr)
    cached = _memo.get(key)
    if cached is not None:
        return cached
    result = False
    for prod in grammar.productions[nt]:
        if isinstance(prod, VarTerminal):
            if isinstance(expr, Var) and expr.name == prod.name:
                result = True
                break
        elif isinstance(prod, ConstTerminal):
            if isinstance(expr, Const) and expr.value == prod.value:
                result = True
                break
        else:
            if (
                isinstance(expr, App)
                and expr.op == prod.op
                and len(expr.args) == len(prod.operands)
                and all(
                    derives(grammar, o, a, _memo) for o, a in zip(prod.operands, expr.args)
                )
            ):
                result = True
                break
    _memo[key] = result
    return result


def internal_node_count(tree: Tree) -> int:
    if isinstance(tree, Leaf):
        return 0
    return 1 + internal_node_count(tree.then_child) + internal_node_count(tree.else_child)


def iter_leaves(tree: Tree) -> Iterator[Leaf]:
    if isinstance(tree, Leaf):
        yield tree
    else:
        yield from iter_leaves(tree.then_child)
        yield from iter_leaves(tree.else_child)


def iter_conditions(tree: Tree) -> Iterator[Expr]:
    if isinstance(tree, Internal):
        yield tree.condition
        yield from iter_conditions(tree.then_child)
        yield from iter_conditions(tree.else_child)
