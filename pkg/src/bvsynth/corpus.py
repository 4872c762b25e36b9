"""Deterministic random benchmark generation.

Each instance samples a grammar-derivable target expression, evaluates it
on distinct random inputs, and writes a SyGuS v1 file whose constraints are
the resulting input/output pairs, so every instance is solvable by
construction.  The same spec always produces byte-identical files.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

from .enumeration import signature_of, size_splits
from .frontend import ConstTerminal, Grammar, OpRule, Production, VarTerminal
from .semantics import App, BitVecValue, Const, Expr, MAX_WIDTH, MIN_WIDTH, Var, expr_to_sexpr


def _uniform_grammar(width: int, ops: list[tuple[str, int]]) -> Grammar:
    prods: list[Production] = [
        VarTerminal("x"),
        ConstTerminal(BitVecValue(width, 0)),
        ConstTerminal(BitVecValue(width, 1)),
    ]
    for name, arity in ops:
        prods.append(OpRule(name, ("Start",) * arity))
    return Grammar(("Start",), {"Start": tuple(prods)}, "Start")


def _icfp_grammar(width: int) -> Grammar:
    return _uniform_grammar(
        width,
        [
            ("bvnot", 1),
            ("shl1", 1),
            ("shr1", 1),
            ("shr4", 1),
            ("shr16", 1),
            ("bvand", 2),
            ("bvor", 2),
            ("bvxor", 2),
            ("bvadd", 2),
            ("if0", 3),
        ],
    )


def _core_grammar(width: int) -> Grammar:
    return _uniform_grammar(
        width,
        [
            ("bvnot", 1),
            ("bvand", 2),
            ("bvor", 2),
            ("bvxor", 2),
            ("bvadd", 2),
            ("bvsub", 2),
            ("bvshl", 2),
            ("bvlshr", 2),
            ("bvashr", 2),
            ("if0", 3),
        ],
    )


GRAMMAR_TEMPLATES: dict[str, Callable[[int], Grammar]] = {
    "icfp": _icfp_grammar,
    "core": _core_grammar,
}


def template_grammar(name: str, width: int) -> Grammar:
    try:
        return GRAMMAR_TEMPLATES[name](width)
    except KeyError:
        raise ValueError(f"unknown grammar template {name!r}") from None


@dataclass(frozen=True)
class CorpusSpec:
    count: int
    size_min: int
    size_max: int
    examples: int
    width: int
    seed: int
    grammar: str = "icfp"

    def validate(self) -> None:
        if self.count < 0:
            raise ValueError("count must be non-negative")
        if not 1 <= self.size_min <= self.size_max:
            raise ValueError("need 1 <= size-min <= size-max")
        if self.examples < 1:
            raise ValueError("need at least one example per instance")
        if not MIN_WIDTH <= self.width <= MAX_WIDTH:
            raise ValueError(f"width must be within [{MIN_WIDTH}, {MAX_WIDTH}]")
        if 2**self.width < self.examples:
            raise ValueError("not enough distinct inputs at this width")


def derivable_size_table(
    grammar: Grammar, max_size: int, exclude: frozenset[str] = frozenset()
) -> dict[str, list[bool]]:
    """table[nt][s] is True when ``nt`` derives some expression of exactly size s."""
    table = {nt: [False] * (max_size + 1) for nt in grammar.nonterminals}
    for s in range(1, max_size + 1):
        for nt in grammar.nonterminals:
            for prod in grammar.productions[nt]:
                if isinstance(prod, (VarTerminal, ConstTerminal)):
                    if s == 1:
                        table[nt][s] = True
                        break
                elif prod.op not in exclude and s - 1 >= len(prod.operands):
                    if any(
                        all(table[o][p] for o, p in zip(prod.operands, split))
                        for split in size_splits(s - 1, len(prod.operands))
                    ):
                        table[nt][s] = True
                        break
    return table


def sample_expr(
    grammar: Grammar,
    rng: random.Random,
    size: int,
    exclude: frozenset[str] = frozenset(),
) -> Expr:
    """Sample a random expression of exactly ``size`` nodes from the grammar."""
    table = derivable_size_table(grammar, size, exclude)

    def sample(nt: str, s: int) -> Expr:
        options: list[tuple[Production, list[tuple[int, ...]]]] = []
        for prod in grammar.productions[nt]:
            if isinstance(prod, (VarTerminal, ConstTerminal)):
                if s == 1:
                    options.append((prod, []))
            elif prod.op not in exclude and s - 1 >= len(prod.operands):
                splits = [
                    split
                    for split in size_splits(s - 1, len(prod.operands))
                    if all(table[o][p] for o, p in zip(prod.operands, split))
                ]
                if splits:
                    options.append((prod, splits))
        if not options:
            raise ValueError(f"nonterminal {nt!r} derives nothing of size {s}")
        prod, splits = rng.choice(options)
        if isinstance(prod, VarTerminal):
            return Var(prod.name)
        if isinstance(prod, ConstTerminal):
            return Const(prod.value)
        split = rng.choice(splits)
        return App(prod.op, tuple(sample(o, p) for o, p in zip(prod.operands, split)))

    if not table[grammar.start][size]:
        raise ValueError(f"grammar derives nothing of size {size}")
    return sample(grammar.start, size)


def render_grammar_block(grammar: Grammar, width: int, indent: str = "    ") -> str:
    """The inline v1 grammar block of a synth-fun, one production per line."""

    def prod_text(prod: Production) -> str:
        if isinstance(prod, VarTerminal):
            return prod.name
        if isinstance(prod, ConstTerminal):
            return prod.value.literal()
        return "({} {})".format(prod.op, " ".join(prod.operands))

    nt_blocks = []
    for nt in grammar.nonterminals:
        lines = [f"{indent}({nt} (BitVec {width})"]
        body = [prod_text(p) for p in grammar.productions[nt]]
        lines.append(f"{indent}    (" + ("\n" + indent + "     ").join(body) + "))")
        nt_blocks.append("\n".join(lines))
    return "{}(\n".format(indent) + "\n".join(nt_blocks) + f"\n{indent})"


def render_instance(
    spec: CorpusSpec, grammar: Grammar, target: Expr, pairs: list[tuple[int, int]], index: int
) -> str:
    w = spec.width
    lines = [
        f"; instance {index:04d} (seed {spec.seed}, grammar {spec.grammar}, width {w})",
        f"; target ({target.size} nodes): {expr_to_sexpr(target)}",
        "(set-logic BV)",
        f"(synth-fun f ((x (BitVec {w}))) (BitVec {w})",
        render_grammar_block(grammar, w),
        ")",
    ]
    for value, output in pairs:
        in_lit = BitVecValue(w, value).literal()
        out_lit = BitVecValue(w, output).literal()
        lines.append(f"(constraint (= (f {in_lit}) {out_lit}))")
    lines.append("(check-synth)")
    return "\n".join(lines) + "\n"


def generate_corpus(spec: CorpusSpec, out_dir: Path) -> list[Path]:
    """Write ``spec.count`` instances into ``out_dir``; returns the file paths."""
    spec.validate()
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rng = random.Random(spec.seed)
    grammar = template_grammar(spec.grammar, spec.width)
    paths = []
    for i in range(spec.count):
        size = rng.randint(spec.size_min, spec.size_max)
        target = sample_expr(grammar, rng, size)
        inputs: list[int] = []
        seen: set[int] = set()
        while len(inputs) < spec.examples:
            v = rng.getrandbits(spec.width)
            if v not in seen:
                seen.add(v)
                inputs.append(v)
        outputs = signature_of(target, ("x",), [(v,) for v in inputs], spec.width)
        text = render_instance(spec, grammar, target, list(zip(inputs, outputs)), i)
        path = out_dir / f"instance_{i:04d}.sl"
        path.write_text(text, encoding="utf-8", newline="\n")
        paths.append(path)
    return paths
