"""SyGuS-IF v1 subset frontend: reader, PBE detection, and solution printing.

Accepted commands: ``set-logic``, ``synth-fun`` with an inline v1 grammar,
``declare-var``, ``constraint``, ``check-synth``, plus ``define-fun`` forms
whose name is a catalogue operator (the usual spelling of the fixed shifts
and ``if0`` in benchmark files).  Both LF and CRLF line endings are fine;
``;`` starts a comment that runs to the end of the line.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Mapping, NamedTuple, Union

from .errors import (
    InconsistentExamples,
    MissingIf0Rule,
    NotPBE,
    SygusSyntaxError,
    UnboundVariable,
    UnsupportedArity,
)
from .semantics import (
    App,
    BitVecValue,
    Const,
    Expr,
    MAX_WIDTH,
    MIN_WIDTH,
    OPERATORS,
    Var,
    expr_to_sexpr,
    subexpressions,
)


# ---------------------------------------------------------------------------
# S-expression reader


@dataclass(frozen=True)
class Atom:
    text: str
    line: int
    col: int


class SList(list):
    """A parsed list node that remembers where its '(' was."""

    __slots__ = ("line", "col")

    def __init__(self, line: int = 0, col: int = 0):
        super().__init__()
        self.line = line
        self.col = col


SExpr = Union[Atom, SList]

_DELIMS = frozenset(" \t\r\n();")


def _tokens(text: str) -> Iterator[tuple[str, str, int, int]]:
    line, col = 1, 1
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
        elif ch in " \t\r":
            col += 1
            i += 1
        elif ch == ";":
            while i < n and text[i] != "\n":
                i += 1
        elif ch in "()":
            yield (ch, ch, line, col)
            col += 1
            i += 1
        else:
            start = i
            start_col = col
            while i < n and text[i] not in _DELIMS:
                i += 1
                col += 1
            yield ("atom", text[start:i], line, start_col)


def read_sexprs(text: str) -> list[SExpr]:
    """Parse a whole document into top-level S-expressions."""
    root = SList()
    stack: list[SList] = [root]
    for kind, tok, line, col in _tokens(text):
        if kind == "(":
            node = SList(line, col)
            stack[-1].append(node)
            stack.append(node)
        elif kind == ")":
            if len(stack) == 1:
                raise SygusSyntaxError("unbalanced ')'", line, col)
            stack.pop()
        else:
            stack[-1].append(Atom(tok, line, col))
    if len(stack) != 1:
        raise SygusSyntaxError("unclosed '('", stack[-1].line, stack[-1].col)
    return list(root)


def _pos(sx: SExpr) -> tuple[int | None, int | None]:
    if isinstance(sx, Atom):
        return sx.line, sx.col
    return sx.line, sx.col


def _head(sx: SExpr) -> str | None:
    if isinstance(sx, SList) and sx and isinstance(sx[0], Atom):
        return sx[0].text
    return None


def parse_literal(sx: SExpr, width: int) -> BitVecValue | None:
    """Parse a ``#x``/``#b`` literal; None when ``sx`` is not a literal at all."""
    if not isinstance(sx, Atom) or len(sx.text) < 2 or not sx.text.startswith("#"):
        return None
    body = sx.text[2:]
    if sx.text[1] in "xX":
        bits_per_digit, base = 4, 16
    elif sx.text[1] in "bB":
        bits_per_digit, base = 1, 2
    else:
        return None
    try:
        value = int(body, base)
    except ValueError:
        raise SygusSyntaxError(f"malformed literal {sx.text!r}", sx.line, sx.col) from None
    literal_width = len(body) * bits_per_digit
    if literal_width != width:
        raise SygusSyntaxError(
            f"literal {sx.text!r} has width {literal_width}, expected {width}", sx.line, sx.col
        )
    return BitVecValue(width, value)


# ---------------------------------------------------------------------------
# Problem model


@dataclass(frozen=True)
class VarTerminal:
    name: str


@dataclass(frozen=True)
class ConstTerminal:
    value: BitVecValue


@dataclass(frozen=True)
class OpRule:
    op: str
    operands: tuple[str, ...]


Production = Union[VarTerminal, ConstTerminal, OpRule]


@dataclass
class Grammar:
    nonterminals: tuple[str, ...]
    productions: dict[str, tuple[Production, ...]]
    start: str

    def has_if0(self) -> bool:
        return any(
            isinstance(p, OpRule) and p.op == "if0"
            for prods in self.productions.values()
            for p in prods
        )

    def first_if0(self) -> OpRule | None:
        for nt in self.nonterminals:
            for p in self.productions[nt]:
                if isinstance(p, OpRule) and p.op == "if0":
                    return p
        return None


@dataclass(frozen=True)
class Example:
    inputs: tuple[BitVecValue, ...]
    output: BitVecValue
    index: int


@dataclass(frozen=True)
class Problem:
    name: str
    params: tuple[str, ...]
    width: int
    grammar: Grammar
    examples: tuple[Example, ...]


# ---------------------------------------------------------------------------
# Parsing


def _parse_sort_width(sx: SExpr) -> int:
    if isinstance(sx, SList) and len(sx) == 3 and isinstance(sx[0], Atom) and sx[0].text == "_":
        raise SygusSyntaxError("SMT-LIB '(_ BitVec N)' sort is v2 syntax; use '(BitVec N)'", *_pos(sx))
    if (
        isinstance(sx, SList)
        and len(sx) == 2
        and isinstance(sx[0], Atom)
        and sx[0].text == "BitVec"
        and isinstance(sx[1], Atom)
        and sx[1].text.isdigit()
    ):
        width = int(sx[1].text)
        if not MIN_WIDTH <= width <= MAX_WIDTH:
            raise SygusSyntaxError(
                f"unsupported width {width}; must be within [{MIN_WIDTH}, {MAX_WIDTH}]", *_pos(sx)
            )
        return width
    raise SygusSyntaxError("expected sort '(BitVec N)'", *_pos(sx))


def _parse_params(sx: SExpr) -> list[tuple[str, int]]:
    if not isinstance(sx, SList):
        raise SygusSyntaxError("expected parameter list", *_pos(sx))
    params = []
    for item in sx:
        if not (isinstance(item, SList) and len(item) == 2 and isinstance(item[0], Atom)):
            raise SygusSyntaxError("expected '(name sort)' parameter", *_pos(item))
        params.append((item[0].text, _parse_sort_width(item[1])))
    return params


def _parse_grammar(block: SExpr, params: tuple[str, ...], width: int) -> Grammar:
    if not isinstance(block, SList) or not block:
        raise SygusSyntaxError("expected a non-empty grammar block", *_pos(block))
    names: list[str] = []
    bodies: list[SList] = []
    for nt_def in block:
        if not (
            isinstance(nt_def, SList)
            and len(nt_def) == 3
            and isinstance(nt_def[0], Atom)
            and isinstance(nt_def[2], SList)
        ):
            raise SygusSyntaxError("expected '(Name sort (productions...))'", *_pos(nt_def))
        if _parse_sort_width(nt_def[1]) != width:
            raise SygusSyntaxError(f"nonterminal sort must be (BitVec {width})", *_pos(nt_def[1]))
        if nt_def[0].text in names:
            raise SygusSyntaxError(f"duplicate nonterminal {nt_def[0].text!r}", *_pos(nt_def[0]))
        names.append(nt_def[0].text)
        bodies.append(nt_def[2])

    nts = set(names)
    param_set = set(params)
    productions: dict[str, tuple[Production, ...]] = {}
    for name, body in zip(names, bodies):
        prods: list[Production] = []
        for p in body:
            if isinstance(p, Atom):
                lit = parse_literal(p, width)
                if lit is not None:
                    prods.append(ConstTerminal(lit))
                elif p.text in param_set:
                    prods.append(VarTerminal(p.text))
                elif p.text in nts:
                    raise SygusSyntaxError(f"unit production {p.text!r} is not supported", p.line, p.col)
                else:
                    raise SygusSyntaxError(f"unknown grammar symbol {p.text!r}", p.line, p.col)
            else:
                op_name = _head(p)
                if op_name is None:
                    raise SygusSyntaxError("expected '(op Nonterminal...)'", *_pos(p))
                operator = OPERATORS.get(op_name)
                if operator is None:
                    raise SygusSyntaxError(f"unknown operator {op_name!r}", *_pos(p))
                if len(p) - 1 != operator.arity:
                    raise SygusSyntaxError(
                        f"{op_name} expects {operator.arity} operands, got {len(p) - 1}", *_pos(p)
                    )
                operands = []
                for o in p[1:]:
                    if not (isinstance(o, Atom) and o.text in nts):
                        raise SygusSyntaxError(
                            "production operands must be nonterminals", *_pos(o)
                        )
                    operands.append(o.text)
                prods.append(OpRule(op_name, tuple(operands)))
        if not prods:
            raise SygusSyntaxError(f"nonterminal {name!r} has no productions")
        productions[name] = tuple(prods)

    grammar = Grammar(tuple(names), productions, names[0])
    _check_productive(grammar)
    return grammar


def _check_productive(grammar: Grammar) -> None:
    productive: set[str] = set()
    changed = True
    while changed:
        changed = False
        for nt in grammar.nonterminals:
            if nt in productive:
                continue
            for prod in grammar.productions[nt]:
                if isinstance(prod, (VarTerminal, ConstTerminal)) or all(
                    o in productive for o in prod.operands
                ):
                    productive.add(nt)
                    changed = True
                    break
    vacuous = [nt for nt in grammar.nonterminals if nt not in productive]
    if vacuous:
        raise SygusSyntaxError(f"nonterminal {vacuous[0]!r} derives no finite expression")


def _parse_synth_fun(form: SList) -> tuple[str, tuple[str, ...], int, Grammar]:
    if len(form) == 6:
        raise SygusSyntaxError(
            "SyGuS v2 grammar syntax (separate nonterminal declaration list) is not supported",
            *_pos(form),
        )
    if len(form) != 5:
        raise SygusSyntaxError("expected '(synth-fun name (params) sort (grammar))'", *_pos(form))
    if not isinstance(form[1], Atom):
        raise SygusSyntaxError("expected function name", *_pos(form[1]))
    name = form[1].text
    params = _parse_params(form[2])
    if len(params) != 1:
        raise UnsupportedArity(f"synth-fun {name!r} must be unary, got {len(params)} parameters")
    ret_width = _parse_sort_width(form[3])
    for p_name, p_width in params:
        if p_width != ret_width:
            raise SygusSyntaxError(
                f"parameter {p_name!r} has width {p_width}, return sort has width {ret_width}"
            )
    param_names = tuple(p for p, _ in params)
    grammar = _parse_grammar(form[4], param_names, ret_width)
    return name, param_names, ret_width, grammar


def _check_define_fun(form: SList) -> None:
    # Benchmark files commonly define the fixed shifts and if0 as helper
    # functions; those names are already in the catalogue, so the body is
    # not interpreted.  Anything else has no semantics here.
    if len(form) != 5 or not isinstance(form[1], Atom):
        raise SygusSyntaxError("malformed define-fun", *_pos(form))
    name = form[1].text
    operator = OPERATORS.get(name)
    if operator is None:
        raise SygusSyntaxError(f"define-fun {name!r} is not a catalogue operator", *_pos(form[1]))
    if not isinstance(form[2], SList) or len(form[2]) != operator.arity:
        raise SygusSyntaxError(
            f"define-fun {name!r} must take {operator.arity} parameters", *_pos(form[2])
        )


def parse_problem(text: str) -> Problem:
    """Parse and validate one SyGuS problem document."""
    synth: SList | None = None
    constraints: list[SExpr] = []
    declared: dict[str, int] = {}
    for form in read_sexprs(text):
        head = _head(form)
        if head is None:
            raise SygusSyntaxError("expected a command", *_pos(form))
        if head == "set-logic":
            continue
        if head == "define-fun":
            _check_define_fun(form)
        elif head == "declare-var":
            if len(form) != 3 or not isinstance(form[1], Atom):
                raise SygusSyntaxError("expected '(declare-var name sort)'", *_pos(form))
            declared[form[1].text] = _parse_sort_width(form[2])
        elif head == "synth-fun":
            if synth is not None:
                raise SygusSyntaxError("multiple synth-fun forms", *_pos(form))
            synth = form
        elif head == "constraint":
            if len(form) != 2:
                raise SygusSyntaxError("expected '(constraint term)'", *_pos(form))
            constraints.append(form[1])
        elif head == "check-synth":
            continue
        else:
            raise SygusSyntaxError(f"unsupported command {head!r}", *_pos(form))

    if synth is None:
        raise SygusSyntaxError("missing synth-fun")
    name, params, width, grammar = _parse_synth_fun(synth)
    if not grammar.has_if0():
        raise MissingIf0Rule(f"grammar of {name!r} has no production named if0")
    for var, var_width in declared.items():
        if var_width != width:
            raise SygusSyntaxError(f"declared variable {var!r} has width {var_width}, expected {width}")

    examples = detect_pbe(constraints, fname=name, params=params, width=width, declared=declared)
    return Problem(name=name, params=params, width=width, grammar=grammar, examples=tuple(examples))


# ---------------------------------------------------------------------------
# PBE detection


def _app_args(sx: SExpr, fname: str) -> list[SExpr] | None:
    if isinstance(sx, SList) and sx and isinstance(sx[0], Atom) and sx[0].text == fname:
        return list(sx[1:])
    return None


def _direct_example(
    term: SExpr, fname: str, width: int
) -> tuple[list[BitVecValue], BitVecValue] | None:
    if not (isinstance(term, SList) and len(term) == 3 and _head(term) == "="):
        return None
    for call, lit in ((term[1], term[2]), (term[2], term[1])):
        args = _app_args(call, fname)
        if args is None:
            continue
        output = parse_literal(lit, width)
        if output is None:
            continue
        inputs = [parse_literal(a, width) for a in args]
        if any(v is None for v in inputs):
            return None
        return inputs, output  # type: ignore[return-value]
    return None


def _implication_example(
    term: SExpr, fname: str, width: int, declared: Mapping[str, int]
) -> tuple[list[BitVecValue], BitVecValue] | None:
    if not (isinstance(term, SList) and len(term) == 3 and _head(term) == "=>"):
        return None
    antecedent, consequent = term[1], term[2]
    equalities = list(antecedent[1:]) if _head(antecedent) == "and" else [antecedent]

    pinned: dict[str, BitVecValue] = {}
    out_var: str | None = None
    call_args: list[SExpr] | None = None
    for eq in equalities:
        if not (isinstance(eq, SList) and len(eq) == 3 and _head(eq) == "="):
            return None
        matched = False
        for var_side, other in ((eq[1], eq[2]), (eq[2], eq[1])):
            if not (isinstance(var_side, Atom) and var_side.text in declared):
                continue
            lit = parse_literal(other, width)
            if lit is not None:
                pinned[var_side.text] = lit
                matched = True
                break
            args = _app_args(other, fname)
            if args is not None:
                if out_var is not None:
                    return None
                out_var = var_side.text
                call_args = args
                matched = True
                break
        if not matched:
            return None
    if out_var is None or call_args is None:
        return None

    if not (isinstance(consequent, SList) and len(consequent) == 3 and _head(consequent) == "="):
        return None
    output: BitVecValue | None = None
    for var_side, other in ((consequent[1], consequent[2]), (consequent[2], consequent[1])):
        if isinstance(var_side, Atom) and var_side.text == out_var:
            output = parse_literal(other, width)
            break
    if output is None:
        return None

    inputs: list[BitVecValue] = []
    for a in call_args:
        lit = parse_literal(a, width)
        if lit is None:
            if isinstance(a, Atom) and a.text in pinned:
                lit = pinned[a.text]
            else:
                return None
        inputs.append(lit)
    return inputs, output


def detect_pbe(
    constraints: list[SExpr],
    *,
    fname: str,
    params: tuple[str, ...],
    width: int,
    declared: Mapping[str, int],
) -> list[Example]:
    """Map every constraint to a concrete input/output example, in file order."""
    if not constraints:
        raise NotPBE("not a PBE task: no constraints")
    examples: list[Example] = []
    seen: dict[tuple[int, ...], tuple[int, BitVecValue]] = {}
    for i, term in enumerate(constraints):
        parsed = _direct_example(term, fname, width) or _implication_example(
            term, fname, width, declared
        )
        if parsed is None:
            raise NotPBE(f"not a PBE task: constraint {i} is not an input/output example")
        inputs, output = parsed
        if len(inputs) != len(params):
            raise NotPBE(
                f"not a PBE task: constraint {i} applies {fname!r} to {len(inputs)} arguments"
            )
        key = tuple(v.bits for v in inputs)
        if key in seen and seen[key][1].bits != output.bits:
            raise InconsistentExamples(
                f"examples {seen[key][0]} and {i} share inputs but disagree on output"
            )
        seen.setdefault(key, (i, output))
        examples.append(Example(inputs=tuple(inputs), output=output, index=i))
    return examples


# ---------------------------------------------------------------------------
# Output


def emit_solution(problem: Problem, solution: Expr) -> str:
    """Render a solved problem as a single define-fun S-expression."""
    for e in _free_vars(solution):
        if e not in problem.params:
            raise UnboundVariable(e)
    params = " ".join(f"({p} (BitVec {problem.width}))" for p in problem.params)
    return "(define-fun {} ({}) (BitVec {}) {})".format(
        problem.name, params, problem.width, expr_to_sexpr(solution)
    )


def _free_vars(expr: Expr) -> set[str]:
    return {e.name for e in subexpressions(expr) if isinstance(e, Var)}


class ParsedSolution(NamedTuple):
    name: str
    params: tuple[str, ...]
    width: int
    body: Expr


def parse_term(sx: SExpr, params: tuple[str, ...], width: int) -> Expr:
    """Parse a ground term over the parameters and the operator catalogue."""
    if isinstance(sx, Atom):
        lit = parse_literal(sx, width)
        if lit is not None:
            return Const(lit)
        if sx.text in params:
            return Var(sx.text)
        raise SygusSyntaxError(f"unknown symbol {sx.text!r}", sx.line, sx.col)
    op_name = _head(sx)
    operator = OPERATORS.get(op_name) if op_name else None
    if operator is None:
        raise SygusSyntaxError(f"unknown operator {op_name!r}", *_pos(sx))
    if len(sx) - 1 != operator.arity:
        raise SygusSyntaxError(
            f"{op_name} expects {operator.arity} operands, got {len(sx) - 1}", *_pos(sx)
        )
    return App(op_name, tuple(parse_term(a, params, width) for a in sx[1:]))


def parse_solution(text: str) -> ParsedSolution:
    """Parse a define-fun produced by :func:`emit_solution`."""
    forms = read_sexprs(text)
    if len(forms) != 1 or _head(forms[0]) != "define-fun":
        raise SygusSyntaxError("expected a single define-fun")
    form = forms[0]
    if len(form) != 5 or not isinstance(form[1], Atom):
        raise SygusSyntaxError("malformed define-fun", *_pos(form))
    params = _parse_params(form[2])
    width = _parse_sort_width(form[3])
    for p_name, p_width in params:
        if p_width != width:
            raise SygusSyntaxError(f"parameter {p_name!r} width differs from return width")
    names = tuple(p for p, _ in params)
    body = parse_term(form[4], names, width)
    return ParsedSolution(form[1].text, names, width, body)
