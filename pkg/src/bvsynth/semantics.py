"""Fixed-width bitvector values, the expression AST, and the concrete evaluator.

Every operator is total on in-range inputs: results are reduced modulo
2**width, logical shifts by amounts >= width yield 0, and the arithmetic
shift fills with the sign bit.  ``if0`` selects its second operand exactly
when the condition value equals 1.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Iterator, Mapping, Union

from .errors import UnboundVariable, WidthMismatch

MIN_WIDTH = 1
MAX_WIDTH = 64


@dataclass(frozen=True)
class BitVecValue:
    """Unsigned bitvector; ``bits`` is kept reduced modulo 2**width."""

    width: int
    bits: int

    def __post_init__(self) -> None:
        if not MIN_WIDTH <= self.width <= MAX_WIDTH:
            raise ValueError(f"width must be within [{MIN_WIDTH}, {MAX_WIDTH}]: {self.width}")
        object.__setattr__(self, "bits", self.bits & ((1 << self.width) - 1))

    def literal(self) -> str:
        """SMT-LIB literal text; ``#b`` when the width is not a whole hex digit count."""
        if self.width % 4 == 0:
            return "#x{0:0{1}x}".format(self.bits, self.width // 4)
        return "#b{0:0{1}b}".format(self.bits, self.width)

    def __str__(self) -> str:
        return self.literal()


@dataclass(frozen=True)
class Operator:
    """A named total operation; ``bind(width)`` returns the int-level function."""

    name: str
    arity: int
    bind: Callable[[int], Callable[..., int]]


def _bvnot(width: int) -> Callable[..., int]:
    mask = (1 << width) - 1
    return lambda a: ~a & mask


def _bvand(width: int) -> Callable[..., int]:
    return lambda a, b: a & b


def _bvor(width: int) -> Callable[..., int]:
    return lambda a, b: a | b


def _bvxor(width: int) -> Callable[..., int]:
    return lambda a, b: a ^ b


def _bvadd(width: int) -> Callable[..., int]:
    mask = (1 << width) - 1
    return lambda a, b: (a + b) & mask


def _bvsub(width: int) -> Callable[..., int]:
    mask = (1 << width) - 1
    return lambda a, b: (a - b) & mask


def _bvshl(width: int) -> Callable[..., int]:
    mask = (1 << width) - 1
    return lambda a, b: (a << b) & mask if b < width else 0


def _bvlshr(width: int) -> Callable[..., int]:
    return lambda a, b: a >> b if b < width else 0


def _bvashr(width: int) -> Callable[..., int]:
    mask = (1 << width) - 1
    sign = 1 << (width - 1)
    top = width - 1

    def ashr(a: int, b: int) -> int:
        signed = a - (sign << 1) if a & sign else a
        return (signed >> (b if b < width else top)) & mask

    return ashr


def _shl1(width: int) -> Callable[..., int]:
    mask = (1 << width) - 1
    return lambda a: (a << 1) & mask


def _shr(amount: int) -> Callable[[int], Callable[..., int]]:
    def build(width: int) -> Callable[..., int]:
        return lambda a: a >> amount

    return build


def _if0(width: int) -> Callable[..., int]:
    # The then-branch is taken exactly when the condition equals 1.
    return lambda c, t, e: t if c == 1 else e


OPERATORS: dict[str, Operator] = {
    op.name: op
    for op in (
        Operator("bvnot", 1, _bvnot),
        Operator("bvand", 2, _bvand),
        Operator("bvor", 2, _bvor),
        Operator("bvxor", 2, _bvxor),
        Operator("bvadd", 2, _bvadd),
        Operator("bvsub", 2, _bvsub),
        Operator("bvshl", 2, _bvshl),
        Operator("bvlshr", 2, _bvlshr),
        Operator("bvashr", 2, _bvashr),
        Operator("shl1", 1, _shl1),
        Operator("shr1", 1, _shr(1)),
        Operator("shr4", 1, _shr(4)),
        Operator("shr16", 1, _shr(16)),
        Operator("if0", 3, _if0),
    )
}


@lru_cache(maxsize=None)
def bound_operators(width: int) -> dict[str, Callable[..., int]]:
    """Width-specialised implementations for every catalogue operator."""
    return {name: op.bind(width) for name, op in OPERATORS.items()}


@dataclass(frozen=True)
class Var:
    name: str
    size: int = field(default=1, init=False, compare=False)


@dataclass(frozen=True)
class Const:
    value: BitVecValue
    size: int = field(default=1, init=False, compare=False)


@dataclass(frozen=True)
class App:
    op: str
    args: "tuple[Expr, ...]"
    size: int = field(init=False, compare=False)

    def __post_init__(self) -> None:
        operator = OPERATORS.get(self.op)
        if operator is None:
            raise ValueError(f"unknown operator: {self.op}")
        if len(self.args) != operator.arity:
            raise ValueError(f"{self.op} expects {operator.arity} operands, got {len(self.args)}")
        object.__setattr__(self, "size", 1 + sum(a.size for a in self.args))


Expr = Union[Var, Const, App]


def app(op: str, *args: Expr) -> App:
    return App(op, tuple(args))


def const(width: int, bits: int) -> Const:
    return Const(BitVecValue(width, bits))


def subexpressions(expr: Expr) -> Iterator[Expr]:
    """Preorder traversal, the expression itself included."""
    yield expr
    if isinstance(expr, App):
        for arg in expr.args:
            yield from subexpressions(arg)


def contains_op(expr: Expr, name: str) -> bool:
    return any(isinstance(e, App) and e.op == name for e in subexpressions(expr))


def _infer_width(expr: Expr) -> int:
    first_var = None
    for e in subexpressions(expr):
        if isinstance(e, Const):
            return e.value.width
        if first_var is None and isinstance(e, Var):
            first_var = e.name
    # No constant anywhere means a variable occurs; with an empty
    # environment that variable is the actual problem.
    raise UnboundVariable(first_var or "?")


def eval_expr(expr: Expr, env: Mapping[str, BitVecValue], width: int | None = None) -> BitVecValue:
    """Evaluate ``expr`` under ``env``.  Deterministic; total on in-range inputs."""
    if width is None:
        widths = {v.width for v in env.values()}
        if len(widths) > 1:
            raise WidthMismatch(f"mixed widths in environment: {sorted(widths)}")
        width = widths.pop() if widths else _infer_width(expr)
    fns = bound_operators(width)

    def ev(e: Expr) -> int:
        if isinstance(e, Var):
            try:
                v = env[e.name]
            except KeyError:
                raise UnboundVariable(e.name) from None
            if v.width != width:
                raise WidthMismatch(f"variable {e.name} has width {v.width}, expected {width}")
            return v.bits
        if isinstance(e, Const):
            if e.value.width != width:
                raise WidthMismatch(f"constant {e.value} has width {e.value.width}, expected {width}")
            return e.value.bits
        return fns[e.op](*map(ev, e.args))

    return BitVecValue(width, ev(expr))


def expr_to_sexpr(expr: Expr) -> str:
    """Canonical S-expression text; round-trips through the frontend reader."""
    if isinstance(expr, Var):
        return expr.name
    if isinstance(expr, Const):
        return expr.value.literal()
    return "({} {})".format(expr.op, " ".join(expr_to_sexpr(a) for a in expr.args))
