"""Symbolic scalar fields: parsing, printing, evaluation and exact derivatives.

Grammar::

    expr     := term (('+'|'-') term)*
    term     := factor (('*'|'/') factor)*
    factor   := base ('^' exponent)?
    base     := number | variable | '(' expr ')' | func '(' expr ')' | '-' base
    func     := exp | log | sin | cos
    exponent := ['-'] integer

Note that unary minus is a ``base``, so ``-x^2`` means ``(-x)^2``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Mapping, Sequence, Union

import numpy as np

__all__ = [
    "ExpressionError",
    "Node",
    "Const",
    "Var",
    "Neg",
    "Add",
    "Sub",
    "Mul",
    "Div",
    "Pow",
    "Func",
    "ScalarField",
    "parse_expression",
    "differentiate",
]

FUNCTIONS = ("exp", "log", "sin", "cos")
DEFAULT_VARIABLES = ("x", "t")


class ExpressionError(ValueError):
    """Malformed expression text; ``offset`` is the 0-based character index."""

    def __init__(self, message: str, offset: int | None = None):
        self.offset = offset
        if offset is not None:
            message = f"{message} at offset {offset}"
        super().__init__(message)


# --------------------------------------------------------------------------- AST


@dataclass(frozen=True)
class Const:
    value: float


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Neg:
    arg: "Node"


@dataclass(frozen=True)
class Add:
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Sub:
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Mul:
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Div:
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Pow:
    base: "Node"
    exponent: int


@dataclass(frozen=True)
class Func:
    name: str
    arg: "Node"


Node = Union[Const, Var, Neg, Add, Sub, Mul, Div, Pow, Func]

ZERO = Const(0.0)
ONE = Const(1.0)


# ------------------------------------------------------------------------ parser

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*/^()]))"
)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            bad = pos + (len(text[pos:]) - len(text[pos:].lstrip()))
            raise ExpressionError(f"unexpected character {text[bad]!r}", bad)
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append((kind, m.group(kind), start))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, variables: Sequence[str]):
        self.tokens = _tokenize(text)
        self.i = 0
        self.variables = tuple(variables)

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value: str):
        kind, val, pos = self.take()
        if val != value or kind == "end":
            what = "end of input" if kind == "end" else repr(val)
            raise ExpressionError(f"expected {value!r}, found {what}", pos)

    def parse(self) -> Node:
        node = self.expr()
        kind, val, pos = self.peek()
        if kind != "end":
            raise ExpressionError(f"unexpected token {val!r}", pos)
        return node

    def expr(self) -> Node:
        node = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            rhs = self.term()
            node = Add(node, rhs) if op == "+" else Sub(node, rhs)
        return node

    def term(self) -> Node:
        node = self.factor()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.take()[1]
            rhs = self.factor()
            node = Mul(node, rhs) if op == "*" else Div(node, rhs)
        return node

    def factor(self) -> Node:
        node = self.base()
        if self.peek()[1] == "^" and self.peek()[0] == "op":
            self.take()
            sign = 1
            if self.peek()[1] == "-" and self.peek()[0] == "op":
                self.take()
                sign = -1
            kind, val, pos = self.take()
            if kind != "num" or not val.isdigit():
                what = "end of input" if kind == "end" else repr(val)
                raise ExpressionError(f"exponent must be an integer literal, found {what}", pos)
            node = Pow(node, sign * int(val))
        return node

    def base(self) -> Node:
        kind, val, pos = self.take()
        if kind == "num":
            return Const(float(val))
        if kind == "name":
            if val in FUNCTIONS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Func(val, arg)
            if val in self.variables:
                return Var(val)
            raise ExpressionError(f"unknown identifier {val!r}", pos)
        if kind == "op" and val == "(":
            node = self.expr()
            self.expect(")")
            return node
        if kind == "op" and val == "-":
            arg = self.base()
            if isinstance(arg, Const):
                return Const(-arg.value)
            return Neg(arg)
        what = "end of input" if kind == "end" else repr(val)
        raise ExpressionError(f"unexpected {what}", pos)


def parse_expression(text: str, variables: Sequence[str] = DEFAULT_VARIABLES) -> "ScalarField":
    """Parse ``text`` into a :class:`ScalarField` over ``variables``."""
    node = _Parser(text, variables).parse()
    return ScalarField(node, tuple(variables))


# ----------------------------------------------------------------------- printer

_PREC = {Add: 1, Sub: 1, Mul: 2, Div: 2}


def _fmt_number(v: float) -> str:
    s = repr(float(v))
    if s in ("inf", "-inf", "nan"):
        raise ExpressionError(f"cannot print non-finite constant {s}")
    if float(v).is_integer() and abs(v) < 1e15:
        return str(int(v))
    return s


def to_text(node: Node) -> str:
    """Print ``node`` so that parsing the result gives back the same tree."""
    return _print(node, 0)


def _print(node: Node, prec: int) -> str:
    if isinstance(node, Const):
        s = _fmt_number(node.value)
        # a bare negative literal is only a valid base when parenthesised
        return f"({s})" if node.value < 0 or s.startswith("-") else s
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Func):
        return f"{node.name}({_print(node.arg, 0)})"
    if isinstance(node, Neg):
        inner = _print(node.arg, 4)
        return f"-({inner})" if isinstance(node.arg, Pow) else "-" + inner
    if isinstance(node, Pow):
        b = node.base
        inner = _print(b, 4)
        if isinstance(b, Neg):
            inner = f"({inner})"
        return f"{inner}^{node.exponent}"
    p = _PREC[type(node)]
    sym = {Add: "+", Sub: "-", Mul: "*", Div: "/"}[type(node)]
    # left-associative: the right operand at equal precedence needs parentheses
    s = f"{_print(node.left, p)}{sym}{_print(node.right, p + 1)}"
    return f"({s})" if p < prec else s


# -------------------------------------------------------------------- evaluation

_NP_FUNCS = {"exp": np.exp, "log": np.log, "sin": np.sin, "cos": np.cos}


def _eval(node: Node, env: Mapping[str, object]):
    if isinstance(node, Const):
        return node.value
    if isinstance(node, Var):
        return env[node.name]
    if isinstance(node, Add):
        return _eval(node.left, env) + _eval(node.right, env)
    if isinstance(node, Sub):
        return _eval(node.left, env) - _eval(node.right, env)
    if isinstance(node, Mul):
        return _eval(node.left, env) * _eval(node.right, env)
    if isinstance(node, Div):
        return _eval(node.left, env) / _eval(node.right, env)
    if isinstance(node, Neg):
        return -_eval(node.arg, env)
    if isinstance(node, Pow):
        b = _eval(node.base, env)
        if node.exponent < 0:
            return 1.0 / (b ** (-node.exponent))
        return b ** node.exponent
    if isinstance(node, Func):
        return _NP_FUNCS[node.name](_eval(node.arg, env))
    raise TypeError(f"not an expression node: {node!r}")


# ----------------------------------------------------------------- differentiate


def _is_const(n: Node, v: float | None = None) -> bool:
    return isinstance(n, Const) and (v is None or n.value == v)


def _add(a: Node, b: Node) -> Node:
    if _is_const(a) and _is_const(b):
        return Const(a.value + b.value)
    if _is_const(a, 0.0):
        return b
    if _is_const(b, 0.0):
        return a
    if isinstance(b, Neg):
        return _sub(a, b.arg)
    return Add(a, b)


def _sub(a: Node, b: Node) -> Node:
    if _is_const(a) and _is_const(b):
        return Const(a.value - b.value)
    if _is_const(b, 0.0):
        return a
    if _is_const(a, 0.0):
        return _neg(b)
    return Sub(a, b)


def _neg(a: Node) -> Node:
    if isinstance(a, Const):
        return Const(-a.value)
    if isinstance(a, Neg):
        return a.arg
    return Neg(a)


def _mul(a: Node, b: Node) -> Node:
    if _is_const(a) and _is_const(b):
        return Const(a.value * b.value)
    if _is_const(a, 0.0) or _is_const(b, 0.0):
        return ZERO
    if _is_const(a, 1.0):
        return b
    if _is_const(b, 1.0):
        return a
    if _is_const(a, -1.0):
        return _neg(b)
    if _is_const(b, -1.0):
        return _neg(a)
    return Mul(a, b)


def _div(a: Node, b: Node) -> Node:
    if _is_const(a, 0.0):
        return ZERO
    if _is_const(b, 1.0):
        return a
    if _is_const(a) and _is_const(b) and b.value != 0.0:
        return Const(a.value / b.value)
    return Div(a, b)


def _pow(a: Node, n: int) -> Node:
    if n == 0:
        return ONE
    if n == 1:
        return a
    if isinstance(a, Const):
        return Const(a.value**n)
    return Pow(a, n)


def _d(node: Node, var: str) -> Node:
    if isinstance(node, Const):
        return ZERO
    if isinstance(node, Var):
        return ONE if node.name == var else ZERO
    if isinstance(node, Neg):
        return _neg(_d(node.arg, var))
    if isinstance(node, Add):
        return _add(_d(node.left, var), _d(node.right, var))
    if isinstance(node, Sub):
        return _sub(_d(node.left, var), _d(node.right, var))
    if isinstance(node, Mul):
        f, g = node.left, node.right
        return _add(_mul(_d(f, var), g), _mul(f, _d(g, var)))
    if isinstance(node, Div):
        f, g = node.left, node.right
        df, dg = _d(f, var), _d(g, var)
        if _is_const(dg, 0.0):
            return _div(df, g)
        return _div(_sub(_mul(df, g), _mul(f, dg)), _pow(g, 2))
    if isinstance(node, Pow):
        n = node.exponent
        return _mul(_mul(Const(float(n)), _pow(node.base, n - 1)), _d(node.base, var))
    if isinstance(node, Func):
        inner = _d(node.arg, var)
        if _is_const(inner, 0.0):
            return ZERO
        outer = {
            "exp": lambda a: Func("exp", a),
            "log": lambda a: _div(ONE, a),
            "sin": lambda a: Func("cos", a),
            "cos": lambda a: _neg(Func("sin", a)),
        }[node.name](node.arg)
        return _mul(outer, inner)
    raise TypeError(f"not an expression node: {node!r}")


def _fold(node: Node) -> Node:
    """Constant folding only; no algebraic rewriting."""
    if isinstance(node, (Const, Var)):
        return node
    if isinstance(node, Neg):
        return _neg(_fold(node.arg))
    if isinstance(node, Pow):
        return _pow(_fold(node.base), node.exponent)
    if isinstance(node, Func):
        a = _fold(node.arg)
        if isinstance(a, Const):
            return Const(float(_NP_FUNCS[node.name](a.value)))
        return Func(node.name, a)
    op = {Add: _add, Sub: _sub, Mul: _mul, Div: _div}[type(node)]
    return op(_fold(node.left), _fold(node.right))


def _variables_in(node: Node, acc: set[str]) -> set[str]:
    if isinstance(node, Var):
        acc.add(node.name)
    elif isinstance(node, (Neg, Func)):
        _variables_in(node.arg, acc)
    elif isinstance(node, Pow):
        _variables_in(node.base, acc)
    elif not isinstance(node, Const):
        _variables_in(node.left, acc)
        _variables_in(node.right, acc)
    return acc


# ------------------------------------------------------------------- ScalarField


@dataclass(frozen=True)
class ScalarField:
    """An immutable expression tree over a fixed, ordered tuple of variables.

    Calling the field evaluates it; positional arguments follow ``variables``
    and may be numpy arrays (broadcast together).
    """

    ast: Node
    variables: tuple[str, ...] = DEFAULT_VARIABLES

    @property
    def arity(self) -> int:
        return len(self.variables)

    @property
    def free_variables(self) -> frozenset[str]:
        return frozenset(_variables_in(self.ast, set()))

    def __call__(self, *args, **kwargs):
        env = dict(zip(self.variables, args))
        env.update(kwargs)
        missing = self.free_variables - env.keys()
        if missing:
            raise TypeError(f"missing values for {sorted(missing)}")
        value = _eval(self.ast, env)
        if np.isscalar(value) and not any(isinstance(v, np.ndarray) for v in env.values()):
            return float(value)
        shape = np.broadcast(*[np.asarray(v) for v in env.values()]).shape if env else ()
        return np.broadcast_to(np.asarray(value, dtype=float), shape).copy()

    def diff(self, var: str) -> "ScalarField":
        return differentiate(self, var)

    def gradient(self) -> tuple["ScalarField", ...]:
        return tuple(self.diff(v) for v in self.variables)

    def hessian(self) -> tuple[tuple["ScalarField", ...], ...]:
        return tuple(tuple(g.diff(v) for v in self.variables) for g in self.gradient())

    def substitute(self, **repl: "ScalarField | Node") -> "ScalarField":
        mapping = {k: (v.ast if isinstance(v, ScalarField) else v) for k, v in repl.items()}
        return ScalarField(_substitute(self.ast, mapping), self.variables)

    def with_variables(self, variables: Sequence[str]) -> "ScalarField":
        return ScalarField(self.ast, tuple(variables))

    def __str__(self) -> str:
        return to_text(self.ast)


def _substitute(node: Node, mapping: Mapping[str, Node]) -> Node:
    if isinstance(node, Var):
        return mapping.get(node.name, node)
    if isinstance(node, Const):
        return node
    if isinstance(node, Neg):
        return Neg(_substitute(node.arg, mapping))
    if isinstance(node, Func):
        return Func(node.name, _substitute(node.arg, mapping))
    if isinstance(node, Pow):
        return Pow(_substitute(node.base, mapping), node.exponent)
    return type(node)(_substitute(node.left, mapping), _substitute(node.right, mapping))


def differentiate(f: ScalarField, var: str) -> ScalarField:
    """Exact symbolic partial derivative of ``f`` with respect to ``var``."""
    if var not in f.variables:
        raise ValueError(f"{var!r} is not a variable of this field {f.variables}")
    return ScalarField(_fold(_d(f.ast, var)), f.variables)


def const(value: float, variables: Sequence[str] = DEFAULT_VARIABLES) -> ScalarField:
    return ScalarField(Const(float(value)), tuple(variables))
