"""Classical expression language.

Integers, floats and booleans with ``+ - * / % **``, comparisons, ``and``/``or``/
``not``, bit shifts and bitwise ``& | ^``. Integer ``/`` truncates toward zero.
Expressions can be written as Python-syntax strings and parsed with
:func:`parse_expr`; ``PI`` names the constant and ``len(qs)`` the length of a
qubit array.
"""

from __future__ import annotations

import ast
import math
import operator
from dataclasses import dataclass
from typing import Union

from ..errors import IRError, ParseError


@dataclass(frozen=True)
class Const:
    value: Union[int, float, bool]


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class UnOp:
    op: str
    operand: "Expr"


@dataclass(frozen=True)
class Len:
    """Length of a qubit-array variable."""

    name: str


@dataclass(frozen=True)
class Func:
    name: str
    args: tuple


Expr = Union[Const, Var, BinOp, UnOp, Len, Func]

ARITH_OPS = ("+", "-", "*", "/", "%", "**")
BIT_OPS = ("<<", ">>", "&", "|", "^")
CMP_OPS = ("==", "!=", "<", "<=", ">", ">=")
BOOL_OPS = ("and", "or")
BINARY_OPS = ARITH_OPS + BIT_OPS + CMP_OPS + BOOL_OPS
UNARY_OPS = ("-", "not")
FUNCS = {"sqrt": 1, "round": 1, "float": 1, "int": 1, "abs": 1}


def _div(a, b):
    if isinstance(a, int) and isinstance(b, int):
        q = abs(a) // abs(b)
        return q if (a >= 0) == (b >= 0) else -q
    return a / b


def _mod(a, b):
    if isinstance(a, int) and isinstance(b, int):
        return a - b * _div(a, b)
    return math.fmod(a, b)


def _pow(a, b):
    if isinstance(a, int) and isinstance(b, int) and b < 0:
        return float(a) ** b
    return a**b


_BIN_IMPL = {
    "+": operator.add,
    "-": operator.sub,
    "*": operator.mul,
    "/": _div,
    "%": _mod,
    "**": _pow,
    "<<": operator.lshift,
    ">>": operator.rshift,
    "&": operator.and_,
    "|": operator.or_,
    "^": operator.xor,
    "==": operator.eq,
    "!=": operator.ne,
    "<": operator.lt,
    "<=": operator.le,
    ">": operator.gt,
    ">=": operator.ge,
}

_FUNC_IMPL = {
    "sqrt": math.sqrt,
    "round": lambda x: int(round(x)),
    "float": float,
    "int": int,
    "abs": abs,
}


def compile_expr(expr: Expr):
    """Return a function ``env -> value``; unknown names raise ``KeyError``."""
    if isinstance(expr, Const):
        v = expr.value
        return lambda env: v
    if isinstance(expr, Var):
        name = expr.name
        return lambda env: env[name]
    if isinstance(expr, Len):
        name = expr.name
        return lambda env: len(env[name])
    if isinstance(expr, UnOp):
        inner = compile_expr(expr.operand)
        if expr.op == "-":
            return lambda env: -inner(env)
        return lambda env: not inner(env)
    if isinstance(expr, BinOp):
        left = compile_expr(expr.left)
        right = compile_expr(expr.right)
        if expr.op == "and":
            return lambda env: bool(left(env)) and bool(right(env))
        if expr.op == "or":
            return lambda env: bool(left(env)) or bool(right(env))
        fn = _BIN_IMPL[expr.op]
        return lambda env: fn(left(env), right(env))
    if isinstance(expr, Func):
        fn = _FUNC_IMPL[expr.name]
        args = [compile_expr(a) for a in expr.args]
        return lambda env: fn(*(a(env) for a in args))
    raise IRError(f"not an expression: {expr!r}")


def evaluate(expr: Expr, env: dict):
    return compile_expr(expr)(env)


def free_vars(expr: Expr) -> set:
    """Names read by ``expr`` (qubit arrays read through ``len`` included)."""
    if isinstance(expr, Var):
        return {expr.name}
    if isinstance(expr, Len):
        return {expr.name}
    if isinstance(expr, UnOp):
        return free_vars(expr.operand)
    if isinstance(expr, BinOp):
        return free_vars(expr.left) | free_vars(expr.right)
    if isinstance(expr, Func):
        out = set()
        for a in expr.args:
            out |= free_vars(a)
        return out
    return set()


def infer_type(expr: Expr, types: dict) -> str:
    """Static type ("int", "float" or "bool"); raises IRError on misuse."""
    if isinstance(expr, Const):
        if isinstance(expr.value, bool):
            return "bool"
        return "int" if isinstance(expr.value, int) else "float"
    if isinstance(expr, Var):
        if expr.name not in types:
            raise IRError(f"undefined name {expr.name!r}")
        t = types[expr.name]
        if t not in ("int", "float", "bool"):
            raise IRError(f"{expr.name!r} is not classical")
        return t
    if isinstance(expr, Len):
        if types.get(expr.name) != "qubits":
            raise IRError(f"len() of non-qubit-array {expr.name!r}")
        return "int"
    if isinstance(expr, UnOp):
        t = infer_type(expr.operand, types)
        if expr.op == "not":
            return "bool"
        if t == "bool":
            return "int"
        return t
    if isinstance(expr, BinOp):
        lt = infer_type(expr.left, types)
        rt = infer_type(expr.right, types)
        op = expr.op
        if op in CMP_OPS or op in BOOL_OPS:
            return "bool"
        if op in BIT_OPS:
            if "float" in (lt, rt):
                raise IRError(f"bit operator {op!r} on float")
            return "int"
        if "float" in (lt, rt):
            return "float"
        if op == "**" and isinstance(expr.right, UnOp):
            return "float"
        return "int"
    if isinstance(expr, Func):
        for a in expr.args:
            infer_type(a, types)
        return {"sqrt": "float", "round": "int", "float": "float", "int": "int"}.get(
            expr.name, infer_type(expr.args[0], types)
        )
    raise IRError(f"not an expression: {expr!r}")


# --- text form -------------------------------------------------------------

_AST_BIN = {
    ast.Add: "+",
    ast.Sub: "-",
    ast.Mult: "*",
    ast.Div: "/",
    ast.FloorDiv: "/",
    ast.Mod: "%",
    ast.Pow: "**",
    ast.LShift: "<<",
    ast.RShift: ">>",
    ast.BitAnd: "&",
    ast.BitOr: "|",
    ast.BitXor: "^",
}
_AST_CMP = {
    ast.Eq: "==",
    ast.NotEq: "!=",
    ast.Lt: "<",
    ast.LtE: "<=",
    ast.Gt: ">",
    ast.GtE: ">=",
}


def parse_expr(text: str) -> Expr:
    """Parse a Python-syntax expression string into an :data:`Expr`."""
    try:
        tree = ast.parse(text.strip(), mode="eval")
    except SyntaxError as exc:
        raise ParseError(f"bad expression {text!r}: {exc.msg}", exc.offset) from None
    return from_pyast(tree.body, text)


def from_pyast(node, text="") -> Expr:
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float, bool)):
        return Const(node.value)
    if isinstance(node, ast.Name):
        if node.id == "PI":
            return Const(math.pi)
        if node.id in ("True", "False"):
            return Const(node.id == "True")
        return Var(node.id)
    if isinstance(node, ast.UnaryOp):
        inner = from_pyast(node.operand, text)
        if isinstance(node.op, ast.USub):
            if isinstance(inner, Const) and not isinstance(inner.value, bool):
                return Const(-inner.value)
            return UnOp("-", inner)
        if isinstance(node.op, ast.Not):
            return UnOp("not", inner)
        if isinstance(node.op, ast.UAdd):
            return inner
    if isinstance(node, ast.BinOp) and type(node.op) in _AST_BIN:
        return BinOp(_AST_BIN[type(node.op)], from_pyast(node.left, text), from_pyast(node.right, text))
    if isinstance(node, ast.BoolOp):
        op = "and" if isinstance(node.op, ast.And) else "or"
        out = from_pyast(node.values[0], text)
        for v in node.values[1:]:
            out = BinOp(op, out, from_pyast(v, text))
        return out
    if isinstance(node, ast.Compare) and len(node.ops) == 1 and type(node.ops[0]) in _AST_CMP:
        return BinOp(_AST_CMP[type(node.ops[0])], from_pyast(node.left, text), from_pyast(node.comparators[0], text))
    if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and not node.keywords:
        name = node.func.id
        if name == "len" and len(node.args) == 1 and isinstance(node.args[0], ast.Name):
            return Len(node.args[0].id)
        if name in FUNCS and len(node.args) == FUNCS[name]:
            return Func(name, tuple(from_pyast(a, text) for a in node.args))
    raise ParseError(f"unsupported expression syntax in {text!r}", getattr(node, "col_offset", None))


def format_expr(expr: Expr) -> str:
    """Human-readable rendering (fully parenthesized for compound operands)."""
    if isinstance(expr, Const):
        if isinstance(expr.value, float) and expr.value == math.pi:
            return "PI"
        return repr(expr.value)
    if isinstance(expr, Var):
        return expr.name
    if isinstance(expr, Len):
        return f"len({expr.name})"
    if isinstance(expr, UnOp):
        inner = format_expr(expr.operand)
        if not isinstance(expr.operand, (Const, Var, Len, Func)):
            inner = f"({inner})"
        return f"-{inner}" if expr.op == "-" else f"not {inner}"
    if isinstance(expr, BinOp):
        parts = []
        for side in (expr.left, expr.right):
            s = format_expr(side)
            if isinstance(side, BinOp) or (isinstance(side, UnOp) and side.op == "not"):
                s = f"({s})"
            parts.append(s)
        return f"{parts[0]} {expr.op} {parts[1]}"
    if isinstance(expr, Func):
        return f"{expr.name}({', '.join(format_expr(a) for a in expr.args)})"
    raise IRError(f"not an expression: {expr!r}")


def as_expr(value) -> Expr:
    """Coerce a Python literal or expression string into an :data:`Expr`."""
    if isinstance(value, (Const, Var, BinOp, UnOp, Len, Func)):
        return value
    if isinstance(value, (bool, int, float)):
        return Const(value)
    if isinstance(value, str):
        return parse_expr(value)
    raise IRError(f"cannot use {value!r} as an expression")
