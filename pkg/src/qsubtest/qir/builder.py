"""Programmatic builder with string shorthands.

Expressions are Python-syntax strings (``"PI / 2 ** k"``); qubit arguments
are ``"qs"`` (whole array), ``"qs[i]"``, ``"qs[a:b]"``, ``"qs[::-1]"`` or a
list of those (concatenation)::

    crk = subroutine(
        "CRk",
        [int_("k"), qubits("qctrl", 1), qubits("qtar", 1)],
        [
            assign("theta", "PI / 2 ** k"),
            controlled("qctrl", gate("R1", "qtar[0]", angle="theta")),
        ],
    )
"""

from __future__ import annotations

import ast

from ..errors import ParseError
from .analysis import validate
from .expr import as_expr, from_pyast
from .nodes import (
    Call,
    ClassicalAssign,
    ControlledApp,
    For,
    GateApp,
    HandleRef,
    If,
    MeasureInto,
    Param,
    QConcat,
    QRef,
    QSlice,
    RandomInt,
    RepeatUntil,
    SubRef,
    Subroutine,
    WithinApply,
)


def int_(name):
    return Param(name, "int")


def float_(name):
    return Param(name, "float")


def bool_(name):
    return Param(name, "bool")


def qubits(name, length=None):
    return Param(name, "qubits", as_expr(length) if length is not None else None)


def handle(name, signature=None):
    return Param(name, "handle", None, tuple(signature) if signature is not None else None)


def _qarg_node(node, text):
    if isinstance(node, ast.Name):
        return QSlice(node.id)
    if isinstance(node, ast.Subscript) and isinstance(node.value, ast.Name):
        name = node.value.id
        sl = node.slice
        if isinstance(sl, ast.Slice):
            if sl.step is not None:
                step = from_pyast(sl.step, text)
                if getattr(step, "value", None) != -1 or sl.lower is not None or sl.upper is not None:
                    raise ParseError(f"only [::-1] slices may have a step: {text!r}")
                return QSlice(name, reverse=True)
            lo = from_pyast(sl.lower, text) if sl.lower is not None else None
            hi = from_pyast(sl.upper, text) if sl.upper is not None else None
            return QSlice(name, lo, hi)
        return QRef(name, from_pyast(sl, text))
    if isinstance(node, (ast.List, ast.Tuple)):
        return QConcat(tuple(_qarg_node(e, text) for e in node.elts))
    raise ParseError(f"not a qubit argument: {text!r}")


def qarg(value):
    """Parse a qubit-argument shorthand (or pass through an existing node)."""
    if isinstance(value, (QRef, QSlice, QConcat)):
        return value
    if isinstance(value, (list, tuple)):
        return QConcat(tuple(qarg(v) for v in value))
    try:
        tree = ast.parse(value.strip(), mode="eval")
    except SyntaxError as exc:
        raise ParseError(f"bad qubit argument {value!r}", exc.offset) from None
    return _qarg_node(tree.body, value)


def qref(value):
    a = qarg(value)
    if not isinstance(a, QRef):
        raise ParseError(f"gate targets must be single qubits: {value!r}")
    return a


def gate(kind, *targets, angle=None):
    return GateApp(kind, tuple(qref(t) for t in targets), as_expr(angle) if angle is not None else None)


def controlled(controls, body, polarity=None):
    return ControlledApp(body, qarg(controls), as_expr(polarity) if polarity is not None else None)


def _arg_for(kind, value):
    if kind == "qubits":
        return qarg(value)
    if kind == "handle":
        if isinstance(value, Subroutine):
            return SubRef(value)
        if isinstance(value, (HandleRef, SubRef)):
            return value
        return HandleRef(value)
    return as_expr(value)


def call(callee, *args, bind=(), adjoint=False, signature=None):
    """Call a Subroutine or, when ``callee`` is a string, a handle parameter.

    Handle calls need ``signature`` (the handle's parameter kinds) to convert
    string arguments.
    """
    if isinstance(bind, str):
        bind = (bind,)
    if isinstance(callee, Subroutine):
        if len(args) != len(callee.params):
            raise ValueError(f"{callee.name} expects {len(callee.params)} arguments, got {len(args)}")
        conv = tuple(_arg_for(p.kind, a) for p, a in zip(callee.params, args))
        return Call(callee, conv, tuple(bind), adjoint)
    if signature is None:
        raise ValueError("handle calls need the handle's signature")
    conv = tuple(_arg_for(k, a) for k, a in zip(signature, args))
    return Call(HandleRef(callee), conv, tuple(bind), adjoint)


def measure(var, qubits_):
    return MeasureInto(var, qarg(qubits_))


def assign(var, expr):
    return ClassicalAssign(var, as_expr(expr))


def random_int(var, upper):
    return RandomInt(var, as_expr(upper))


def if_(cond, then, orelse=()):
    return If(as_expr(cond), tuple(then), tuple(orelse))


def for_(var, lower, upper, body, reverse=False):
    return For(var, as_expr(lower), as_expr(upper), tuple(body), reverse)


def repeat_until(body, cond, max_iter=1000):
    return RepeatUntil(tuple(body), as_expr(cond), max_iter)


def within_apply(within, apply):
    return WithinApply(tuple(within), tuple(apply))


def subroutine(name, params, body, returns=(), check=True):
    """Build a Subroutine; ``check`` runs the static well-formedness checks."""
    if isinstance(returns, str):
        returns = (returns,)
    sub = Subroutine(name, tuple(params), tuple(body), tuple(returns))
    if check:
        validate(sub)
    return sub
