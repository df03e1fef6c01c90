"""Static analyses: adjointability, well-formedness, traversal helpers."""

from __future__ import annotations

from ..errors import IRError
from ..simcore.gates import GATE_INFO
from .expr import Const, UnOp, free_vars, infer_type
from .nodes import (
    CLASSICAL_KINDS,
    Call,
    ClassicalAssign,
    ControlledApp,
    For,
    GateApp,
    HandleRef,
    If,
    MeasureInto,
    QConcat,
    QRef,
    QSlice,
    RandomInt,
    RepeatUntil,
    SubRef,
    Subroutine,
    WithinApply,
    child_blocks,
)


def walk(body, path=()):
    """Yield ``(path, statement)`` for every statement, depth first, in order."""
    for i, stmt in enumerate(body):
        p = path + (i,)
        yield p, stmt
        if isinstance(stmt, ControlledApp):
            continue
        for fname, block in child_blocks(stmt):
            yield from walk(block, p + (fname,))


def innermost(stmt):
    """The gate or call wrapped by (possibly nested) ControlledApp statements."""
    while isinstance(stmt, ControlledApp):
        stmt = stmt.body
    return stmt


def static_callees(sub: Subroutine):
    """Subroutines referenced directly by ``sub`` (calls and handle arguments)."""
    seen = []
    for _, stmt in walk(sub.body):
        stmt = innermost(stmt)
        if isinstance(stmt, Call):
            if isinstance(stmt.callee, Subroutine):
                seen.append(stmt.callee)
            for a in stmt.args:
                if isinstance(a, SubRef):
                    seen.append(a.sub)
    out = []
    ids = set()
    for s in seen:
        if id(s) not in ids:
            ids.add(id(s))
            out.append(s)
    return out


def closure(sub: Subroutine):
    """All subroutines reachable from ``sub``, dependencies before dependents."""
    order = []
    done = set()
    active = set()

    def visit(s):
        if id(s) in done:
            return
        if id(s) in active:
            raise IRError(f"recursive call cycle through {s.name!r}")
        active.add(id(s))
        for c in static_callees(s):
            visit(c)
        active.discard(id(s))
        done.add(id(s))
        order.append(s)

    visit(sub)
    return order


def measurement_sites(sub: Subroutine, _seen=None):
    """Paths of reachable measurements/random draws, as ``(sub name, path)`` pairs."""
    _seen = set() if _seen is None else _seen
    if id(sub) in _seen:
        return []
    _seen.add(id(sub))
    out = []
    for path, stmt in walk(sub.body):
        if isinstance(stmt, (MeasureInto, RandomInt)):
            out.append((sub.name, path))
        inner = innermost(stmt)
        if isinstance(inner, Call) and isinstance(inner.callee, Subroutine):
            out.extend(measurement_sites(inner.callee, _seen))
    return out


def _assigned_names(body):
    names = []
    for _, stmt in walk(body):
        if isinstance(stmt, (ClassicalAssign, RandomInt, MeasureInto)):
            names.append(stmt.var)
        elif isinstance(stmt, Call):
            names.extend(stmt.bind)
    return names


def adjointable(sub: Subroutine) -> bool:
    """True iff the body is measurement-free, deterministic and reversible.

    Classical assignments must be single-assignment so they can be hoisted
    ahead of the reversed quantum statements.
    """
    for _, stmt in walk(sub.body):
        if isinstance(stmt, (MeasureInto, RandomInt, RepeatUntil)):
            return False
        inner = innermost(stmt)
        if isinstance(inner, Call):
            if inner.bind:
                return False
            if isinstance(inner.callee, Subroutine) and not inner.callee.is_adjointable:
                return False
    names = _assigned_names(sub.body)
    if len(names) != len(set(names)):
        return False
    loop_vars = [s.var for _, s in walk(sub.body) if isinstance(s, For)]
    params = set(sub.param_names)
    if set(names) & (set(loop_vars) | params):
        return False
    return True


# --- well-formedness ----------------------------------------------------------


def _check_int(expr, types, what):
    t = infer_type(expr, types)
    if t not in ("int",):
        raise IRError(f"{what} must be an integer expression, got {t}")


def _check_qarg(arg, types):
    if isinstance(arg, QRef):
        if types.get(arg.array) != "qubits":
            raise IRError(f"{arg.array!r} is not a qubit array")
        _check_int(arg.index, types, "qubit index")
    elif isinstance(arg, QSlice):
        if types.get(arg.array) != "qubits":
            raise IRError(f"{arg.array!r} is not a qubit array")
        for e in (arg.start, arg.stop):
            if e is not None:
                _check_int(e, types, "slice bound")
    elif isinstance(arg, QConcat):
        for p in arg.parts:
            _check_qarg(p, types)
    else:
        raise IRError(f"expected a qubit argument, got {arg!r}")


def _check_call(stmt: Call, types):
    if isinstance(stmt.callee, HandleRef):
        if types.get(stmt.callee.name) != "handle":
            raise IRError(f"{stmt.callee.name!r} is not a subroutine handle")
        sig = types.get(("sig", stmt.callee.name))
        kinds = [_arg_kind(a, types) for a in stmt.args]
        if sig is not None and kinds != [_loose(k) for k in sig]:
            raise IRError(f"handle {stmt.callee.name!r} called with {kinds}, signature {sig}")
        if stmt.bind:
            raise IRError("results of handle calls cannot be bound")
        return
    callee = stmt.callee
    if len(stmt.args) != len(callee.params):
        raise IRError(f"{callee.name} expects {len(callee.params)} arguments, got {len(stmt.args)}")
    for a, p in zip(stmt.args, callee.params):
        kind = _arg_kind(a, types)
        if kind != _loose(p.kind):
            raise IRError(f"argument for {callee.name}.{p.name} should be {p.kind}, got {kind}")
        if kind == "classical":
            t = infer_type(a, types)
            if p.kind == "int" and t != "int":
                raise IRError(f"argument for {callee.name}.{p.name} must be int")
    if len(stmt.bind) > len(callee.returns):
        raise IRError(f"{callee.name} returns {len(callee.returns)} values")


def _loose(kind):
    return "classical" if kind in CLASSICAL_KINDS else kind


def _arg_kind(arg, types):
    if isinstance(arg, (QRef, QSlice, QConcat)):
        _check_qarg(arg, types)
        return "qubits"
    if isinstance(arg, (HandleRef, SubRef)):
        if isinstance(arg, HandleRef) and types.get(arg.name) != "handle":
            raise IRError(f"{arg.name!r} is not a subroutine handle")
        return "handle"
    infer_type(arg, types)
    return "classical"


def _check_block(body, types):
    types = dict(types)
    for stmt in body:
        types = _check_stmt(stmt, types)
    return types


def _check_stmt(stmt, types):
    if isinstance(stmt, GateApp):
        if stmt.gate not in GATE_INFO:
            raise IRError(f"unknown gate {stmt.gate!r}")
        arity, parametric = GATE_INFO[stmt.gate]
        if len(stmt.targets) != arity:
            raise IRError(f"{stmt.gate} needs {arity} targets, got {len(stmt.targets)}")
        for t in stmt.targets:
            if not isinstance(t, QRef):
                raise IRError("gate targets must be single qubits")
            _check_qarg(t, types)
        if parametric != (stmt.angle is not None):
            raise IRError(f"{stmt.gate} angle mismatch")
        if stmt.angle is not None and infer_type(stmt.angle, types) == "bool":
            raise IRError("gate angle must be numeric")
        return types
    if isinstance(stmt, ControlledApp):
        _check_qarg(stmt.controls, types)
        if stmt.polarity is not None:
            _check_int(stmt.polarity, types, "polarity")
        if not isinstance(stmt.body, (GateApp, Call, ControlledApp)):
            raise IRError("controlled body must be a gate or call")
        if isinstance(stmt.body, Call) and stmt.body.bind:
            raise IRError("controlled calls cannot bind results")
        _check_stmt(stmt.body, types)
        return types
    if isinstance(stmt, Call):
        _check_call(stmt, types)
        out = dict(types)
        for name in stmt.bind:
            out[name] = "int"
        return out
    if isinstance(stmt, MeasureInto):
        _check_qarg(stmt.qubits, types)
        out = dict(types)
        out[stmt.var] = "int"
        return out
    if isinstance(stmt, ClassicalAssign):
        t = infer_type(stmt.expr, types)
        prev = types.get(stmt.var)
        if prev is not None and prev not in CLASSICAL_KINDS:
            raise IRError(f"cannot assign to {stmt.var!r}")
        out = dict(types)
        out[stmt.var] = t if prev is None or prev == t else _join(prev, t)
        return out
    if isinstance(stmt, RandomInt):
        _check_int(stmt.upper, types, "random bound")
        out = dict(types)
        out[stmt.var] = "int"
        return out
    if isinstance(stmt, If):
        infer_type(stmt.cond, types)
        a = _check_block(stmt.then, types)
        b = _check_block(stmt.orelse, types)
        out = dict(types)
        for k, v in list(a.items()) + list(b.items()):
            if k not in out:
                out[k] = v
        return out
    if isinstance(stmt, For):
        _check_int(stmt.lower, types, "loop bound")
        _check_int(stmt.upper, types, "loop bound")
        inner = dict(types)
        inner[stmt.var] = "int"
        after = _check_block(stmt.body, inner)
        out = dict(types)
        for k, v in after.items():
            if k not in out and k != stmt.var:
                out[k] = v
        return out
    if isinstance(stmt, RepeatUntil):
        if stmt.max_iter < 1:
            raise IRError("max_iter must be positive")
        after = _check_block(stmt.body, types)
        infer_type(stmt.cond, after)
        return after
    if isinstance(stmt, WithinApply):
        probe = Subroutine("within", (), stmt.within)
        if not adjointable(probe):
            raise IRError("within-block must be adjointable")
        after = _check_block(stmt.within, types)
        return _check_block(stmt.apply, after)
    raise IRError(f"unknown statement {stmt!r}")


def _join(a, b):
    if "float" in (a, b):
        return "float"
    return "int"


def validate(sub: Subroutine) -> None:
    """Raise IRError unless ``sub`` (and everything it calls) is well formed."""
    for s in closure(sub):
        _validate_one(s)


def _validate_one(sub: Subroutine) -> None:
    names = [p.name for p in sub.params]
    if len(names) != len(set(names)):
        raise IRError(f"{sub.name}: duplicate parameter names")
    types = {}
    for p in sub.params:
        types[p.name] = p.kind
        if p.kind == "handle":
            types[("sig", p.name)] = p.signature
    for p in sub.params:
        if p.length is not None:
            if p.kind != "qubits":
                raise IRError(f"{sub.name}.{p.name}: only qubit arrays have lengths")
            _check_int(p.length, types, "array length")
    try:
        final = _check_block(sub.body, types)
    except IRError as exc:
        raise IRError(f"{sub.name}: {exc}") from None
    for r in sub.returns:
        if r not in final:
            raise IRError(f"{sub.name}: returned name {r!r} is never assigned")


def is_well_formed(sub: Subroutine) -> bool:
    try:
        validate(sub)
    except IRError:
        return False
    return True


def negate(expr):
    """Arithmetic negation, folding constants and double negation."""
    if isinstance(expr, Const) and not isinstance(expr.value, bool):
        return Const(-expr.value)
    if isinstance(expr, UnOp) and expr.op == "-":
        return expr.operand
    return UnOp("-", expr)


__all__ = [
    "adjointable",
    "closure",
    "free_vars",
    "innermost",
    "is_well_formed",
    "measurement_sites",
    "negate",
    "static_callees",
    "validate",
    "walk",
]
