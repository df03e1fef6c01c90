"""Interpreter over the state-vector simulator.

Subroutines are compiled once into nested Python closures (cached by
identity) and then run against a caller-owned state and rng.
"""

from __future__ import annotations

from collections import OrderedDict
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

import numpy as np

from ..errors import DivergenceFault, QsubError, RuntimeFault, VariantError
from ..simcore import Gate, StateVector, apply_controlled, apply_gate, measure, new_state
from ..simcore.gates import GATE_INFO
from .expr import compile_expr
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
    format_path,
)

_EXPR_ERRORS = (KeyError, ZeroDivisionError, TypeError, ValueError, OverflowError, IndexError)


@dataclass
class ExecutionResult:
    classical_outputs: dict
    final_state: StateVector
    measurement_log: list = field(default_factory=list)


class _Ctx:
    __slots__ = ("state", "rng", "log", "controls", "pols")

    def __init__(self, state, rng):
        self.state = state
        self.rng = rng
        self.log = []
        self.controls = ()
        self.pols = ()


_CACHE: "OrderedDict[int, tuple]" = OrderedDict()
_CACHE_SIZE = 8192


def _compiled(sub: Subroutine):
    key = id(sub)
    hit = _CACHE.get(key)
    if hit is not None and hit[0] is sub:
        _CACHE.move_to_end(key)
        return hit[1]
    runner = _compile_block(sub.body, sub.name, ())
    _CACHE[key] = (sub, runner)
    if len(_CACHE) > _CACHE_SIZE:
        _CACHE.popitem(last=False)
    return runner


def _site(subname, path):
    return f"{subname}:{format_path(path)}"


# --- qubit arguments -----------------------------------------------------------


def _compile_qarg(arg, site):
    if isinstance(arg, QRef):
        name = arg.array
        idx = compile_expr(arg.index)

        def ref(env):
            arr = env[name]
            i = idx(env)
            if not isinstance(i, (int, np.integer)) or isinstance(i, bool) or i < 0 or i >= len(arr):
                raise RuntimeFault(f"index {i!r} out of bounds for {name}[{len(arr)}]", site)
            return (arr[i],)

        return ref
    if isinstance(arg, QSlice):
        name = arg.array
        start = compile_expr(arg.start) if arg.start is not None else None
        stop = compile_expr(arg.stop) if arg.stop is not None else None
        rev = arg.reverse

        def sl(env):
            arr = env[name]
            a = start(env) if start is not None else 0
            b = stop(env) if stop is not None else len(arr)
            if not (0 <= a <= b <= len(arr)):
                raise RuntimeFault(f"slice {a}:{b} out of bounds for {name}[{len(arr)}]", site)
            out = tuple(arr[a:b])
            return out[::-1] if rev else out

        return sl
    if isinstance(arg, QConcat):
        parts = [_compile_qarg(p, site) for p in arg.parts]
        return lambda env: tuple(q for p in parts for q in p(env))
    raise RuntimeFault(f"not a qubit argument: {arg!r}", site)


# --- statements ----------------------------------------------------------------


def _compile_block(body, subname, path):
    items = []
    for i, stmt in enumerate(body):
        p = path + (i,)
        items.append((_compile_stmt(stmt, subname, p), _site(subname, p)))
    items = tuple(items)

    def run(ctx, env):
        for fn, site in items:
            try:
                fn(ctx, env)
            except RuntimeFault:
                raise
            except QsubError as exc:
                raise RuntimeFault(str(exc), site) from exc
            except _EXPR_ERRORS as exc:
                raise RuntimeFault(f"{type(exc).__name__}: {exc}", site) from exc

    return run


def _compile_stmt(stmt, subname, path):
    site = _site(subname, path)
    if isinstance(stmt, GateApp):
        return _compile_gate(stmt, site)
    if isinstance(stmt, ControlledApp):
        return _compile_controlled(stmt, subname, path, site)
    if isinstance(stmt, Call):
        return _compile_call(stmt, site)
    if isinstance(stmt, MeasureInto):
        qs = _compile_qarg(stmt.qubits, site)
        var = stmt.var

        def meas(ctx, env):
            if ctx.controls:
                raise RuntimeFault("measurement inside a controlled context", site)
            out = measure(ctx.state, qs(env), ctx.rng)
            env[var] = out.value
            ctx.log.append((site, out.bits))

        return meas
    if isinstance(stmt, ClassicalAssign):
        fn = compile_expr(stmt.expr)
        var = stmt.var

        def assign(ctx, env):
            env[var] = fn(env)

        return assign
    if isinstance(stmt, RandomInt):
        upper = compile_expr(stmt.upper)
        var = stmt.var

        def draw(ctx, env):
            u = upper(env)
            if u < 1:
                raise RuntimeFault(f"random bound {u} < 1", site)
            env[var] = int(ctx.rng.integers(u))

        return draw
    if isinstance(stmt, If):
        cond = compile_expr(stmt.cond)
        then = _compile_block(stmt.then, subname, path + ("then",))
        orelse = _compile_block(stmt.orelse, subname, path + ("orelse",))

        def branch(ctx, env):
            if cond(env):
                then(ctx, env)
            else:
                orelse(ctx, env)

        return branch
    if isinstance(stmt, For):
        lo = compile_expr(stmt.lower)
        hi = compile_expr(stmt.upper)
        body = _compile_block(stmt.body, subname, path + ("body",))
        var = stmt.var
        rev = stmt.reverse

        def loop(ctx, env):
            a, b = lo(env), hi(env)
            rng = range(b, a - 1, -1) if rev else range(a, b + 1)
            for i in rng:
                env[var] = i
                body(ctx, env)

        return loop
    if isinstance(stmt, RepeatUntil):
        body = _compile_block(stmt.body, subname, path + ("body",))
        cond = compile_expr(stmt.cond)
        limit = stmt.max_iter

        def rus(ctx, env):
            for _ in range(limit):
                body(ctx, env)
                if cond(env):
                    return
            raise DivergenceFault(f"repeat-until exceeded {limit} iterations", site)

        return rus
    if isinstance(stmt, WithinApply):
        from .variants import invert_block

        within = _compile_block(stmt.within, subname, path + ("within",))
        apply = _compile_block(stmt.apply, subname, path + ("apply",))
        undo = _compile_block(invert_block(stmt.within), subname, path + ("within",))

        def conj(ctx, env):
            within(ctx, env)
            apply(ctx, env)
            undo(ctx, env)

        return conj
    raise RuntimeFault(f"unknown statement {stmt!r}", site)


def _compile_gate(stmt: GateApp, site):
    targets = [_compile_qarg(t, site) for t in stmt.targets]
    kind = stmt.gate
    if kind not in GATE_INFO:
        raise RuntimeFault(f"unknown gate {kind!r}", site)
    if stmt.angle is not None:
        angle = compile_expr(stmt.angle)
        fixed = None
    else:
        angle = None
        fixed = Gate(kind)

    def gate(ctx, env):
        qs = tuple(t(env)[0] for t in targets)
        g = fixed if fixed is not None else Gate(kind, float(angle(env)))
        if ctx.controls:
            apply_controlled(ctx.state, g, ctx.controls, ctx.pols, qs)
        else:
            apply_gate(ctx.state, g, qs)

    return gate


def _compile_controlled(stmt: ControlledApp, subname, path, site):
    controls = _compile_qarg(stmt.controls, site)
    pol = compile_expr(stmt.polarity) if stmt.polarity is not None else None
    body = _compile_stmt(stmt.body, subname, path)

    def ctl(ctx, env):
        cs = controls(env)
        if pol is None:
            bits = (1,) * len(cs)
        else:
            v = pol(env)
            bits = tuple((v >> (len(cs) - 1 - i)) & 1 for i in range(len(cs)))
        saved = (ctx.controls, ctx.pols)
        ctx.controls = saved[0] + cs
        ctx.pols = saved[1] + bits
        try:
            body(ctx, env)
        finally:
            ctx.controls, ctx.pols = saved

    return ctl


def _compile_arg(arg, site):
    if isinstance(arg, (QRef, QSlice, QConcat)):
        return "qubits", _compile_qarg(arg, site)
    if isinstance(arg, HandleRef):
        name = arg.name
        return "handle", lambda env: env[name]
    if isinstance(arg, SubRef):
        sub = arg.sub
        return "handle", lambda env: sub
    return "classical", compile_expr(arg)


def _compile_call(stmt: Call, site):
    args = [_compile_arg(a, site) for a in stmt.args]
    bind = stmt.bind
    if isinstance(stmt.callee, Subroutine):
        static = stmt.callee
        if stmt.adjoint:
            from .variants import inverse_of

            static = inverse_of(static)
        handle = None
    else:
        static = None
        handle = stmt.callee.name
    adjoint = stmt.adjoint

    def call(ctx, env):
        if static is not None:
            callee = static
        else:
            callee = env[handle]
            if not isinstance(callee, Subroutine):
                raise RuntimeFault(f"handle {handle!r} is not bound to a subroutine", site)
            if adjoint:
                from .variants import inverse_of

                try:
                    callee = inverse_of(callee)
                except VariantError as exc:
                    raise RuntimeFault(str(exc), site) from exc
        if len(callee.params) != len(args):
            raise RuntimeFault(f"{callee.name} expects {len(callee.params)} arguments", site)
        values = [fn(env) for _, fn in args]
        new_env = _bind(callee, [k for k, _ in args], values, site)
        _compiled(callee)(ctx, new_env)
        for name, ret in zip(bind, callee.returns):
            env[name] = new_env.get(ret)

    return call


def _bind(sub: Subroutine, kinds, values, site):
    env = {}
    for p, kind, v in zip(sub.params, kinds, values):
        expected = "classical" if p.kind in CLASSICAL_KINDS else p.kind
        if kind != expected:
            raise RuntimeFault(f"argument {p.name} of {sub.name} should be {p.kind}", site)
        env[p.name] = v
    for p in sub.params:
        if p.kind == "qubits" and p.length is not None:
            want = compile_expr(p.length)(env)
            if want != len(env[p.name]):
                raise RuntimeFault(
                    f"{sub.name}.{p.name} needs {want} qubits, got {len(env[p.name])}", site
                )
    return env


# --- public entry points ---------------------------------------------------------


def _coerce(p, value):
    if p.kind == "qubits":
        return tuple(int(q) for q in value)
    if p.kind == "handle":
        if isinstance(value, SubRef):
            return value.sub
        return value
    if p.kind == "int":
        return int(value)
    if p.kind == "float":
        return float(value)
    return bool(value)


def execute(sub: Subroutine, args, state: StateVector, rng) -> ExecutionResult:
    """Run ``sub`` on ``state`` (mutated in place).

    ``args`` is a mapping from parameter name to value, or a positional
    sequence. Qubit arrays are sequences of absolute qubit indices; handles
    are Subroutine values. Raises RuntimeFault on runtime errors.
    """
    if isinstance(args, Mapping):
        missing = [p.name for p in sub.params if p.name not in args]
        if missing:
            raise RuntimeFault(f"missing arguments {missing} for {sub.name}", sub.name)
        values = [args[p.name] for p in sub.params]
    else:
        values = list(args)
        if len(values) != len(sub.params):
            raise RuntimeFault(f"{sub.name} expects {len(sub.params)} arguments", sub.name)
    values = [_coerce(p, v) for p, v in zip(sub.params, values)]
    kinds = ["classical" if p.kind in CLASSICAL_KINDS else p.kind for p in sub.params]
    site = _site(sub.name, ())
    for p, v in zip(sub.params, values):
        if p.kind == "qubits":
            for q in v:
                if q < 0 or q >= state.n_qubits:
                    raise RuntimeFault(f"qubit {q} outside the {state.n_qubits}-qubit state", site)
    env = _bind(sub, kinds, values, site)
    ctx = _Ctx(state, rng)
    try:
        _compiled(sub)(ctx, env)
    except RecursionError as exc:
        raise RuntimeFault("call depth exceeded", site) from exc
    outputs = {r: env.get(r) for r in sub.returns}
    return ExecutionResult(outputs, state, ctx.log)


@dataclass(frozen=True)
class Layout:
    """Concrete argument binding of a subroutine onto a fresh register."""

    args: dict
    n_qubits: int
    registers: dict

    def qubits(self, *names) -> tuple:
        return tuple(q for name in names for q in self.registers[name])


def bind_layout(
    sub: Subroutine,
    classical: Optional[Mapping] = None,
    lengths: Optional[Mapping] = None,
    handles: Optional[Mapping] = None,
    default_length: Optional[int] = None,
) -> Layout:
    """Allocate every qubit-array parameter consecutively in declaration order.

    Lengths come from ``lengths``, else the parameter's length expression
    evaluated over ``classical``, else ``default_length``.
    """
    classical = dict(classical or {})
    lengths = dict(lengths or {})
    handles = dict(handles or {})
    args = {}
    registers = {}
    offset = 0
    env = dict(classical)
    for p in sub.params:
        if p.kind in CLASSICAL_KINDS:
            if p.name not in classical:
                raise ValueError(f"missing classical argument {p.name!r} for {sub.name}")
            args[p.name] = classical[p.name]
        elif p.kind == "handle":
            if p.name not in handles:
                raise ValueError(f"missing handle argument {p.name!r} for {sub.name}")
            args[p.name] = handles[p.name]
    for p in sub.params:
        if p.kind != "qubits":
            continue
        if p.name in lengths:
            size = int(lengths[p.name])
        elif p.length is not None:
            size = int(compile_expr(p.length)(env))
        elif default_length is not None:
            size = int(default_length)
        else:
            raise ValueError(f"no length for qubit array {p.name!r} of {sub.name}")
        regs = tuple(range(offset, offset + size))
        registers[p.name] = regs
        args[p.name] = regs
        env[p.name] = regs
        offset += size
    return Layout(args, offset, registers)


def run(sub: Subroutine, layout: Layout, rng, state: Optional[StateVector] = None) -> ExecutionResult:
    """Execute on a fresh all-zero register sized for ``layout`` (or the given state)."""
    if state is None:
        state = new_state(layout.n_qubits)
    return execute(sub, layout.args, state, rng)


def positional(sub: Subroutine, values: Sequence) -> dict:
    return {p.name: v for p, v in zip(sub.params, values)}
