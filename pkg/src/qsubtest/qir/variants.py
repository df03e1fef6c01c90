"""Compile-time variant generation: inverse, controlled, power, endian, classical substitute."""

from __future__ import annotations

import threading

from ..errors import IRError, VariantError
from ..simcore.gates import GATE_INFO
from .analysis import negate, walk
from .expr import BinOp, Const, Len, Var
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
    Param,
    QRef,
    QSlice,
    RandomInt,
    RepeatUntil,
    Subroutine,
    WithinApply,
)

_INVERSE_KIND = {"S": "Sdg", "Sdg": "S", "T": "Tdg", "Tdg": "T"}

_lock = threading.Lock()
_inverse_cache = {}
_controlled_cache = {}


def _cached(cache, sub, make):
    key = id(sub)
    with _lock:
        hit = cache.get(key)
        if hit is not None and hit[0] is sub:
            return hit[1]
    made = make()
    with _lock:
        cache[key] = (sub, made)
    return made


# --- inverse ---------------------------------------------------------------------


def _invert_stmt(stmt):
    if isinstance(stmt, GateApp):
        kind = _INVERSE_KIND.get(stmt.gate, stmt.gate)
        angle = negate(stmt.angle) if stmt.angle is not None else None
        return GateApp(kind, stmt.targets, angle)
    if isinstance(stmt, ControlledApp):
        return ControlledApp(_invert_stmt(stmt.body), stmt.controls, stmt.polarity)
    if isinstance(stmt, Call):
        if stmt.bind:
            raise VariantError("cannot invert a call that binds classical results")
        if isinstance(stmt.callee, Subroutine):
            if stmt.adjoint:
                return Call(stmt.callee, stmt.args)
            return Call(inverse_of(stmt.callee), stmt.args)
        return Call(stmt.callee, stmt.args, (), not stmt.adjoint)
    if isinstance(stmt, If):
        return If(stmt.cond, invert_block(stmt.then), invert_block(stmt.orelse))
    if isinstance(stmt, For):
        return For(stmt.var, stmt.lower, stmt.upper, invert_block(stmt.body), not stmt.reverse)
    if isinstance(stmt, WithinApply):
        return WithinApply(stmt.within, invert_block(stmt.apply))
    raise VariantError(f"{type(stmt).__name__} is not invertible")


def invert_block(body) -> tuple:
    """Adjoint of a statement list.

    Classical assignments keep their original order and move ahead of the
    reversed quantum statements; adjointable bodies are single-assignment so
    this preserves every value.
    """
    classical = [s for s in body if isinstance(s, ClassicalAssign)]
    quantum = [_invert_stmt(s) for s in reversed(body) if not isinstance(s, ClassicalAssign)]
    return tuple(classical + quantum)


def inverse_of(sub: Subroutine) -> Subroutine:
    if not sub.is_adjointable:
        raise VariantError(f"{sub.name} is not adjointable")

    def make():
        inv = Subroutine(f"Adjoint {sub.name}", sub.params, invert_block(sub.body), sub.returns)
        with _lock:
            _inverse_cache[id(inv)] = (inv, sub)
        return inv

    return _cached(_inverse_cache, sub, make)


# --- controlled --------------------------------------------------------------------


def _fresh_name(taken, base):
    name = base
    k = 1
    while name in taken:
        name = f"{base}_{k}"
        k += 1
    return name


def _lift_block(body, ctl):
    return tuple(_lift_stmt(s, ctl) for s in body)


def _lift_stmt(stmt, ctl):
    whole = QSlice(ctl)
    if isinstance(stmt, (GateApp, ControlledApp)):
        return ControlledApp(stmt, whole)
    if isinstance(stmt, Call):
        if isinstance(stmt.callee, Subroutine) and not stmt.adjoint:
            return Call(controlled_of(stmt.callee), (whole,) + stmt.args)
        return ControlledApp(stmt, whole)
    if isinstance(stmt, If):
        return If(stmt.cond, _lift_block(stmt.then, ctl), _lift_block(stmt.orelse, ctl))
    if isinstance(stmt, For):
        return For(stmt.var, stmt.lower, stmt.upper, _lift_block(stmt.body, ctl), stmt.reverse)
    if isinstance(stmt, WithinApply):
        return WithinApply(stmt.within, _lift_block(stmt.apply, ctl))
    if isinstance(stmt, ClassicalAssign):
        return stmt
    raise VariantError(f"{type(stmt).__name__} cannot be controlled")


def controlled_of(sub: Subroutine) -> Subroutine:
    """Prepends a control qubit-array parameter; gates act only when all controls are 1."""
    if not sub.is_adjointable:
        raise VariantError(f"{sub.name} is not adjointable")

    def make():
        taken = set(sub.param_names)
        for _, s in walk(sub.body):
            if isinstance(s, (ClassicalAssign, For)):
                taken.add(s.var)
        ctl = _fresh_name(taken, "ctl")
        params = (Param(ctl, "qubits"),) + tuple(sub.params)
        return Subroutine(f"Controlled {sub.name}", params, _lift_block(sub.body, ctl), sub.returns)

    return _cached(_controlled_cache, sub, make)


# --- power ---------------------------------------------------------------------------


def passthrough_args(sub: Subroutine) -> tuple:
    out = []
    for p in sub.params:
        if p.kind == "qubits":
            out.append(QSlice(p.name))
        elif p.kind == "handle":
            out.append(HandleRef(p.name))
        else:
            out.append(Var(p.name))
    return tuple(out)


def power_of(sub: Subroutine, k: int) -> Subroutine:
    """``sub`` applied ``|k|`` times (its inverse when ``k < 0``)."""
    if not sub.is_adjointable:
        raise VariantError(f"{sub.name} is not adjointable")
    k = int(k)
    if k == 0:
        body = ()
    else:
        target = sub if k > 0 else inverse_of(sub)
        counter = _fresh_name(set(sub.param_names), "_rep")
        body = (For(counter, Const(1), Const(abs(k)), (Call(target, passthrough_args(sub)),)),)
    return Subroutine(f"{sub.name}^{k}", sub.params, body, ())


# --- endian reindexing -------------------------------------------------------------------


def _reverse_network(name, counter):
    n = Len(name)
    half_minus_one = BinOp("-", BinOp("/", n, Const(2)), Const(1))
    mirror = BinOp("-", BinOp("-", n, Const(1)), Var(counter))
    swap = GateApp("SWAP", (QRef(name, Var(counter)), QRef(name, mirror)))
    return For(counter, Const(0), half_minus_one, (swap,))


def reindex_endian(sub: Subroutine, param: str, side: str = "both") -> Subroutine:
    """Reverse the qubit order of one qubit-array parameter.

    ``side="both"`` relabels the register (BIBO <-> LILO); ``"input"`` or
    ``"output"`` physically reverses the register before or after the call,
    changing only that side's endianness (e.g. BIBO -> BILO).
    """
    try:
        p = sub.param(param)
    except KeyError:
        raise IRError(f"{sub.name} has no parameter {param!r}") from None
    if p.kind != "qubits":
        raise IRError(f"{param!r} is not a qubit array")
    if side not in ("both", "input", "output"):
        raise ValueError("side must be 'both', 'input' or 'output'")
    args = list(passthrough_args(sub))
    counter = _fresh_name(set(sub.param_names), "_i")
    if side == "both":
        idx = sub.params.index(p)
        args[idx] = QSlice(param, reverse=True)
        body = (Call(sub, tuple(args)),)
    elif side == "output":
        body = (Call(sub, tuple(args)), _reverse_network(param, counter))
    else:
        body = (_reverse_network(param, counter), Call(sub, tuple(args)))
    suffix = {"both": "", "input": ":in", "output": ":out"}[side]
    return Subroutine(f"{sub.name}@rev[{param}{suffix}]", sub.params, body, ())


# --- classical substitute ------------------------------------------------------------------


class _Subst:
    def __init__(self):
        self.injected = []
        self.taken = set()

    def param_for(self, var):
        name = _fresh_name(self.taken, f"set_inner_{var}")
        self.taken.add(name)
        self.injected.append(Param(name, "int"))
        return name

    def block(self, body):
        out = []
        for s in body:
            r = self.stmt(s)
            if r is not None:
                out.extend(r)
        return tuple(out)

    def stmt(self, s):
        if isinstance(s, (GateApp, ControlledApp)):
            return None
        if isinstance(s, MeasureInto):
            return [ClassicalAssign(s.var, Var(self.param_for(s.var)))]
        if isinstance(s, (ClassicalAssign, RandomInt)):
            return [s]
        if isinstance(s, Call):
            # a call binding nothing cannot change the caller's classical state
            if not isinstance(s.callee, Subroutine) or not s.bind:
                return None
            inner = classical_substitute(s.callee)
            if not inner.body:
                return None
            args = []
            for p, a in zip(s.callee.params, s.args):
                if p.kind in CLASSICAL_KINDS:
                    args.append(a)
            for p in inner.params[len(args):]:
                outer = self.param_for(f"{s.callee.name}_{p.name}")
                args.append(Var(outer))
            return [Call(inner, tuple(args), s.bind)]
        if isinstance(s, If):
            then, orelse = self.block(s.then), self.block(s.orelse)
            if not then and not orelse:
                return None
            return [If(s.cond, then, orelse)]
        if isinstance(s, For):
            body = self.block(s.body)
            if not body:
                return None
            return [For(s.var, s.lower, s.upper, body, s.reverse)]
        if isinstance(s, RepeatUntil):
            return [RepeatUntil(self.block(s.body), s.cond, s.max_iter)]
        if isinstance(s, WithinApply):
            return list(self.block(s.within) + self.block(s.apply))
        raise IRError(f"unknown statement {s!r}")


def classical_substitute(sub: Subroutine) -> Subroutine:
    """Pure-classical skeleton: gates removed, each measurement fed by a new int parameter."""
    st = _Subst()
    st.taken = set(sub.param_names)
    body = st.block(sub.body)
    params = tuple(p for p in sub.params if p.kind in CLASSICAL_KINDS) + tuple(st.injected)
    return Subroutine(f"{sub.name}_classical", params, body, sub.returns)


def gate_inverse_kind(kind: str) -> str:
    if kind not in GATE_INFO:
        raise ValueError(kind)
    return _INVERSE_KIND.get(kind, kind)


__all__ = [
    "classical_substitute",
    "controlled_of",
    "invert_block",
    "inverse_of",
    "passthrough_args",
    "power_of",
    "reindex_endian",
]
