"""IR node types: parameters, qubit references, statements and subroutines.

All nodes are immutable and compare structurally.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional, Tuple, Union

from .expr import Expr

CLASSICAL_KINDS = ("int", "float", "bool")
PARAM_KINDS = CLASSICAL_KINDS + ("qubits", "handle")


@dataclass(frozen=True)
class Param:
    """A subroutine parameter.

    ``length`` constrains qubit arrays (None means any length). ``signature``
    lists the parameter kinds a subroutine handle must accept.
    """

    name: str
    kind: str
    length: Optional[Expr] = None
    signature: Optional[Tuple[str, ...]] = None

    def __post_init__(self):
        if self.kind not in PARAM_KINDS:
            raise ValueError(f"unknown parameter kind {self.kind!r}")


# --- qubit arguments ---------------------------------------------------------


@dataclass(frozen=True)
class QRef:
    """A single qubit ``array[index]``."""

    array: str
    index: Expr


@dataclass(frozen=True)
class QSlice:
    """``array[start:stop]`` (whole array when both are None), optionally reversed."""

    array: str
    start: Optional[Expr] = None
    stop: Optional[Expr] = None
    reverse: bool = False


@dataclass(frozen=True)
class QConcat:
    parts: tuple


QArg = Union[QRef, QSlice, QConcat]


# --- subroutine-valued arguments -----------------------------------------------


@dataclass(frozen=True)
class HandleRef:
    """A subroutine handle held in a parameter."""

    name: str


@dataclass(frozen=True)
class SubRef:
    """A statically known subroutine passed as a handle value."""

    sub: "Subroutine"


# --- statements --------------------------------------------------------------


@dataclass(frozen=True)
class GateApp:
    gate: str
    targets: tuple
    angle: Optional[Expr] = None


@dataclass(frozen=True)
class ControlledApp:
    """Runs ``body`` (a gate, call or nested controlled statement) under controls.

    ``polarity`` is an integer expression whose bits, most significant first,
    give the required value of each control qubit; None means all ones.
    """

    body: "Statement"
    controls: QArg
    polarity: Optional[Expr] = None


@dataclass(frozen=True)
class Call:
    """Invoke a subroutine; ``bind`` names receive the callee's returns."""

    callee: Union["Subroutine", HandleRef]
    args: tuple
    bind: tuple = ()
    adjoint: bool = False


@dataclass(frozen=True)
class MeasureInto:
    var: str
    qubits: QArg


@dataclass(frozen=True)
class If:
    cond: Expr
    then: tuple
    orelse: tuple = ()


@dataclass(frozen=True)
class For:
    """Inclusive range ``lower..upper``; ``reverse`` iterates downward."""

    var: str
    lower: Expr
    upper: Expr
    body: tuple
    reverse: bool = False


@dataclass(frozen=True)
class RepeatUntil:
    body: tuple
    cond: Expr
    max_iter: int = 1000


@dataclass(frozen=True)
class WithinApply:
    within: tuple
    apply: tuple


@dataclass(frozen=True)
class ClassicalAssign:
    var: str
    expr: Expr


@dataclass(frozen=True)
class RandomInt:
    """Draws ``var`` uniformly from ``0..upper-1`` (classical sampling of an ensemble)."""

    var: str
    upper: Expr


Statement = Union[
    GateApp, ControlledApp, Call, MeasureInto, If, For, RepeatUntil, WithinApply, ClassicalAssign, RandomInt
]
BLOCK_FIELDS = {
    If: ("then", "orelse"),
    For: ("body",),
    RepeatUntil: ("body",),
    WithinApply: ("within", "apply"),
}


@dataclass(frozen=True)
class Subroutine:
    name: str
    params: tuple
    body: tuple
    returns: tuple = field(default=())

    def param(self, name: str) -> Param:
        for p in self.params:
            if p.name == name:
                return p
        raise KeyError(name)

    @property
    def param_names(self):
        return tuple(p.name for p in self.params)

    @cached_property
    def is_adjointable(self) -> bool:
        from .analysis import adjointable

        return adjointable(self)

    def __repr__(self):
        return f"Subroutine({self.name!r}, {len(self.params)} params, {len(self.body)} statements)"


def child_blocks(stmt):
    """(field name, block) pairs of a compound statement."""
    return [(f, getattr(stmt, f)) for f in BLOCK_FIELDS.get(type(stmt), ())]


def statement_at(body: tuple, path: tuple):
    """Statement at ``path`` = (i0, field, i1, field, i2, ...)."""
    stmt = body[path[0]]
    rest = path[1:]
    while rest:
        block = getattr(stmt, rest[0])
        stmt = block[rest[1]]
        rest = rest[2:]
    return stmt


def format_path(path: tuple) -> str:
    return ".".join(str(p) for p in path)


def parse_path(text: str) -> tuple:
    out = []
    for part in text.split("."):
        out.append(int(part) if part.lstrip("-").isdigit() else part)
    return tuple(out)
