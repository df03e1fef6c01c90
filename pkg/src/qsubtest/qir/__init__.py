"""Quantum-program IR: subroutines, statements, variants, interpreter, text form."""

from .analysis import closure, is_well_formed, measurement_sites, validate, walk
from .builder import (
    assign,
    bool_,
    call,
    controlled,
    float_,
    for_,
    gate,
    handle,
    if_,
    int_,
    measure,
    qarg,
    qubits,
    random_int,
    repeat_until,
    subroutine,
    within_apply,
)
from .expr import BinOp, Const, Func, Len, UnOp, Var, evaluate, format_expr, parse_expr
from .interp import ExecutionResult, Layout, bind_layout, execute, run
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
    format_path,
    parse_path,
    statement_at,
)
from .serialize import HEADER, parse, parse_all, root_block, serialize
from .variants import (
    classical_substitute,
    controlled_of,
    inverse_of,
    invert_block,
    passthrough_args,
    power_of,
    reindex_endian,
)

__all__ = [name for name in dir() if not name.startswith("_")]
