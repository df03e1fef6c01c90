"""Single-edit mutants (GM, SM, CM, MM), trigger trials and mutant corpora.

Every mutant changes exactly one statement of the root subroutine's body:
an insertion, a removal or a replacement. Candidates that fail static
validation are discarded before emission. Sampling picks an eligible site
uniformly, then a payload uniformly within that site.
"""

from __future__ import annotations

import csv
import dataclasses
import enum
import io
import os
from dataclasses import dataclass
from typing import Callable, Dict, Iterable, List, Optional, Sequence

import numpy as np

from .checkers import Binding, identity_check, qft_output_check, sequence
from .errors import RuntimeFault
from .qir import (
    Call,
    ClassicalAssign,
    ControlledApp,
    For,
    GateApp,
    HandleRef,
    If,
    MeasureInto,
    QRef,
    QSlice,
    RandomInt,
    RepeatUntil,
    Subroutine,
    WithinApply,
    execute,
    format_path,
    inverse_of,
    is_well_formed,
    parse,
    serialize,
)
from .qir.analysis import closure, innermost, walk
from .qir.expr import BinOp, Const, Func, Len, UnOp, Var, free_vars
from .qir.serialize import _dumps, enc_expr, enc_simple, root_block
from .simcore import new_state
from .simcore.gates import GATE_INFO
from .stateprep import InputKind, gen_ket_x


class MutationKind(str, enum.Enum):
    GM = "GM"
    SM = "SM"
    CM = "CM"
    MM = "MM"


class EditKind(str, enum.Enum):
    ADD = "add"
    REMOVE = "remove"
    REPLACE = "replace"


@dataclass(frozen=True)
class Mutant:
    base: str
    kind: MutationKind
    edit: EditKind
    site: str
    payload: str
    program: Subroutine
    seed: Optional[int] = None

    def manifest_row(self) -> list:
        return [self.base, self.kind.value, self.edit.value, self.site, self.payload,
                "" if self.seed is None else str(self.seed)]


ALL_KINDS = tuple(MutationKind)
INSERT_GATES_1Q = ("X", "Y", "Z", "H", "S", "Sdg", "T", "Tdg")
INSERT_GATES_2Q = ("CNOT", "SWAP")
DISCARD_VAR = "mm"

# callee name -> factory producing extra faulty replacements for calls to it
_BUGGY_VARIANTS: Dict[str, Callable[[Subroutine], List[Subroutine]]] = {}


def register_buggy_variant(callee_name: str, factory: Callable[[Subroutine], List[Subroutine]]) -> None:
    """Register faulty stand-ins that SM may swap in for calls to ``callee_name``."""
    _BUGGY_VARIANTS[callee_name] = factory


# --- structural editing ----------------------------------------------------------


def _edit_block(body: tuple, block_path: tuple, fn) -> tuple:
    if not block_path:
        return tuple(fn(body))
    i, field, rest = block_path[0], block_path[1], block_path[2:]
    stmt = body[i]
    new = dataclasses.replace(stmt, **{field: _edit_block(getattr(stmt, field), rest, fn)})
    return body[:i] + (new,) + body[i + 1:]


def _insert(sub, block_path, idx, stmt):
    return dataclasses.replace(sub, body=_edit_block(sub.body, block_path, lambda b: b[:idx] + (stmt,) + b[idx:]))


def _remove(sub, block_path, idx):
    return dataclasses.replace(sub, body=_edit_block(sub.body, block_path, lambda b: b[:idx] + b[idx + 1:]))


def _replace(sub, block_path, idx, stmt):
    return dataclasses.replace(
        sub, body=_edit_block(sub.body, block_path, lambda b: b[:idx] + (stmt,) + b[idx + 1:]))


def _with_inner(stmt, inner):
    """``stmt`` with its innermost gate/call replaced."""
    if isinstance(stmt, ControlledApp):
        return dataclasses.replace(stmt, body=_with_inner(stmt.body, inner))
    return inner


@dataclass(frozen=True)
class _Block:
    path: tuple
    body: tuple
    loop_vars: tuple
    in_within: bool


def _blocks(body, path=(), loop_vars=(), in_within=False):
    yield _Block(path, body, loop_vars, in_within)
    for i, stmt in enumerate(body):
        if isinstance(stmt, ControlledApp):
            continue
        for fname, block in _child_blocks(stmt):
            lv = loop_vars + ((stmt.var,) if isinstance(stmt, For) else ())
            yield from _blocks(block, path + (i, fname), lv, in_within or fname == "within")


def _child_blocks(stmt):
    fields = {If: ("then", "orelse"), For: ("body",), RepeatUntil: ("body",), WithinApply: ("within", "apply")}
    return [(f, getattr(stmt, f)) for f in fields.get(type(stmt), ())]


def _line(stmt) -> str:
    """One-line text of a statement (the header line for block statements)."""
    if isinstance(stmt, For):
        return _dumps(["for", stmt.var, enc_expr(stmt.lower), enc_expr(stmt.upper), stmt.reverse])
    if isinstance(stmt, If):
        return _dumps(["if", enc_expr(stmt.cond)])
    if isinstance(stmt, RepeatUntil):
        return _dumps(["repeat", stmt.max_iter])
    if isinstance(stmt, WithinApply):
        return _dumps(["within"])
    return _dumps(enc_simple(stmt))


def _qubit_refs(sub: Subroutine, loop_vars: Sequence[str]) -> list:
    refs = []
    for p in sub.params:
        if p.kind != "qubits":
            continue
        refs.append(QRef(p.name, Const(0)))
        if p.length != Const(1):
            refs.append(QRef(p.name, BinOp("-", Len(p.name), Const(1))))
            for v in loop_vars:
                refs.append(QRef(p.name, BinOp("%", Var(v), Len(p.name))))
    return refs


def _names(sub: Subroutine) -> set:
    names = set(sub.param_names)
    for _, s in walk(sub.body):
        if isinstance(s, (ClassicalAssign, RandomInt, MeasureInto)):
            names.add(s.var)
        elif isinstance(s, For):
            names.add(s.var)
        elif isinstance(s, Call):
            names.update(s.bind)
    return names


def _fresh(sub: Subroutine, stem: str) -> str:
    taken = _names(sub)
    if stem not in taken:
        return stem
    k = 1
    while f"{stem}_{k}" in taken:
        k += 1
    return f"{stem}_{k}"


# --- candidate generation ----------------------------------------------------------
# Each generator yields (site path, edit, thunk) with thunk() -> (program, payload line).


def _gm_candidates(sub):
    for blk in _blocks(sub.body):
        refs = _qubit_refs(sub, blk.loop_vars)
        for idx in range(len(blk.body) + 1):
            site = blk.path + (idx,)
            for g in INSERT_GATES_1Q:
                for r in refs:
                    st = GateApp(g, (r,))
                    yield site, EditKind.ADD, (lambda bp=blk.path, i=idx, s=st: (_insert(sub, bp, i, s), _line(s)))
            for g in INSERT_GATES_2Q:
                for a in refs:
                    for b in refs:
                        if a != b:
                            st = GateApp(g, (a, b))
                            yield site, EditKind.ADD, (
                                lambda bp=blk.path, i=idx, s=st: (_insert(sub, bp, i, s), _line(s)))
        for idx, stmt in enumerate(blk.body):
            inner = innermost(stmt)
            if not isinstance(inner, GateApp):
                continue
            site = blk.path + (idx,)
            yield site, EditKind.REMOVE, (lambda bp=blk.path, i=idx, s=stmt: (_remove(sub, bp, i), _line(s)))
            arity, parametric = GATE_INFO[inner.gate]
            for g, (a2, p2) in GATE_INFO.items():
                if g == inner.gate or a2 != arity or p2 != parametric:
                    continue
                new = _with_inner(stmt, GateApp(g, inner.targets, inner.angle))
                yield site, EditKind.REPLACE, (lambda bp=blk.path, i=idx, s=new: (_replace(sub, bp, i, s), _line(s)))


def _truncated(callee: Subroutine) -> List[Subroutine]:
    if not callee.body:
        return []
    return [dataclasses.replace(callee, name=f"{callee.name}_trunc", body=callee.body[:-1])]


def _sm_alternatives(sub, inner: Call) -> list:
    """Replacement calls for ``inner``: adjoint flip, compatible callees, buggy variants."""
    out = []
    if not inner.bind:
        out.append(dataclasses.replace(inner, adjoint=not inner.adjoint))
    if isinstance(inner.callee, HandleRef):
        return out
    callee = inner.callee
    kinds = [p.kind for p in callee.params]
    for other in closure(sub)[:-1]:
        if other.name == callee.name or [p.kind for p in other.params] != kinds:
            continue
        if len(other.returns) >= len(inner.bind):
            out.append(dataclasses.replace(inner, callee=other, adjoint=False))
    variants = _truncated(callee) + _BUGGY_VARIANTS.get(callee.name, lambda c: [])(callee)
    for v in variants:
        out.append(dataclasses.replace(inner, callee=v))
    return out


def _sm_candidates(sub):
    calls = [(blk, idx, stmt) for blk in _blocks(sub.body) for idx, stmt in enumerate(blk.body)
             if isinstance(innermost(stmt), Call)]
    for blk, idx, stmt in calls:
        site = blk.path + (idx,)
        yield site, EditKind.REMOVE, (lambda bp=blk.path, i=idx, s=stmt: (_remove(sub, bp, i), _line(s)))
        for alt in _sm_alternatives(sub, innermost(stmt)):
            new = _with_inner(stmt, alt)
            yield site, EditKind.REPLACE, (lambda bp=blk.path, i=idx, s=new: (_replace(sub, bp, i, s), _line(s)))
    for blk in _blocks(sub.body):
        for idx in range(len(blk.body) + 1):
            for _, _, stmt in calls:
                yield blk.path + (idx,), EditKind.ADD, (
                    lambda bp=blk.path, i=idx, s=stmt: (_insert(sub, bp, i, s), _line(s)))


_CMP_FLIP = {"<": ">=", ">=": "<", ">": "<=", "<=": ">", "==": "!=", "!=": "=="}
_ARITH_SWAP = {"+": "-", "-": "+"}


def _expr_edits(e) -> list:
    """Single-point perturbations of an expression tree."""
    out = []
    if isinstance(e, Const):
        if isinstance(e.value, bool):
            out.append(Const(not e.value))
        elif isinstance(e.value, int):
            out += [Const(e.value + 1), Const(e.value - 1)]
        else:
            out.append(Const(e.value * 2))
    elif isinstance(e, BinOp):
        if e.op in _CMP_FLIP:
            out.append(BinOp(_CMP_FLIP[e.op], e.left, e.right))
        if e.op in _ARITH_SWAP:
            out.append(BinOp(_ARITH_SWAP[e.op], e.left, e.right))
        out += [BinOp(e.op, x, e.right) for x in _expr_edits(e.left)]
        out += [BinOp(e.op, e.left, x) for x in _expr_edits(e.right)]
    elif isinstance(e, UnOp):
        out += [UnOp(e.op, x) for x in _expr_edits(e.operand)]
        if e.op == "not":
            out.append(e.operand)
    elif isinstance(e, Func):
        for k, a in enumerate(e.args):
            out += [Func(e.name, e.args[:k] + (x,) + e.args[k + 1:]) for x in _expr_edits(a)]
    return out


def _bound_edits(e) -> list:
    return [BinOp("+", e, Const(1)), BinOp("-", e, Const(1))]


def _qref_edits(r):
    return [QRef(r.array, x) for x in _expr_edits(r.index)] if isinstance(r, QRef) else []


def _stmt_cm_edits(stmt) -> list:
    """Classical perturbations of one statement (one line of text each)."""
    out = []
    if isinstance(stmt, For):
        out += [dataclasses.replace(stmt, upper=x) for x in _bound_edits(stmt.upper)]
        out += [dataclasses.replace(stmt, lower=x) for x in _bound_edits(stmt.lower)]
    elif isinstance(stmt, If):
        out += [dataclasses.replace(stmt, cond=x) for x in _expr_edits(stmt.cond)]
        out.append(dataclasses.replace(stmt, cond=UnOp("not", stmt.cond)))
    elif isinstance(stmt, RepeatUntil):
        out.append(dataclasses.replace(stmt, max_iter=stmt.max_iter + 1))
    elif isinstance(stmt, ClassicalAssign):
        out += [dataclasses.replace(stmt, expr=x) for x in _expr_edits(stmt.expr)]
    elif isinstance(stmt, RandomInt):
        out += [dataclasses.replace(stmt, upper=x) for x in _expr_edits(stmt.upper)]
    elif isinstance(stmt, ControlledApp):
        if stmt.polarity is not None:
            out += [dataclasses.replace(stmt, polarity=x) for x in _expr_edits(stmt.polarity)]
        out += [dataclasses.replace(stmt, body=b) for b in _stmt_cm_edits(stmt.body)]
    elif isinstance(stmt, GateApp):
        if stmt.angle is not None:
            out += [dataclasses.replace(stmt, angle=x) for x in _expr_edits(stmt.angle)]
        for k, t in enumerate(stmt.targets):
            out += [dataclasses.replace(stmt, targets=stmt.targets[:k] + (x,) + stmt.targets[k + 1:])
                    for x in _qref_edits(t)]
        if len(stmt.targets) >= 2:
            out.append(dataclasses.replace(stmt, targets=(stmt.targets[1], stmt.targets[0]) + stmt.targets[2:]))
    elif isinstance(stmt, Call):
        for k, a in enumerate(stmt.args):
            if isinstance(a, QRef):
                edits = _qref_edits(a)
            elif isinstance(a, (Const, Var, BinOp, UnOp, Len, Func)):
                edits = _expr_edits(a)
            else:
                edits = []
            out += [dataclasses.replace(stmt, args=stmt.args[:k] + (x,) + stmt.args[k + 1:]) for x in edits]
        qpos = [k for k, a in enumerate(stmt.args) if isinstance(a, QRef)]
        if len(qpos) >= 2:
            a, b = qpos[0], qpos[1]
            args = list(stmt.args)
            args[a], args[b] = args[b], args[a]
            out.append(dataclasses.replace(stmt, args=tuple(args)))
    return out


def _cm_candidates(sub):
    for blk in _blocks(sub.body):
        for idx, stmt in enumerate(blk.body):
            site = blk.path + (idx,)
            for new in _stmt_cm_edits(stmt):
                yield site, EditKind.REPLACE, (lambda bp=blk.path, i=idx, s=new: (_replace(sub, bp, i, s), _line(s)))


def _reads(sub: Subroutine, var: str) -> bool:
    if var in sub.returns:
        return True
    for _, s in walk(sub.body):
        exprs = []
        for f in dataclasses.fields(s):
            v = getattr(s, f.name)
            exprs.extend(v if isinstance(v, tuple) else (v,))
        for e in exprs:
            if isinstance(e, (Const, Var, BinOp, UnOp, Len, Func)) and var in free_vars(e):
                return True
            if isinstance(e, QRef) and var in free_vars(e.index):
                return True
    return False


def _mm_candidates(sub):
    var = _fresh(sub, DISCARD_VAR)
    for blk in _blocks(sub.body):
        targets = [QSlice(p.name) for p in sub.params if p.kind == "qubits"]
        targets += _qubit_refs(sub, blk.loop_vars)
        for idx in range(len(blk.body) + 1):
            for t in targets:
                st = MeasureInto(var, t)
                yield blk.path + (idx,), EditKind.ADD, (
                    lambda bp=blk.path, i=idx, s=st: (_insert(sub, bp, i, s), _line(s)))
        for idx, stmt in enumerate(blk.body):
            if not isinstance(stmt, MeasureInto):
                continue
            site = blk.path + (idx,)
            if _reads(sub, stmt.var):
                new = ClassicalAssign(stmt.var, Const(0))
                yield site, EditKind.REPLACE, (lambda bp=blk.path, i=idx, s=new: (_replace(sub, bp, i, s), _line(s)))
            else:
                yield site, EditKind.REMOVE, (lambda bp=blk.path, i=idx, s=stmt: (_remove(sub, bp, i), _line(s)))


_GENERATORS = {
    MutationKind.GM: _gm_candidates,
    MutationKind.SM: _sm_candidates,
    MutationKind.CM: _cm_candidates,
    MutationKind.MM: _mm_candidates,
}


def _as_rng(rng):
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


def enumerate_mutants(
    sub: Subroutine,
    kinds: Iterable = ALL_KINDS,
    limit_per_kind: Optional[int] = None,
    rng=None,
    seed: Optional[int] = None,
) -> List[Mutant]:
    """Validated single-edit mutants of ``sub``, at most ``limit_per_kind`` per kind.

    Each draw picks an eligible site uniformly, then a payload uniformly among
    that site's remaining candidates; ill-formed and duplicate programs are
    skipped. Kinds without eligible sites yield nothing. With no limit every
    distinct valid mutant is returned in a seeded random order.
    """
    rng = _as_rng(rng if rng is not None else seed)
    base_text = root_block(serialize(sub))
    out = []
    for kind in [MutationKind(k) for k in kinds]:
        by_site: Dict[tuple, list] = {}
        for site, edit, thunk in _GENERATORS[kind](sub):
            by_site.setdefault(site, []).append((edit, thunk))
        sites = sorted(by_site, key=format_path)
        seen = set()
        made = 0
        while sites and (limit_per_kind is None or made < limit_per_kind):
            si = int(rng.integers(len(sites)))
            pool = by_site[sites[si]]
            edit, thunk = pool.pop(int(rng.integers(len(pool))))
            site = sites[si]
            if not pool:
                sites.pop(si)
            program, payload = thunk()
            if not is_well_formed(program):
                continue
            try:
                text = root_block(serialize(program))
            except ValueError:
                continue
            if text == base_text or "\n".join(text) in seen or _line_distance(base_text, text) != 1:
                continue
            seen.add("\n".join(text))
            out.append(Mutant(sub.name, kind, edit, format_path(site), payload, program, seed))
            made += 1
    return out


def single_edit_distance(base: Subroutine, mutant: Subroutine) -> int:
    """Number of statement lines that differ between the two root bodies.

    Counted as the smallest insert/remove/replace script over whole lines.
    """
    return _line_distance(root_block(serialize(base)), root_block(serialize(mutant)))


def _line_distance(a: Sequence[str], b: Sequence[str]) -> int:
    prev = list(range(len(b) + 1))
    for i in range(1, len(a) + 1):
        cur = [i] + [0] * len(b)
        for j in range(1, len(b) + 1):
            cur[j] = min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (a[i - 1] != b[j - 1]))
        prev = cur
    return prev[-1]


# --- trigger trials ----------------------------------------------------------------------


class TrialRunner:
    """Single-shot trigger trials of one mutant against the correct program.

    ``mode`` is "inverse" (run the mutant, then the correct program's
    inverse, then unprepare the input), "map" (the mutant should carry the
    input register onto the output register unchanged) or "qft" (classical
    inputs use the product-form QFT output check; other inputs fall back to
    "inverse"). The composed program is built once and reused across trials.
    """

    def __init__(self, mutant: Subroutine, oracle: Subroutine, n: int,
                 binding: Optional[Binding] = None, mode: str = "inverse"):
        if [p.kind for p in mutant.params] != [p.kind for p in oracle.params]:
            raise ValueError(f"mutant and oracle signatures differ for {oracle.name}")
        if mode not in ("inverse", "map", "qft"):
            raise ValueError(f"unknown trial mode {mode!r}")
        self.mutant = mutant
        self.n = n
        self.binding = binding or Binding()
        self.mode = mode
        if mode == "map":
            self.program = mutant
        else:
            self.program = sequence(f"{mutant.name}_undo", [mutant, inverse_of(oracle)], oracle.params)
        if mode == "qft":
            self.layout = self.binding.layout(mutant, n)
            self.in_reg, _ = self.binding.registers(mutant, self.layout)

    def trial(self, kind, rng) -> bool:
        """True iff this single run exposes the mutation (or faults)."""
        kind = InputKind(kind)
        if self.mode == "qft" and kind is InputKind.CI:
            j = int(rng.integers(2 ** len(self.in_reg)))
            state = new_state(self.layout.n_qubits)
            gen_ket_x(len(self.in_reg), j).prepare(state, self.in_reg)
            try:
                execute(self.mutant, self.layout.args, state, rng)
            except RuntimeFault:
                return True
            return not qft_output_check(j, len(self.in_reg), state, rng, qubits=self.in_reg).passed
        return not identity_check(self.program, self.n, 1, (kind,), rng, self.binding).passed

    def rate(self, kind, trials: int, rng) -> float:
        return sum(self.trial(kind, rng) for _ in range(trials)) / trials


def trigger_trial(mutant, oracle: Subroutine, kind, n: int, rng, binding: Optional[Binding] = None,
                  mode: str = "inverse") -> bool:
    program = mutant.program if isinstance(mutant, Mutant) else mutant
    return TrialRunner(program, oracle, n, binding, mode).trial(kind, rng)


# --- corpus files ------------------------------------------------------------------------

MANIFEST = "manifest.csv"
MANIFEST_HEADER = ["base", "kind", "edit", "site", "payload", "seed"]


def mutant_filename(index: int, m: Mutant) -> str:
    return f"{index:04d}_{m.base}_{m.kind.value}_{m.edit.value}.qir"


def write_corpus(mutants: Sequence[Mutant], directory: str) -> str:
    """One ``.qir`` file per mutant plus ``manifest.csv`` (rows in file order)."""
    os.makedirs(directory, exist_ok=True)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(MANIFEST_HEADER)
    for i, m in enumerate(mutants):
        with open(os.path.join(directory, mutant_filename(i, m)), "w", encoding="utf-8") as fh:
            fh.write(serialize(m.program))
        w.writerow(m.manifest_row())
    path = os.path.join(directory, MANIFEST)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(buf.getvalue())
    return path


def read_corpus(directory: str) -> List[Mutant]:
    with open(os.path.join(directory, MANIFEST), encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0] != MANIFEST_HEADER:
        raise ValueError(f"{directory}: manifest header must be {','.join(MANIFEST_HEADER)}")
    out = []
    for i, row in enumerate(rows[1:]):
        base, kind, edit, site, payload, seed = row
        probe = Mutant(base, MutationKind(kind), EditKind(edit), site, payload, None)
        with open(os.path.join(directory, mutant_filename(i, probe)), encoding="utf-8") as fh:
            program = parse(fh.read())
        out.append(dataclasses.replace(probe, program=program, seed=int(seed) if seed else None))
    return out


__all__ = [
    "ALL_KINDS", "EditKind", "MANIFEST_HEADER", "Mutant", "MutationKind", "TrialRunner", "enumerate_mutants",
    "read_corpus", "register_buggy_variant", "single_edit_distance", "trigger_trial", "write_corpus",
]
