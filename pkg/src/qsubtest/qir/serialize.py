"""Canonical text form of the IR (header ``qir/1``).

Each line holds one compact JSON array, indented two spaces per nesting
level. A file lists every reachable subroutine, dependencies first; the last
one is the root. Block statements open a line (``if``, ``for``, ``repeat``,
``within``) and close with ``end`` (``until`` for repeat); ``else`` and
``apply`` separate the second block. Each simple statement occupies exactly
one line, so a single-statement edit changes a single line.

Expressions::

    ["c", value]  ["v", name]  ["len", name]  ["un", op, e]
    ["bin", op, a, b]  ["fn", name, [args...]]

Qubit arguments::

    ["q", array, index]  ["qs", array, start|null, stop|null, reverse]
    ["qcat", [parts...]]

Handle arguments: ``["h", name]`` (parameter) or ``["sub", name]`` (static).
"""

from __future__ import annotations

import json

from ..errors import ParseError
from .analysis import closure
from .expr import BinOp, Const, Func, Len, UnOp, Var
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

HEADER = "qir/1"


def _dumps(obj) -> str:
    return json.dumps(obj, separators=(",", ":"), allow_nan=False)


# --- encoding ---------------------------------------------------------------------


def enc_expr(e):
    if e is None:
        return None
    if isinstance(e, Const):
        return ["c", e.value]
    if isinstance(e, Var):
        return ["v", e.name]
    if isinstance(e, Len):
        return ["len", e.name]
    if isinstance(e, UnOp):
        return ["un", e.op, enc_expr(e.operand)]
    if isinstance(e, BinOp):
        return ["bin", e.op, enc_expr(e.left), enc_expr(e.right)]
    if isinstance(e, Func):
        return ["fn", e.name, [enc_expr(a) for a in e.args]]
    raise TypeError(f"not an expression: {e!r}")


def enc_qarg(a):
    if isinstance(a, QRef):
        return ["q", a.array, enc_expr(a.index)]
    if isinstance(a, QSlice):
        return ["qs", a.array, enc_expr(a.start), enc_expr(a.stop), a.reverse]
    if isinstance(a, QConcat):
        return ["qcat", [enc_qarg(p) for p in a.parts]]
    raise TypeError(f"not a qubit argument: {a!r}")


def enc_arg(a):
    if isinstance(a, (QRef, QSlice, QConcat)):
        return enc_qarg(a)
    if isinstance(a, HandleRef):
        return ["h", a.name]
    if isinstance(a, SubRef):
        return ["sub", a.sub.name]
    return enc_expr(a)


def enc_simple(s):
    if isinstance(s, GateApp):
        return ["gate", s.gate, [enc_qarg(t) for t in s.targets], enc_expr(s.angle)]
    if isinstance(s, ControlledApp):
        return ["ctl", enc_qarg(s.controls), enc_expr(s.polarity), enc_simple(s.body)]
    if isinstance(s, Call):
        callee = ["sub", s.callee.name] if isinstance(s.callee, Subroutine) else ["h", s.callee.name]
        return ["call", callee, [enc_arg(a) for a in s.args], list(s.bind), s.adjoint]
    if isinstance(s, MeasureInto):
        return ["measure", s.var, enc_qarg(s.qubits)]
    if isinstance(s, ClassicalAssign):
        return ["assign", s.var, enc_expr(s.expr)]
    if isinstance(s, RandomInt):
        return ["random", s.var, enc_expr(s.upper)]
    raise TypeError(f"not a simple statement: {s!r}")


def _enc_block(body, depth, lines):
    pad = "  " * depth
    for s in body:
        if isinstance(s, If):
            lines.append(pad + _dumps(["if", enc_expr(s.cond)]))
            _enc_block(s.then, depth + 1, lines)
            if s.orelse:
                lines.append(pad + _dumps(["else"]))
                _enc_block(s.orelse, depth + 1, lines)
            lines.append(pad + _dumps(["end"]))
        elif isinstance(s, For):
            lines.append(pad + _dumps(["for", s.var, enc_expr(s.lower), enc_expr(s.upper), s.reverse]))
            _enc_block(s.body, depth + 1, lines)
            lines.append(pad + _dumps(["end"]))
        elif isinstance(s, RepeatUntil):
            lines.append(pad + _dumps(["repeat", s.max_iter]))
            _enc_block(s.body, depth + 1, lines)
            lines.append(pad + _dumps(["until", enc_expr(s.cond)]))
        elif isinstance(s, WithinApply):
            lines.append(pad + _dumps(["within"]))
            _enc_block(s.within, depth + 1, lines)
            lines.append(pad + _dumps(["apply"]))
            _enc_block(s.apply, depth + 1, lines)
            lines.append(pad + _dumps(["end"]))
        else:
            lines.append(pad + _dumps(enc_simple(s)))


def _enc_param(p: Param):
    return [p.name, p.kind, enc_expr(p.length), list(p.signature) if p.signature is not None else None]


def serialize_one(sub: Subroutine) -> list:
    lines = [_dumps(["sub", sub.name, [_enc_param(p) for p in sub.params], list(sub.returns)])]
    _enc_block(sub.body, 1, lines)
    lines.append(_dumps(["end"]))
    return lines


def serialize(sub: Subroutine) -> str:
    """Canonical text for ``sub`` and every subroutine it references."""
    subs = closure(sub)
    names = {}
    for s in subs:
        if s.name in names and names[s.name] != s:
            raise ValueError(f"two different subroutines share the name {s.name!r}")
        names[s.name] = s
    lines = [HEADER]
    emitted = set()
    for s in subs:
        if s.name in emitted:
            continue
        emitted.add(s.name)
        lines.extend(serialize_one(s))
    return "\n".join(lines) + "\n"


def root_block(text: str) -> list:
    """Lines of the last (root) subroutine in a serialized file."""
    lines = text.splitlines()
    start = max(i for i, line in enumerate(lines) if line.startswith('["sub",'))
    return lines[start:]


# --- decoding ---------------------------------------------------------------------


class _Decoder:
    def __init__(self, lineno):
        self.lineno = lineno
        self.subs = {}

    def fail(self, msg):
        raise ParseError(msg, f"line {self.lineno}")

    def expr(self, e):
        if e is None:
            return None
        if not isinstance(e, list) or not e:
            self.fail(f"bad expression {e!r}")
        tag = e[0]
        if tag == "c" and len(e) == 2 and isinstance(e[1], (int, float, bool)):
            return Const(e[1])
        if tag == "v" and len(e) == 2:
            return Var(e[1])
        if tag == "len" and len(e) == 2:
            return Len(e[1])
        if tag == "un" and len(e) == 3:
            return UnOp(e[1], self.expr(e[2]))
        if tag == "bin" and len(e) == 4:
            return BinOp(e[1], self.expr(e[2]), self.expr(e[3]))
        if tag == "fn" and len(e) == 3:
            return Func(e[1], tuple(self.expr(a) for a in e[2]))
        self.fail(f"bad expression {e!r}")

    def qarg(self, a):
        if isinstance(a, list) and a:
            if a[0] == "q" and len(a) == 3:
                return QRef(a[1], self.expr(a[2]))
            if a[0] == "qs" and len(a) == 5:
                return QSlice(a[1], self.expr(a[2]), self.expr(a[3]), bool(a[4]))
            if a[0] == "qcat" and len(a) == 2:
                return QConcat(tuple(self.qarg(p) for p in a[1]))
        self.fail(f"bad qubit argument {a!r}")

    def sub_ref(self, name):
        if name not in self.subs:
            self.fail(f"reference to undefined subroutine {name!r}")
        return self.subs[name]

    def arg(self, a):
        if isinstance(a, list) and a and a[0] in ("q", "qs", "qcat"):
            return self.qarg(a)
        if isinstance(a, list) and a and a[0] == "h":
            return HandleRef(a[1])
        if isinstance(a, list) and a and a[0] == "sub":
            return SubRef(self.sub_ref(a[1]))
        return self.expr(a)

    def simple(self, s):
        tag = s[0]
        if tag == "gate" and len(s) == 4:
            return GateApp(s[1], tuple(self.qarg(t) for t in s[2]), self.expr(s[3]))
        if tag == "ctl" and len(s) == 4:
            return ControlledApp(self.simple(s[3]), self.qarg(s[1]), self.expr(s[2]))
        if tag == "call" and len(s) == 5:
            ref = s[1]
            callee = self.sub_ref(ref[1]) if ref[0] == "sub" else HandleRef(ref[1])
            return Call(callee, tuple(self.arg(a) for a in s[2]), tuple(s[3]), bool(s[4]))
        if tag == "measure" and len(s) == 3:
            return MeasureInto(s[1], self.qarg(s[2]))
        if tag == "assign" and len(s) == 3:
            return ClassicalAssign(s[1], self.expr(s[2]))
        if tag == "random" and len(s) == 3:
            return RandomInt(s[1], self.expr(s[2]))
        self.fail(f"bad statement {s!r}")

    def param(self, p):
        if not isinstance(p, list) or len(p) != 4:
            self.fail(f"bad parameter {p!r}")
        sig = tuple(p[3]) if p[3] is not None else None
        try:
            return Param(p[0], p[1], self.expr(p[2]), sig)
        except ValueError as exc:
            self.fail(str(exc))


def parse(text: str) -> Subroutine:
    """Inverse of :func:`serialize`; returns the root subroutine."""
    lines = text.splitlines()
    if not lines or lines[0].strip() != HEADER:
        raise ParseError(f"missing {HEADER!r} header", "line 1")
    dec = _Decoder(1)
    root = None
    # each frame: [kind, blocks(list of lists), extra]
    stack = []
    current_sub = None
    for lineno, raw in enumerate(lines[1:], start=2):
        dec.lineno = lineno
        if not raw.strip():
            continue
        try:
            rec = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc.msg}", f"line {lineno}") from None
        if not isinstance(rec, list) or not rec or not isinstance(rec[0], str):
            dec.fail("record must be a non-empty array")
        tag = rec[0]
        if current_sub is None:
            if tag != "sub" or len(rec) != 4:
                dec.fail("expected a subroutine header")
            current_sub = (rec[1], tuple(dec.param(p) for p in rec[2]), tuple(rec[3]))
            stack = [["body", [[]], None]]
            continue
        top = stack[-1]
        block = top[1][-1]
        if tag == "end":
            if len(stack) == 1:
                name, params, returns = current_sub
                sub = Subroutine(name, params, tuple(stack[0][1][0]), returns)
                if name in dec.subs:
                    dec.fail(f"duplicate subroutine {name!r}")
                dec.subs[name] = sub
                root = sub
                current_sub = None
                continue
            stack.pop()
            kind, blocks, extra = top
            if kind == "if":
                node = If(extra, tuple(blocks[0]), tuple(blocks[1]) if len(blocks) > 1 else ())
            elif kind == "for":
                node = For(extra[0], extra[1], extra[2], tuple(blocks[0]), extra[3])
            elif kind == "within":
                if len(blocks) != 2:
                    dec.fail("within without apply")
                node = WithinApply(tuple(blocks[0]), tuple(blocks[1]))
            else:
                dec.fail(f"'end' closes {kind}")
            stack[-1][1][-1].append(node)
        elif tag == "else":
            if top[0] != "if" or len(top[1]) != 1:
                dec.fail("misplaced else")
            top[1].append([])
        elif tag == "apply":
            if top[0] != "within" or len(top[1]) != 1:
                dec.fail("misplaced apply")
            top[1].append([])
        elif tag == "until":
            if top[0] != "repeat":
                dec.fail("misplaced until")
            stack.pop()
            node = RepeatUntil(tuple(top[1][0]), dec.expr(rec[1]), top[2])
            stack[-1][1][-1].append(node)
        elif tag == "if":
            stack.append(["if", [[]], dec.expr(rec[1])])
        elif tag == "for":
            stack.append(["for", [[]], (rec[1], dec.expr(rec[2]), dec.expr(rec[3]), bool(rec[4]))])
        elif tag == "repeat":
            stack.append(["repeat", [[]], int(rec[1])])
        elif tag == "within":
            stack.append(["within", [[]], None])
        else:
            block.append(dec.simple(rec))
    if current_sub is not None:
        raise ParseError("unterminated subroutine", f"line {len(lines)}")
    if root is None:
        raise ParseError("no subroutine found", "line 1")
    return root


def parse_all(text: str) -> dict:
    """Parse a file and return every subroutine by name."""
    root = parse(text)
    return {s.name: s for s in closure(root)}
