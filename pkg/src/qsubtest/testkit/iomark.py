"""IO marks: ``Name : (a, q:b, sub:q:c) -> (q:d'^BE)``.

``q:`` marks a quantum variable, ``sub:`` a subroutine-typed one, a trailing
``'`` an output and ``^BE``/``^LE`` the endianness of a quantum register.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from typing import Optional

from ..errors import ParseError


class IOType(str, enum.Enum):
    CLASSICAL = "Classical"
    GENERATE_QUANTUM = "GenerateQuantum"
    DETECT_QUANTUM = "DetectQuantum"
    TRANSFORM = "Transform"


@dataclass(frozen=True)
class MarkedVar:
    name: str
    is_quantum: bool = False
    is_subroutine: bool = False
    endian: Optional[str] = None

    def __post_init__(self):
        if self.endian is not None:
            if self.endian not in ("BE", "LE"):
                raise ValueError(f"endian must be BE or LE, got {self.endian!r}")
            if not self.is_quantum:
                raise ValueError(f"endian marker on classical variable {self.name!r}")

    @property
    def base_name(self) -> str:
        return self.name.rstrip("'")

    @property
    def is_output(self) -> bool:
        return self.name.endswith("'")

    def format(self) -> str:
        out = ("sub:" if self.is_subroutine else "") + ("q:" if self.is_quantum else "") + self.name
        if self.endian:
            out += f"^{self.endian}"
        return out


@dataclass(frozen=True)
class IOMark:
    program: str
    inputs: tuple = ()
    outputs: tuple = ()

    def __post_init__(self):
        for v in self.outputs:
            if not v.is_output:
                raise ValueError(f"output {v.name!r} must end with the prime marker")
        for v in self.inputs:
            if v.is_output:
                raise ValueError(f"input {v.name!r} carries the output marker")

    @property
    def in_out(self) -> tuple:
        """Names that appear both as input and (primed) output."""
        ins = {v.name for v in self.inputs}
        return tuple(v.base_name for v in self.outputs if v.base_name in ins)

    def format(self) -> str:
        ins = ", ".join(v.format() for v in self.inputs)
        outs = ", ".join(v.format() for v in self.outputs)
        return f"{self.program} : ({ins}) -> ({outs})"

    def __str__(self):
        return self.format()


_VAR = re.compile(r"(?P<sub>sub:)?(?P<q>q:)?(?P<name>[A-Za-z_][A-Za-z0-9_]*'?)(?:\^(?P<endian>BE|LE))?$")
_MARK = re.compile(r"\s*(?P<prog>[A-Za-z_][A-Za-z0-9_]*)\s*:\s*\((?P<ins>[^()]*)\)\s*->\s*\((?P<outs>[^()]*)\)\s*$")


def _parse_vars(text: str, offset: int) -> tuple:
    out = []
    if not text.strip():
        return ()
    pos = offset
    for raw in text.split(","):
        item = raw.strip()
        start = pos + (len(raw) - len(raw.lstrip()))
        m = _VAR.match(item)
        if not m:
            raise ParseError(f"malformed variable {item!r}", start)
        try:
            out.append(MarkedVar(m["name"], bool(m["q"]), bool(m["sub"]), m["endian"]))
        except ValueError as exc:
            raise ParseError(str(exc), start) from None
        pos += len(raw) + 1
    return tuple(out)


def parse_io_mark(text: str) -> IOMark:
    m = _MARK.match(text)
    if not m:
        # locate the first structural problem for the error position
        for token in (":", "(", ")", "->"):
            if token not in text:
                raise ParseError(f"IO mark is missing {token!r}", len(text))
        raise ParseError(f"malformed IO mark {text!r}", 0)
    inputs = _parse_vars(m["ins"], m.start("ins"))
    outputs = _parse_vars(m["outs"], m.start("outs"))
    try:
        return IOMark(m["prog"], inputs, outputs)
    except ValueError as exc:
        raise ParseError(str(exc), m.start("ins")) from None


def format_io_mark(mark: IOMark) -> str:
    return mark.format()


def classify_io_type(mark: IOMark) -> IOType:
    """Classification by the presence of quantum inputs and quantum outputs.

    Subroutine-typed quantum inputs count as quantum inputs.
    """
    q_in = any(v.is_quantum for v in mark.inputs)
    q_out = any(v.is_quantum for v in mark.outputs)
    if q_in and q_out:
        return IOType.TRANSFORM
    if q_out:
        return IOType.GENERATE_QUANTUM
    if q_in:
        return IOType.DETECT_QUANTUM
    return IOType.CLASSICAL
