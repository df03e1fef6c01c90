"""Gate set with dense matrices and inverses."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

_S2 = 1.0 / np.sqrt(2.0)

# kind -> (arity, parametric)
GATE_INFO = {
    "X": (1, False),
    "Y": (1, False),
    "Z": (1, False),
    "H": (1, False),
    "S": (1, False),
    "Sdg": (1, False),
    "T": (1, False),
    "Tdg": (1, False),
    "R1": (1, True),
    "Rz": (1, True),
    "CNOT": (2, False),
    "SWAP": (2, False),
    "Toffoli": (3, False),
    "CSWAP": (3, False),
}

_INVERSE_KIND = {"S": "Sdg", "Sdg": "S", "T": "Tdg", "Tdg": "T"}

# Multi-qubit kinds reduce to a controlled one-qubit or swap kernel:
# kind -> (number of leading control operands, base kind)
CONTROLLED_FORMS = {
    "CNOT": (1, "X"),
    "Toffoli": (2, "X"),
    "CSWAP": (1, "SWAP"),
}


@dataclass(frozen=True)
class Gate:
    """An elementary gate; ``theta`` is only set for R1 and Rz."""

    kind: str
    theta: Optional[float] = None

    def __post_init__(self):
        if self.kind not in GATE_INFO:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        parametric = GATE_INFO[self.kind][1]
        if parametric and self.theta is None:
            raise ValueError(f"{self.kind} needs an angle")
        if not parametric and self.theta is not None:
            raise ValueError(f"{self.kind} takes no angle")

    @property
    def arity(self) -> int:
        return GATE_INFO[self.kind][0]

    @property
    def parametric(self) -> bool:
        return GATE_INFO[self.kind][1]

    def inverse(self) -> "Gate":
        if self.parametric:
            return Gate(self.kind, -self.theta)
        return Gate(_INVERSE_KIND.get(self.kind, self.kind))

    def matrix(self) -> np.ndarray:
        """Dense unitary; operand 0 is the most significant bit."""
        return gate_matrix(self.kind, self.theta)

    def __str__(self):
        if self.parametric:
            return f"{self.kind}({self.theta!r})"
        return self.kind


def one_qubit_matrix(kind: str, theta: Optional[float] = None) -> np.ndarray:
    if kind == "X":
        return np.array([[0, 1], [1, 0]], dtype=complex)
    if kind == "Y":
        return np.array([[0, -1j], [1j, 0]], dtype=complex)
    if kind == "Z":
        return np.array([[1, 0], [0, -1]], dtype=complex)
    if kind == "H":
        return np.array([[_S2, _S2], [_S2, -_S2]], dtype=complex)
    if kind == "S":
        return np.array([[1, 0], [0, 1j]], dtype=complex)
    if kind == "Sdg":
        return np.array([[1, 0], [0, -1j]], dtype=complex)
    if kind == "T":
        return np.array([[1, 0], [0, np.exp(1j * np.pi / 4)]], dtype=complex)
    if kind == "Tdg":
        return np.array([[1, 0], [0, np.exp(-1j * np.pi / 4)]], dtype=complex)
    if kind == "R1":
        return np.array([[1, 0], [0, np.exp(1j * theta)]], dtype=complex)
    if kind == "Rz":
        return np.array(
            [[np.exp(-0.5j * theta), 0], [0, np.exp(0.5j * theta)]], dtype=complex
        )
    raise ValueError(f"{kind} is not a one-qubit gate")


def gate_matrix(kind: str, theta: Optional[float] = None) -> np.ndarray:
    if GATE_INFO[kind][0] == 1:
        return one_qubit_matrix(kind, theta)
    if kind == "SWAP":
        m = np.eye(4, dtype=complex)
        m[[1, 2]] = m[[2, 1]]
        return m
    ncontrols, base = CONTROLLED_FORMS[kind]
    inner = gate_matrix(base)
    dim = 2 ** GATE_INFO[kind][0]
    m = np.eye(dim, dtype=complex)
    k = inner.shape[0]
    m[dim - k :, dim - k :] = inner
    return m
