"""Dense state vector and the operations on it.

Qubit 0 is the most significant bit of every integer reading of a register:
basis index ``i`` has qubit ``q`` equal to ``(i >> (n - 1 - q)) & 1``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..errors import ArityError, QubitIndexError, ResourceError
from . import _backend
from .gates import CONTROLLED_FORMS, Gate, one_qubit_matrix

MAX_QUBITS = 16
NORM_TOL = 1e-9
AMP_TOL = 1e-10


class StateVector:
    """Amplitudes of an ``n_qubits`` register; mutated in place by gate operations."""

    __slots__ = ("n_qubits", "amplitudes")

    def __init__(self, n_qubits: int, amplitudes: np.ndarray):
        if amplitudes.shape != (2**n_qubits,):
            raise ValueError("amplitude vector has the wrong length")
        self.n_qubits = n_qubits
        self.amplitudes = np.ascontiguousarray(amplitudes, dtype=np.complex128)

    @classmethod
    def from_amplitudes(cls, amplitudes, normalize=False) -> "StateVector":
        amps = np.asarray(amplitudes, dtype=np.complex128).ravel()
        n = int(round(np.log2(amps.shape[0]))) if amps.shape[0] > 0 else -1
        if n < 0 or 2**n != amps.shape[0]:
            raise ValueError("length must be a power of two")
        if n > MAX_QUBITS:
            raise ResourceError(f"{n} qubits exceeds the cap of {MAX_QUBITS}")
        if normalize:
            amps = amps / np.linalg.norm(amps)
        return cls(n, amps.copy())

    @classmethod
    def basis(cls, n_qubits: int, index: int) -> "StateVector":
        state = new_state(n_qubits)
        state.amplitudes[0] = 0
        state.amplitudes[index] = 1
        return state

    def copy(self) -> "StateVector":
        return StateVector(self.n_qubits, self.amplitudes.copy())

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def __repr__(self):
        return f"StateVector(n_qubits={self.n_qubits})"


@dataclass
class MeasurementOutcome:
    bits: tuple
    post_state: StateVector

    @property
    def value(self) -> int:
        """The bits read as an integer, first measured qubit most significant."""
        return bits_to_int(self.bits)


def bits_to_int(bits) -> int:
    value = 0
    for b in bits:
        value = (value << 1) | int(b)
    return value


def int_to_bits(value: int, width: int) -> tuple:
    return tuple((value >> (width - 1 - i)) & 1 for i in range(width))


def new_state(n_qubits: int) -> StateVector:
    if n_qubits < 0:
        raise ValueError("qubit count must be nonnegative")
    if n_qubits > MAX_QUBITS:
        raise ResourceError(f"{n_qubits} qubits exceeds the cap of {MAX_QUBITS}")
    amps = np.zeros(2**n_qubits, dtype=np.complex128)
    amps[0] = 1.0
    return StateVector(n_qubits, amps)


def _check_qubits(state: StateVector, qubits: Sequence[int]) -> None:
    n = state.n_qubits
    seen = set()
    for q in qubits:
        if not isinstance(q, (int, np.integer)) or q < 0 or q >= n:
            raise QubitIndexError(f"qubit {q} out of range for {n}-qubit state")
        if q in seen:
            raise QubitIndexError(f"qubit {q} used twice")
        seen.add(q)


def _bit(n: int, q: int) -> int:
    return 1 << (n - 1 - q)


def _apply(state, kind, theta, controls, polarities, targets):
    """Core dispatch; operands already validated."""
    n = state.n_qubits
    kernels = _backend.kernels
    cmask = 0
    cval = 0
    for c, p in zip(controls, polarities):
        b = _bit(n, c)
        cmask |= b
        if p:
            cval |= b
    if kind in CONTROLLED_FORMS:
        k, base = CONTROLLED_FORMS[kind]
        for c in targets[:k]:
            b = _bit(n, c)
            cmask |= b
            cval |= b
        kind, targets = base, targets[k:]
    if kind == "SWAP":
        kernels.apply_swap(state.amplitudes, _bit(n, targets[0]), _bit(n, targets[1]), cmask, cval)
        return
    tbit = _bit(n, targets[0])
    m = one_qubit_matrix(kind, theta)
    if m[0, 1] == 0 and m[1, 0] == 0 and m[0, 0] == 1:
        kernels.apply_phase(state.amplitudes, tbit, complex(m[1, 1]), cmask, cval)
        return
    kernels.apply_1q(
        state.amplitudes, tbit,
        complex(m[0, 0]), complex(m[0, 1]), complex(m[1, 0]), complex(m[1, 1]),
        cmask, cval,
    )


def apply_gate(state: StateVector, gate: Gate, targets: Sequence[int]) -> StateVector:
    """Apply ``gate`` to ``targets`` in place and return the state."""
    targets = tuple(targets)
    if len(targets) != gate.arity:
        raise ArityError(f"{gate.kind} expects {gate.arity} targets, got {len(targets)}")
    _check_qubits(state, targets)
    _apply(state, gate.kind, gate.theta, (), (), targets)
    return state


def apply_controlled(
    state: StateVector,
    gate: Gate,
    controls: Sequence[int],
    polarities: Sequence[int] | None,
    targets: Sequence[int],
) -> StateVector:
    """Apply ``gate`` on the subspace where every control matches its polarity."""
    controls = tuple(controls)
    targets = tuple(targets)
    if polarities is None:
        polarities = (1,) * len(controls)
    polarities = tuple(int(p) for p in polarities)
    if len(polarities) != len(controls):
        raise ValueError("polarities must match controls in length")
    if any(p not in (0, 1) for p in polarities):
        raise ValueError("polarities must be 0 or 1")
    if len(targets) != gate.arity:
        raise ArityError(f"{gate.kind} expects {gate.arity} targets, got {len(targets)}")
    _check_qubits(state, controls + targets)
    _apply(state, gate.kind, gate.theta, controls, polarities, targets)
    return state


def exact_distribution(state: StateVector, qubits: Sequence[int]) -> np.ndarray:
    """Born probabilities of every outcome on ``qubits``, indexed by outcome integer."""
    qubits = tuple(qubits)
    _check_qubits(state, qubits)
    n = state.n_qubits
    probs = state.probabilities()
    if n == 0:
        return probs
    tensor = probs.reshape((2,) * n)
    others = tuple(q for q in range(n) if q not in qubits)
    marg = tensor.sum(axis=others) if others else tensor
    # remaining axes are in increasing qubit order; reorder to the requested order
    remaining = sorted(qubits)
    perm = [remaining.index(q) for q in qubits]
    marg = np.transpose(marg, perm) if len(perm) > 1 else marg
    return np.ascontiguousarray(marg).reshape(-1)


def _outcome_mask(n: int, qubits, bits) -> np.ndarray:
    idx = np.arange(2**n)
    keep = np.ones(2**n, dtype=bool)
    for q, b in zip(qubits, bits):
        keep &= ((idx >> (n - 1 - q)) & 1) == b
    return keep


def measure(state: StateVector, qubits: Sequence[int], rng: np.random.Generator) -> MeasurementOutcome:
    """Projective computational-basis measurement; collapses ``state`` in place."""
    qubits = tuple(qubits)
    dist = exact_distribution(state, qubits)
    total = dist.sum()
    cdf = np.cumsum(dist)
    r = rng.random() * total
    outcome = int(np.searchsorted(cdf, r, side="right"))
    outcome = min(outcome, len(dist) - 1)
    while dist[outcome] <= 0 and outcome > 0:
        outcome -= 1
    bits = int_to_bits(outcome, len(qubits))
    if qubits:
        keep = _outcome_mask(state.n_qubits, qubits, bits)
        amps = state.amplitudes
        amps[~keep] = 0
        amps /= np.sqrt(dist[outcome])
    return MeasurementOutcome(bits, state)


def sample_counts(state: StateVector, qubits: Sequence[int], shots: int, rng) -> dict:
    """Outcome counts of ``shots`` independent measurements of copies of ``state``."""
    dist = exact_distribution(state, qubits)
    dist = dist / dist.sum()
    draws = rng.multinomial(shots, dist)
    return {int(k): int(v) for k, v in enumerate(draws) if v}


def fidelity_with(state: StateVector, other: StateVector) -> float:
    if state.n_qubits != other.n_qubits:
        raise ValueError("states have different qubit counts")
    overlap = np.vdot(state.amplitudes, other.amplitudes)
    return float(min(1.0, abs(overlap) ** 2))


def dump_amplitudes(state: StateVector) -> str:
    """Plain-text dump: one ``bitstring real imag`` line per basis state."""
    n = state.n_qubits
    lines = []
    for i, a in enumerate(state.amplitudes):
        label = format(i, f"0{n}b") if n else ""
        lines.append(f"{label} {float(a.real)!r} {float(a.imag)!r}")
    return "\n".join(lines) + "\n"


def load_amplitudes(text: str) -> StateVector:
    rows = []
    for line in text.splitlines():
        if not line.strip():
            continue
        parts = line.split()
        if len(parts) == 2:  # zero-qubit state has an empty bitstring
            parts = [""] + parts
        label, re, im = parts
        rows.append((int(label, 2) if label else 0, complex(float(re), float(im))))
    rows.sort()
    return StateVector.from_amplitudes([a for _, a in rows])
